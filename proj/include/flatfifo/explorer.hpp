#pragma once

#include <cstddef>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "flatfifo/model.hpp"

namespace flatfifo {

struct ExploreBounds {
  std::size_t max_configs = 50000;
  std::size_t max_channel_len = 20;
  std::size_t max_depth = 1u << 30;
};

constexpr int kLoseEdge = -1;

struct ReachEdge {
  int from = 0;
  int transition = 0;  // kLoseEdge for a lossy deletion
  int to = 0;
};

// Configs are stored as a state plus interned channel words.
class ReachGraph {
 public:
  std::vector<Word> words;
  std::vector<std::vector<int>> nodes;  // [state, word id per channel]
  std::vector<int> depth;
  std::vector<int> parent_edge;         // edge index that discovered the node, -1 for init
  std::vector<char> dropped;            // node had a successor discarded by a bound
  std::vector<ReachEdge> edges;
  bool truncated = false;

  std::size_t size() const { return nodes.size(); }
  Config config(int i) const;
  int find(const Config& c) const;
  // Transition indices along the BFS tree from the initial config.
  std::vector<int> path_to(int i) const;

  int intern(const Word& w);
  int add(const Config& c, int d);

 private:
  struct VecHash {
    std::size_t operator()(const std::vector<int>& v) const;
  };
  std::unordered_map<Word, int> word_ix_;
  std::unordered_map<std::vector<int>, int, VecHash> node_ix_;
};

// Successors of one config: (transition or kLoseEdge, config).
std::vector<std::pair<int, Config>> successors(const FifoMachine& m, const Config& c, Semantics sem);

ReachGraph explore(const FifoMachine& m, const Config& init, Semantics sem, const ExploreBounds& b);
Tri oracle_reachable(const FifoMachine& m, const Config& init, const Config& target, Semantics sem,
                     const ExploreBounds& b);
Tri oracle_csr(const FifoMachine& m, const Config& init, int q, Semantics sem, const ExploreBounds& b);
Tri oracle_cyclic(const FifoMachine& m, const Config& cfg, const ExploreBounds& b);

struct LetterCount {
  std::size_t count = 0;
  bool saturated = false;
};
LetterCount oracle_max_letter_count(const FifoMachine& m, const Config& init, int channel, int letter,
                                    const ExploreBounds& b, Semantics sem = Semantics::Perfect);

nlohmann::json graph_to_json(const FifoMachine& m, const ReachGraph& g);

}  // namespace flatfifo
