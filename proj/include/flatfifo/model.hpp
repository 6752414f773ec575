#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "flatfifo/common.hpp"

namespace flatfifo {

enum class ActionKind { Send, Retrieve, Internal };

struct Action {
  ActionKind kind = ActionKind::Internal;
  int channel = -1;
  int letter = -1;  // index into FifoMachine::letters
  bool operator==(const Action&) const = default;
};

struct Transition {
  std::string id;
  int source = 0;
  int target = 0;
  Action action;
  bool operator==(const Transition&) const = default;
};

enum class Semantics { Perfect, Lossy, FrontLossy };
const char* to_string(Semantics s);
Semantics semantics_from_string(const std::string& s);

// Channel contents hold letter indices (as char32_t) of the owning machine.
struct Config {
  int state = 0;
  std::vector<Word> contents;
  auto operator<=>(const Config&) const = default;
  bool operator==(const Config&) const = default;
};

class FifoMachine {
 public:
  std::vector<std::string> states;
  std::vector<std::string> channels;
  std::vector<std::string> letters;
  std::vector<int> letter_channel;  // partition: owning channel of each letter
  std::vector<Transition> transitions;
  int initial = 0;

  int state_index(const std::string& name) const;
  int channel_index(const std::string& name) const;
  int letter_index(const std::string& name) const;
  int transition_index(const std::string& id) const;

  const std::vector<int>& out_edges(int q) const { return out_[q]; }
  const std::vector<int>& channel_letters(int c) const { return chan_letters_[c]; }
  Config initial_config() const;

  // Rebuilds lookup tables; called by every constructor path.
  void index();
  bool operator==(const FifoMachine& o) const;

 private:
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> chan_letters_;
  std::map<std::string, int> state_ix_, chan_ix_, letter_ix_, trans_ix_;
};

class MachineBuilder {
 public:
  MachineBuilder& channel(const std::string& name);
  MachineBuilder& letter(const std::string& channel, const std::string& name);
  MachineBuilder& state(const std::string& name, bool init = false);
  MachineBuilder& send(const std::string& id, const std::string& src, const std::string& dst,
                       const std::string& channel, const std::string& letter);
  MachineBuilder& retrieve(const std::string& id, const std::string& src, const std::string& dst,
                           const std::string& channel, const std::string& letter);
  MachineBuilder& internal(const std::string& id, const std::string& src, const std::string& dst);
  // Rewrites letters declared on several channels to `letter@channel`.
  MachineBuilder& rename_shared_letters(bool on = true);
  FifoMachine build() const;

 private:
  struct RawTrans {
    std::string id, src, dst, channel, letter;
    ActionKind kind;
  };
  std::vector<std::string> channels_;
  std::vector<std::pair<std::string, std::string>> letters_;  // (channel, letter)
  std::vector<std::pair<std::string, bool>> states_;
  std::vector<RawTrans> trans_;
  bool rename_ = false;
};

struct ParseOptions {
  bool rename_shared_letters = false;
};

FifoMachine parse_machine(const std::string& text, const ParseOptions& opt = {});
FifoMachine machine_from_json(const nlohmann::json& j, const ParseOptions& opt = {});
nlohmann::json machine_to_json(const FifoMachine& m);
std::string render_machine(const FifoMachine& m);
std::string action_text(const FifoMachine& m, const Action& a);

// Letters are concatenated when every letter name is one character, else joined by '.'.
std::string word_text(const FifoMachine& m, const Word& w);
Word parse_word(const FifoMachine& m, int channel, const std::string& text);
std::string render_config(const FifoMachine& m, const Config& c);
Config parse_config(const FifoMachine& m, const std::string& text);

std::vector<Config> step(const FifoMachine& m, const Config& c, int t, Semantics sem);
// Single-letter deletions used as explicit `lose` edges by lossy exploration.
std::vector<Config> lose_successors(const Config& c);

FifoMachine product(const std::vector<FifoMachine>& processes);

// Generic flatness over a multigraph with vertices 0..n-1; edges are (src, dst).
struct FlatnessResult {
  bool flat = true;
  int vertex = -1;
  std::vector<int> cycle1, cycle2;  // edge indices of two distinct cycles through vertex
};
FlatnessResult flatness_of(int n, const std::vector<std::pair<int, int>>& edges);
FlatnessResult is_flat(const FifoMachine& m);
// Strongly connected components, component ids in reverse topological order.
std::vector<int> scc_ids(int n, const std::vector<std::pair<int, int>>& edges);

struct ElementaryLoop {
  int anchor = 0;
  std::vector<int> body;  // transition indices, first leaves the anchor
  bool operator==(const ElementaryLoop&) const = default;
  auto operator<=>(const ElementaryLoop&) const = default;
};

std::optional<ElementaryLoop> loop_of(const FifoMachine& m, int q);
ElementaryLoop rotate_loop(const FifoMachine& m, const ElementaryLoop& l, int anchor);

struct PathSchema {
  std::vector<std::vector<int>> segments;  // loops.size() + 1 segments
  std::vector<ElementaryLoop> loops;
  bool operator==(const PathSchema&) const = default;
  auto operator<=>(const PathSchema&) const = default;
};

std::vector<PathSchema> path_schemas(const FifoMachine& m, int from, int to);
std::string render_schema(const FifoMachine& m, const PathSchema& s);

}  // namespace flatfifo
