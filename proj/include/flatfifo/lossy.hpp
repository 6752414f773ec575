#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flatfifo/model.hpp"

namespace flatfifo {

// (a+e) when !star with a single letter, (a1+...+ak)* when star.
struct Atom {
  bool star = false;
  std::vector<Letter> letters;  // sorted, non-empty
  auto operator<=>(const Atom&) const = default;
  bool operator==(const Atom&) const = default;
};

using Product = std::vector<Atom>;

// Sum of products; no products denotes the empty language, an empty product denotes {e}.
struct Sre {
  std::vector<Product> products;
  auto operator<=>(const Sre&) const = default;
  bool operator==(const Sre&) const = default;
};

Atom choice(Letter a);
Atom star(std::vector<Letter> letters);
Product product_of_word(const Word& w);  // L_w

Product normalize_product(Product p);
Sre normalize(Sre s);
bool product_includes(const Product& p, const Product& q);  // p subset of q
bool sre_includes(const Sre& l1, const Sre& l2);
bool sre_member(const Word& w, const Sre& l);
// Members up to max_len (sorted, distinct); for oracles.
std::vector<Word> sre_members(const Sre& l, const std::vector<Letter>& alphabet, std::size_t max_len);
std::string sre_text(const FifoMachine& m, const Sre& s);
nlohmann::json sre_to_json(const FifoMachine& m, const Sre& s);

// One product per channel: the downward closure of a set of configs at one state is a finite union of these.
using Ideal = std::vector<Product>;
using IdealSet = std::vector<Ideal>;

bool ideal_includes(const Ideal& a, const Ideal& b);  // a subset of b
void add_ideal(IdealSet& s, Ideal i);                 // keeps s free of subsumed members
bool ideal_member(const Config& c, const Ideal& i);

// Lossy post of one transition on an ideal (empty when disabled).
std::optional<Ideal> lossy_post(const FifoMachine& m, const Ideal& i, int t);
std::optional<Ideal> lossy_post_seq(const FifoMachine& m, Ideal i, const std::vector<int>& seq);

constexpr int kDefaultFixpointBudget = 1024;

// All contents reachable at the anchor by iterating the loop, per ideal.
IdealSet lossy_loop_star_ideals(const FifoMachine& m, const IdealSet& from, const ElementaryLoop& l,
                                int budget = kDefaultFixpointBudget);
// Per-channel view of the same computation.
std::vector<Sre> lossy_loop_star(const FifoMachine& m, const std::vector<Sre>& from, const ElementaryLoop& l,
                                 int budget = kDefaultFixpointBudget);

using LossyReach = std::map<int, IdealSet>;
LossyReach lossy_reach_ideals(const FifoMachine& m, const Config& init, int budget = kDefaultFixpointBudget);
// state -> per-channel SRE (projection of the ideal union)
std::map<int, std::vector<Sre>> lossy_reach_set(const FifoMachine& m, const Config& init,
                                                int budget = kDefaultFixpointBudget);
// Whether the per-channel product equals the ideal union at every state.
bool channelwise_exact(const FifoMachine& m, const LossyReach& r);
bool lossy_reachable(const FifoMachine& m, const Config& init, const Config& target,
                     int budget = kDefaultFixpointBudget);

// ---------------------------------------------------------------- multi-head pushdown automata

constexpr int kDollar = -1;

struct HpdaRule {
  int from = 0;
  int symbol = 0;          // tape symbol or kDollar
  int pop = -1;            // -1: leave the stack alone
  std::vector<int> push;   // pushed bottom-up
  int to = 0;
};

struct Hpda {
  std::vector<std::string> states;
  std::vector<std::string> tape_alphabet;  // symbol names
  std::vector<std::string> stack_alphabet;
  std::vector<int> head;                   // head selector per state, 0-based
  int heads = 1;
  int start = 0;
  int bottom = 0;
  std::vector<int> finals;
  std::vector<HpdaRule> rules;
};

struct HpdaId {
  int state = 0;
  std::vector<int> pos;  // 0-based; pos == tape length means past the end marker
  std::vector<int> stack;
  auto operator<=>(const HpdaId&) const = default;
};

struct HpdaStats {
  std::size_t ids = 0;
  std::size_t invariant_violations = 0;
};

// Checks acceptance of tape (without the end marker). When `zeta_invariant` names a stack symbol and two
// heads exist, every visited ID outside `exempt_state` is checked for stack height == pos[0] - pos[1].
bool hpda_accepts(const Hpda& a, const std::vector<int>& tape, HpdaStats* stats = nullptr, int zeta_invariant = -1,
                  int exempt_state = -1);

struct FrontLossyEncoding {
  FifoMachine machine;             // with the filler prefix when the initial channels were non-empty
  Config init;
  int target = 0;
  std::vector<Hpda> automata;      // A_0 then one per channel
  std::vector<std::vector<int>> expr;  // bounded expression w1* ... wn* over transitions
};

FrontLossyEncoding build_frontlossy_hpda(const FifoMachine& m, const Config& init, int q_target,
                                         bool allow_filler = false);
// Two-head automaton for one channel, states q_H, q_h^1..q_h^n, q_f.
Hpda channel_hpda(const FifoMachine& m, int c);

// Yes when an accepted tape of length <= tape_bound exists, otherwise No (within the bound).
Tri decide_frontlossy_csr(const FifoMachine& m, const Config& init, int q, int tape_bound,
                          HpdaStats* stats = nullptr, bool allow_filler = true);

// Adds a path from target.state to a fresh q_stop that consumes the target contents behind an end marker.
std::pair<FifoMachine, int> lossy_reach_to_csr(const FifoMachine& m, const Config& target);

}  // namespace flatfifo
