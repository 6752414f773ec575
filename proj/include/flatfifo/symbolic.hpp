#pragma once

#include <map>
#include <optional>
#include <set>
#include <vector>

#include <json.hpp>

#include "flatfifo/linear.hpp"
#include "flatfifo/model.hpp"

namespace flatfifo {

// A literal word, or a block root^count with root primitive and count affine in parameters.
struct Segment {
  Word lit;
  Word root;
  Affine count;
  bool block() const { return !root.empty(); }
  auto operator<=>(const Segment&) const = default;
  bool operator==(const Segment&) const = default;
};

// Concatenation of segments. The single-block case prefix.period^count.suffix is the common shape;
// several blocks arise when two loops feed one channel.
struct ContentDescriptor {
  std::vector<Segment> parts;
  auto operator<=>(const ContentDescriptor&) const = default;
  bool operator==(const ContentDescriptor&) const = default;
};

// `seq` repeated `times` times; a run skeleton is a list of these.
struct TraceItem {
  std::vector<int> seq;
  Affine times;
};

struct SymbolicConfig {
  int state = 0;
  std::vector<ContentDescriptor> chans;
  std::vector<Constraint> cons;  // parameters are implicitly >= 0
  std::vector<TraceItem> trace;  // how the family was reached; not part of identity
};

bool same_family(const SymbolicConfig& a, const SymbolicConfig& b);
std::vector<int> params_of(const SymbolicConfig& s);
Word expand(const ContentDescriptor& d, const std::map<int, Int>& v);
Config concretize(const SymbolicConfig& s, const std::map<int, Int>& v);
std::vector<int> concretize_trace(const std::vector<TraceItem>& t, const std::map<int, Int>& v);
// Members for every parameter valuation in [0, max_value] that satisfies the constraints.
std::vector<Config> enumerate_members(const SymbolicConfig& s, Int max_value);

std::string descriptor_text(const FifoMachine& m, const ContentDescriptor& d);
nlohmann::json symbolic_to_json(const FifoMachine& m, const SymbolicConfig& s);

constexpr int kDefaultAccelerationBudget = 64;
constexpr std::size_t kUnionCap = 4096;  // per loop acceleration or transition sequence
// Families merged at one state from many paths; branching gadgets reach 2^n here.
constexpr std::size_t kStateUnionCap = std::size_t(1) << 20;

using ReachMap = std::map<int, std::vector<SymbolicConfig>>;

struct ReachWitness {
  std::vector<std::pair<std::vector<int>, Int>> skeleton;  // (sequence, repetitions)
  std::vector<int> run;
};

class SymbolicEngine {
 public:
  explicit SymbolicEngine(const FifoMachine& m, int budget = kDefaultAccelerationBudget);

  SymbolicConfig lift(const Config& c) const;
  std::optional<SymbolicConfig> simplify(SymbolicConfig s) const;
  std::vector<SymbolicConfig> post(const SymbolicConfig& s, int t) const;
  std::vector<SymbolicConfig> post(SymbolicConfig&& s, int t) const;
  // Cheap necessary condition for post(s, t) to be non-empty.
  bool may_fire(const SymbolicConfig& s, int t) const;
  std::vector<SymbolicConfig> post_seq(const SymbolicConfig& s, const std::vector<int>& seq) const;
  std::vector<SymbolicConfig> accelerate(const std::vector<SymbolicConfig>& S, const ElementaryLoop& l);
  // With keep set, only those states are recorded in the result.
  ReachMap reach_set(const Config& init, const std::optional<std::set<int>>& keep = std::nullopt);

  // Membership of a concrete config in a family; returns a parameter valuation.
  std::optional<std::map<int, Int>> member(const SymbolicConfig& s, const Config& c) const;
  // Refines s so that channel c lies in x^* x' (DFA product with block case splits).
  std::vector<SymbolicConfig> restrict_to(const SymbolicConfig& s, int c, const Word& x, const Word& xp);

  // Off skips trace bookkeeping; families then carry empty traces.
  void set_traces(bool on) { traces_ = on; }
  int fresh() { return next_param_++; }
  void reserve_params(const SymbolicConfig& s);

 private:
  const FifoMachine& m_;
  int budget_;
  int next_param_ = 0;
  bool traces_ = true;

  std::optional<SymbolicConfig> generalize(const SymbolicConfig& f, const SymbolicConfig& n, const ElementaryLoop& l,
                                           std::vector<SymbolicConfig>& escapes);
};

std::vector<SymbolicConfig> sym_post(const FifoMachine& m, const SymbolicConfig& s, int t);
std::vector<SymbolicConfig> sym_accelerate(const FifoMachine& m, const std::vector<SymbolicConfig>& S,
                                           const ElementaryLoop& l, int budget = kDefaultAccelerationBudget);
ReachMap reach_set(const FifoMachine& m, const Config& init, int budget = kDefaultAccelerationBudget);

bool decide_reachability(const FifoMachine& m, const Config& init, const Config& target,
                         int budget = kDefaultAccelerationBudget, ReachWitness* witness = nullptr);
bool decide_csr(const FifoMachine& m, const Config& init, int q, int budget = kDefaultAccelerationBudget);
bool decide_repeated_csr(const FifoMachine& m, const Config& init, int q, int budget = kDefaultAccelerationBudget);
bool decide_nontermination(const FifoMachine& m, const Config& init, int budget = kDefaultAccelerationBudget);
bool decide_unboundedness(const FifoMachine& m, const Config& init, int budget = kDefaultAccelerationBudget);
bool decide_letter_unbounded(const FifoMachine& m, const Config& init, int c, int a,
                             int budget = kDefaultAccelerationBudget);
bool decide_channel_unbounded(const FifoMachine& m, const Config& init, int c,
                              int budget = kDefaultAccelerationBudget);

// Same decisions on a precomputed reach map.
bool repeated_csr_on(SymbolicEngine& e, const FifoMachine& m, const ReachMap& r, int q);
bool letter_unbounded_on(const ReachMap& r, int c, Letter a);

}  // namespace flatfifo
