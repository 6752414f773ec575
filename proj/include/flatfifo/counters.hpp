#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "flatfifo/model.hpp"

namespace flatfifo {

using Int = long long;

// Positive Boolean combination of C=0 and C>0 atoms.
struct Guard {
  enum class Kind { True, False, Zero, Pos, And, Or };
  Kind kind = Kind::True;
  int counter = -1;
  std::vector<Guard> kids;

  static Guard truth() { return {}; }
  static Guard falsity() { return {Kind::False, -1, {}}; }
  static Guard zero(int c) { return {Kind::Zero, c, {}}; }
  static Guard pos(int c) { return {Kind::Pos, c, {}}; }
  static Guard all(std::vector<Guard> gs);  // folds constants and flattens
  static Guard any(std::vector<Guard> gs);

  bool is_true() const { return kind == Kind::True; }
  bool is_false() const { return kind == Kind::False; }
  bool eval(const std::vector<Int>& nu) const;
  Guard negate() const;  // stays positive since counters are naturals
  // Folds the guard under the assumption that the flagged counters are zero.
  Guard assume_zero(const std::vector<char>& zero) const;
  bool operator==(const Guard&) const = default;
};

std::string guard_text(const Guard& g, const std::vector<std::string>& counters);

struct CounterTransition {
  std::string id;
  int source = 0;
  int target = 0;
  Guard guard;
  std::vector<std::pair<int, int>> update;  // (counter, +1 or -1)
  int psi = -1;   // rendez-vous label: a counter (a,t), or -1 for tau
  int fifo = -1;  // T: FIFO transition index, or -1 when silent
  bool operator==(const CounterTransition&) const = default;
};

// Labeled counter machine; psi and T are carried by the transitions.
struct CounterMachine {
  std::vector<std::string> states;
  std::vector<std::string> counters;
  std::vector<CounterTransition> transitions;
  int initial = 0;

  void index();
  const std::vector<int>& out_edges(int q) const { return out_[q]; }
  int state_index(const std::string& name) const;
  bool operator==(const CounterMachine& o) const {
    return states == o.states && counters == o.counters && transitions == o.transitions && initial == o.initial;
  }

 private:
  std::vector<std::vector<int>> out_;
};

struct CounterConfig {
  int state = 0;
  std::vector<Int> nu;
  auto operator<=>(const CounterConfig&) const = default;
  bool operator==(const CounterConfig&) const = default;
};
using SyncConfig = CounterConfig;

std::optional<CounterConfig> counter_step(const CounterMachine& cm, const CounterConfig& c, int t);
CounterConfig counter_initial(const CounterMachine& cm);
bool counter_flat(const CounterMachine& cm);

// Which counters enter the after-loop zero-sum guard.
enum class GuardScope {
  Channel,     // sends of the loop on the order machine's own channel
  AllLetters,  // every send of the loop, whatever its channel
};

struct SyncOptions {
  GuardScope scope = GuardScope::Channel;
  std::size_t max_states = 50000;
};

// One counter per send transition t of letter a, named (a,t).
struct CounterTable {
  std::vector<std::string> names;
  std::vector<int> transition;        // counter -> FIFO send transition
  std::vector<int> of_transition;     // FIFO transition -> counter or -1
};
CounterTable counter_table(const FifoMachine& m);

CounterMachine build_counting_abstraction(const FifoMachine& m);
CounterMachine build_order_machine(const FifoMachine& m, int c, GuardScope scope = GuardScope::Channel);

struct SyncSystem {
  FifoMachine fifo;
  bool modified = false;
  CounterTable table;
  CounterMachine count;
  std::vector<CounterMachine> orders;
  std::vector<std::vector<std::vector<int>>> members;  // [channel][order state] -> FIFO states
  std::vector<std::pair<std::string, std::string>> renames;  // merged state -> kept name
  CounterMachine product;                              // global states, T on transitions
  std::vector<std::vector<int>> tuples;                // global state -> (count, order_1..order_p)
  struct Move {
    int channel = -1;           // order machine taking part, -1 when the counting machine moves alone
    int order_transition = -1;  // FIFO transition of that order edge
    bool silent = false;        // order machine moves alone
  };
  std::vector<Move> moves;  // per product transition
};

SyncSystem build_sync(const FifoMachine& m, const SyncOptions& opt = {});
// Silent-free order machines: states whose only move is an unguarded silent edge are merged into its target,
// the remaining silent edges are closed over.
CounterMachine build_modified_order_machine(const FifoMachine& m, int c, GuardScope scope,
                                            std::vector<std::vector<int>>* members = nullptr,
                                            std::vector<std::pair<std::string, std::string>>* renames = nullptr);
SyncSystem build_modified_sync(const FifoMachine& m, const SyncOptions& opt = {});

// Maps a sync configuration to the FIFO configuration it stands for; caches path schemas.
class Correspondence {
 public:
  explicit Correspondence(const SyncSystem& sys) : sys_(sys) {}
  std::optional<Config> operator()(const SyncConfig& sc);
  // Transition sequence v_c from the order state of channel c to the counting state.
  std::optional<std::vector<int>> path(const SyncConfig& sc, int c);

 private:
  const SyncSystem& sys_;
  std::map<std::pair<int, int>, std::vector<PathSchema>> schemas_;
  const std::vector<PathSchema>& schemas(int from, int to);
};

std::optional<Config> correspondence_h(const SyncSystem& sys, const SyncConfig& sc);

struct BisimReport {
  bool ok = true;
  std::string message;
  std::optional<SyncConfig> sync;
  std::optional<Config> fifo;
  std::size_t pairs = 0;
};

BisimReport check_weak_bisim(const FifoMachine& m, const SyncSystem& sys, int depth);
BisimReport check_bisim(const FifoMachine& m, const SyncSystem& sys, int depth);

struct FlatteningMap {
  CounterMachine flat;
  std::vector<int> f;          // flat state -> product state
  std::vector<int> edge_map;   // flat transition -> product transition
  std::vector<std::vector<int>> levels;  // flat state -> FIFO position of each order machine
};

constexpr std::size_t kDefaultFlattenBudget = 50000;
FlatteningMap trace_flatten(const SyncSystem& sys, const SyncConfig& init,
                            std::size_t budget = kDefaultFlattenBudget);
// Every flat transition maps to a product transition with the same endpoints, guard and update.
bool is_flattening(const SyncSystem& sys, const FlatteningMap& fm);
// Runs (as product transition sequences) of length <= depth from the initial configuration.
std::vector<std::vector<int>> counter_traces(const CounterMachine& cm, const CounterConfig& init, int depth,
                                             const std::vector<int>* relabel = nullptr);

nlohmann::json counter_machine_to_json(const CounterMachine& cm);
CounterMachine counter_machine_from_json(const nlohmann::json& j);
nlohmann::json sync_to_json(const SyncSystem& sys);
std::string export_counter_machine(const CounterMachine& cm, const std::string& format);
std::string export_counter_system(const SyncSystem& sys, const std::string& format);
std::string export_flattening(const FlatteningMap& fm, const std::string& format);

}  // namespace flatfifo
