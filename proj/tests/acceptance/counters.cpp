#include <algorithm>
#include <random>
#include <set>

#include "acceptance.hpp"
#include "fixtures.hpp"
#include "flatfifo/counters.hpp"

using namespace flatfifo;

namespace acceptance {

namespace {

// Steps (configuration, edge) taken within depth steps from the initial configuration.
std::set<std::pair<CounterConfig, int>> behaviour(const CounterMachine& cm, int depth) {
  std::set<std::pair<CounterConfig, int>> out;
  std::set<CounterConfig> seen;
  std::vector<CounterConfig> layer{counter_initial(cm)};
  for (int d = 0; d < depth; ++d) {
    std::vector<CounterConfig> next;
    for (const auto& c : layer)
      for (int t : cm.out_edges(c.state))
        if (auto n = counter_step(cm, c, t)) {
          out.insert({c, t});
          if (seen.insert(*n).second) next.push_back(*n);
        }
    layer = std::move(next);
  }
  return out;
}

// Replays product runs of at most depth steps on the FIFO machine. A fault is a label the FIFO machine
// cannot fire, or a FIFO transition enabled at the replayed config that the product cannot fire after
// silent moves. Both rule out weak bisimilarity without using the correspondence.
bool visible_fault(const FifoMachine& m, const CounterMachine& cm, int depth) {
  using Pair = std::pair<CounterConfig, Config>;
  auto ready = [&](const CounterConfig& start) {
    std::set<int> labels;
    std::set<CounterConfig> seen{start};
    std::vector<CounterConfig> todo{start};
    while (!todo.empty()) {
      auto c = todo.back();
      todo.pop_back();
      for (int t : cm.out_edges(c.state))
        if (auto n = counter_step(cm, c, t)) {
          if (cm.transitions[t].fifo >= 0)
            labels.insert(cm.transitions[t].fifo);
          else if (seen.insert(*n).second)
            todo.push_back(*n);
        }
    }
    return labels;
  };
  std::set<Pair> seen{{counter_initial(cm), m.initial_config()}};
  std::vector<Pair> layer(seen.begin(), seen.end());
  for (int d = 0; d <= depth && !layer.empty(); ++d) {
    std::vector<Pair> next;
    for (const auto& [pc, fc] : layer) {
      auto r = ready(pc);
      for (int u = 0; u < (int)m.transitions.size(); ++u)
        if (!step(m, fc, u, Semantics::Perfect).empty() && !r.count(u)) return true;
      if (d == depth) continue;
      for (int t : cm.out_edges(pc.state)) {
        auto n = counter_step(cm, pc, t);
        if (!n) continue;
        Config f = fc;
        if (int u = cm.transitions[t].fifo; u >= 0) {
          auto s = step(m, fc, u, Semantics::Perfect);
          if (s.empty()) return true;
          f = s.front();
        }
        if (seen.insert({*n, f}).second) next.push_back({*n, f});
      }
    }
    layer = std::move(next);
  }
  return false;
}

bool same_effect(const FifoMachine& m, int a, int b) {
  const auto& x = m.transitions[a];
  const auto& y = m.transitions[b];
  return x.source == y.source && x.target == y.target && x.action == y.action;
}

int counter_of(const CounterMachine& cm, const std::string& name) {
  for (int i = 0; i < (int)cm.counters.size(); ++i)
    if (cm.counters[i] == name) return i;
  return -1;
}

}  // namespace

Outcome counter_compilation() {
  auto m = fixtures::load("two_loops");
  auto s = build_sync(m);
  Detail d;
  bool pass = true;

  std::vector<std::pair<std::string, std::string>> files = {
      {"two_loops_count.fast", export_counter_machine(s.count, "fast")},
      {"two_loops_order.fast", export_counter_machine(s.orders[0], "fast")},
      {"two_loops_sync.fast", export_counter_system(s, "fast")},
      {"two_loops_sync.json", export_counter_system(s, "json")},
  };
  int golden = 0;
  for (const auto& [name, text] : files) golden += fixtures::read_file(fixtures::path("golden/" + name)) == text;
  d("golden", std::to_string(golden) + "/" + std::to_string(files.size()));
  pass = pass && golden == (int)files.size();

  // t4 retrieves a: one guarded decrement per send of a
  int t4 = m.transition_index("t4");
  std::set<std::string> decrements;
  for (const auto& t : s.count.transitions)
    if (t.fifo == t4 && t.update.size() == 1 && t.update[0].second == -1 && t.guard == Guard::pos(t.update[0].first))
      decrements.insert(s.count.counters[t.update[0].first]);
  bool two = decrements == std::set<std::string>{"(a,t1)", "(a,t3)"};
  d("t4_decrements", decrements.size());
  pass = pass && two;

  // leaving the first loop needs its counters at zero
  int t5 = m.transition_index("t5");
  Guard want = Guard::all({Guard::zero(counter_of(s.orders[0], "(a,t1)")), Guard::zero(counter_of(s.orders[0], "(b,t2)"))});
  bool zero_sum = false;
  for (const auto& t : s.orders[0].transitions)
    if (t.fifo == t5) zero_sum = t.guard == want && guard_text(t.guard, s.orders[0].counters) == "(a,t1)+(b,t2)=0";
  d("t5_guard", zero_sum ? "(a,t1)+(b,t2)=0" : "missing");
  pass = pass && zero_sum;

  // nu = (2,3,1) with the counting machine in q3 and the order machine in q2
  SyncConfig sc{s.product.state_index("(q3,q2)"), std::vector<Int>(s.product.counters.size(), 0)};
  sc.nu[counter_of(s.product, "(a,t1)")] = 2;
  sc.nu[counter_of(s.product, "(b,t2)")] = 3;
  sc.nu[counter_of(s.product, "(a,t3)")] = 1;
  auto c = correspondence_h(s, sc);
  std::string word = c ? word_text(m, c->contents[0]) : "none";
  d("h_c", word);
  pass = pass && word == "b" + std::string("abab") + "a";
  return {pass, d.str()};
}

Outcome bisimulation() {
  Stopwatch sw;
  auto machines = corpus(220);
  for (auto& f : reference_machines()) machines.push_back(std::move(f));
  int weak_ok = 0, strict_ok = 0, unmutated_faults = 0;
  std::string first_bad;
  for (const auto& [name, m] : machines) {
    auto s = build_sync(m);
    unmutated_faults += visible_fault(m, s.product, 12);
    auto r = check_weak_bisim(m, s, 12);
    weak_ok += r.ok;
    auto q = check_bisim(m, build_modified_sync(m), 12);
    strict_ok += q.ok;
    if ((!r.ok || !q.ok) && first_bad.empty()) first_bad = name + ": " + (r.ok ? q.message : r.message);
  }

  // ten relabelled edges and ten dropped guards, each fired within the depth
  std::mt19937 rng(24);
  int relabel = 0, relabel_caught = 0, unguard = 0, unguard_caught = 0;
  for (size_t i = 0; i < machines.size() && (relabel < 10 || unguard < 10); ++i) {
    const auto& m = machines[i].machine;
    auto s = build_sync(m);
    std::set<int> fired;
    auto base = behaviour(s.product, 12);
    for (const auto& [c, t] : base) fired.insert(t);
    std::vector<int> labelled, guarded;
    for (int t : fired) {
      const auto& e = s.product.transitions[t];
      if (e.fifo >= 0) labelled.push_back(t);
      if (!e.guard.is_true() && e.fifo < 0) guarded.push_back(t);
    }
    if (relabel < 10 && !labelled.empty()) {
      auto mut = s;
      auto& e = mut.product.transitions[labelled[rng() % labelled.size()]];
      std::vector<int> other;
      for (int u = 0; u < (int)m.transitions.size(); ++u)
        if (!same_effect(m, u, e.fifo)) other.push_back(u);
      if (!other.empty()) e.fifo = other[rng() % other.size()];
      if (!other.empty() && visible_fault(m, mut.product, 12)) {
        ++relabel;
        relabel_caught += !check_weak_bisim(m, mut, 12).ok;
      }
    }
    std::shuffle(guarded.begin(), guarded.end(), rng);
    for (int g : guarded) {
      if (unguard == 10) break;
      auto mut = s;
      mut.product.transitions[g].guard = Guard::truth();
      // extra silent interleavings or guards implied by the reachable configurations give equivalent systems
      if (visible_fault(m, mut.product, 12)) {
        ++unguard;
        unguard_caught += !check_weak_bisim(m, mut, 12).ok;
      }
    }
  }
  double t = sw.seconds();
  Detail d;
  int n = (int)machines.size();
  d("weak", std::to_string(weak_ok) + "/" + std::to_string(n))("strict", std::to_string(strict_ok) + "/" +
                                                                            std::to_string(n))(
      "wrong_label_caught", std::to_string(relabel_caught) + "/" + std::to_string(relabel))(
      "dropped_guard_caught", std::to_string(unguard_caught) + "/" + std::to_string(unguard))(
      "unmutated_faults", unmutated_faults)("limit_s", 300);
  if (!first_bad.empty()) d("first_failure", first_bad);
  bool pass = weak_ok == n && strict_ok == n && unmutated_faults == 0 && relabel + unguard == 20 && relabel_caught == relabel &&
              unguard_caught == unguard && t < 300;
  return {pass, d.str()};
}

Outcome trace_flattening() {
  auto machines = corpus(220);
  for (auto& f : reference_machines()) machines.push_back(std::move(f));
  int checked = 0, equal = 0, not_flattening = 0, budget = 0, flat_results = 0;
  std::string first_bad;
  for (const auto& [name, m] : machines) {
    if (loop_count(m) > 2) continue;
    auto s = build_sync(m);
    auto init = counter_initial(s.product);
    FlatteningMap fm;
    try {
      fm = trace_flatten(s, init);
    } catch (const BudgetExceeded&) {
      ++budget;
      continue;
    }
    ++checked;
    not_flattening += !is_flattening(s, fm);
    flat_results += counter_flat(fm.flat);
    // runs of the flattening mapped through edge_map are exactly the runs of the product
    bool same = counter_traces(s.product, init, 10, nullptr) ==
                counter_traces(fm.flat, counter_initial(fm.flat), 10, &fm.edge_map);
    equal += same;
    if (!same && first_bad.empty()) first_bad = name;
  }
  Detail d;
  d("machines", checked)("traces_equal", equal)("not_flattening", not_flattening)("flat", flat_results)("budget",
                                                                                                      budget);
  if (!first_bad.empty()) d("first_mismatch", first_bad);
  return {checked > 0 && equal == checked && not_flattening == 0 && budget == 0, d.str()};
}

}  // namespace acceptance
