#include <algorithm>
#include <deque>
#include <map>
#include <set>

#include "counters_internal.hpp"
#include "flatfifo/counters.hpp"

namespace flatfifo {

using namespace detail;

namespace {

// Guards on a silent order move that keep the order machine behind the counting machine: some path from the
// move's target to the counting state must use exactly the positive counters of this channel. Loops without a
// send on the channel are never completed, so silent moves cannot cycle.
class SupportGuards {
 public:
  SupportGuards(const FifoMachine& m, const CounterTable& tab) : m_(m), tab_(tab) {}

  const Guard& get(int c, int t, int q0) {
    auto key = std::tuple(c, t, q0);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    return cache_[key] = compute(c, t, q0);
  }

 private:
  const FifoMachine& m_;
  const CounterTable& tab_;
  std::map<std::tuple<int, int, int>, Guard> cache_;
  std::map<std::pair<int, int>, std::vector<PathSchema>> schemas_;

  bool sends(int t, int c) const { return sends_on(m_, t, c); }

  Guard compute(int c, int t, int q0) {
    auto key = std::pair(m_.transitions[t].target, q0);
    if (!schemas_.count(key)) schemas_[key] = path_schemas(m_, key.first, key.second);
    std::set<std::vector<int>> supports;
    for (const auto& ps : schemas_[key]) {
      int r = (int)ps.loops.size();
      std::vector<int> choice(r, 0);
      while (true) {
        std::vector<int> path{t};
        for (int i = 0; i <= r; ++i) {
          path.insert(path.end(), ps.segments[i].begin(), ps.segments[i].end());
          if (i < r && choice[i]) path.insert(path.end(), ps.loops[i].body.begin(), ps.loops[i].body.end());
        }
        if (acceptable(path, c)) {
          std::vector<int> used;
          for (int e : path)
            if (sends(e, c)) used.push_back(tab_.of_transition[e]);
          std::sort(used.begin(), used.end());
          used.erase(std::unique(used.begin(), used.end()), used.end());
          supports.insert(used);
        }
        int i = 0;
        for (; i < r; ++i) {
          bool has_send = std::any_of(ps.loops[i].body.begin(), ps.loops[i].body.end(),
                                      [&](int e) { return sends(e, c); });
          if (has_send && choice[i] == 0) {
            choice[i] = 1;
            break;
          }
          choice[i] = 0;
        }
        if (i == r) break;
      }
    }
    std::vector<Guard> alts;
    for (const auto& used : supports) {
      std::vector<Guard> gs;
      for (size_t k = 0; k < tab_.names.size(); ++k) {
        if (!sends(tab_.transition[k], c)) continue;
        bool u = std::binary_search(used.begin(), used.end(), (int)k);
        gs.push_back(u ? Guard::pos((int)k) : Guard::zero((int)k));
      }
      alts.push_back(Guard::all(std::move(gs)));
    }
    return Guard::any(std::move(alts));
  }

  // Rejects paths that go once around a cycle without sending on c.
  bool acceptable(const std::vector<int>& path, int c) const {
    std::vector<int> st{m_.transitions[path[0]].source};
    for (int e : path) st.push_back(m_.transitions[e].target);
    for (size_t i = 0; i < st.size(); ++i)
      for (size_t j = i + 1; j < st.size(); ++j) {
        if (st[i] != st[j]) continue;
        bool has_send = false;
        for (size_t k = i; k < j; ++k) has_send = has_send || sends(path[k], c);
        if (!has_send) return false;
      }
    return true;
  }
};

std::string tuple_name(const SyncSystem& s, const std::vector<int>& tup) {
  std::string r = "(" + s.count.states[tup[0]];
  for (size_t c = 1; c < tup.size(); ++c) r += "," + s.orders[c - 1].states[tup[c]];
  return r + ")";
}

// Rendez-vous product over control states reachable in the graph. Guards that fold to false are dropped.
void build_product(SyncSystem& s, const SyncOptions& opt) {
  const auto& m = s.fifo;
  int p = (int)s.orders.size();
  SupportGuards support(m, s.table);
  std::map<std::vector<int>, int> ix;
  std::deque<int> work;
  auto intern = [&](const std::vector<int>& tup) {
    auto it = ix.find(tup);
    if (it != ix.end()) return it->second;
    if (s.tuples.size() >= opt.max_states) throw BudgetExceeded(s.tuples.size());
    int id = (int)s.tuples.size();
    ix[tup] = id;
    s.tuples.push_back(tup);
    s.product.states.push_back(tuple_name(s, tup));
    work.push_back(id);
    return id;
  };
  s.product.counters = s.table.names;
  std::vector<int> init{s.count.initial};
  for (const auto& o : s.orders) init.push_back(o.initial);
  s.product.initial = intern(init);

  while (!work.empty()) {
    int g = work.front();
    work.pop_front();
    auto tup = s.tuples[g];
    int q0 = tup[0];
    // silent order moves and the condition under which one of them is enabled
    std::vector<std::vector<std::pair<int, Guard>>> silent(p);
    std::vector<Guard> enabled(p, Guard::falsity());
    for (int c = 0; c < p; ++c) {
      if (s.modified) continue;
      std::vector<Guard> alts;
      for (int f : s.orders[c].out_edges(tup[c + 1])) {
        const auto& tr = s.orders[c].transitions[f];
        if (tr.psi >= 0) continue;
        Guard gd = Guard::all({tr.guard, support.get(c, tr.fifo, q0)});
        if (gd.is_false()) continue;
        silent[c].push_back({f, gd});
        alts.push_back(gd);
      }
      enabled[c] = Guard::any(std::move(alts));
    }
    auto none_before = [&](int upto) {
      std::vector<Guard> gs;
      for (int c = 0; c < upto; ++c) gs.push_back(enabled[c].negate());
      return Guard::all(std::move(gs));
    };
    Guard urgency = none_before(p);
    auto add = [&](CounterTransition t, std::vector<int> to, SyncSystem::Move mv) {
      if (t.guard.is_false()) return;
      t.source = g;
      t.target = intern(to);
      t.id += "@" + s.product.states[g];
      s.product.transitions.push_back(std::move(t));
      s.moves.push_back(mv);
    };
    for (int e : s.count.out_edges(q0)) {
      const auto& ct = s.count.transitions[e];
      auto to = tup;
      to[0] = ct.target;
      CounterTransition t = ct;
      if (ct.psi < 0) {
        t.guard = Guard::all({ct.guard, urgency});
        add(t, to, {});
        continue;
      }
      int c = m.transitions[s.table.transition[ct.psi]].action.channel;
      for (int f : s.orders[c].out_edges(tup[c + 1])) {
        const auto& ot = s.orders[c].transitions[f];
        if (ot.psi != ct.psi) continue;
        auto to2 = to;
        to2[c + 1] = ot.target;
        t.guard = Guard::all({ct.guard, ot.guard, urgency});
        add(t, to2, {c, ot.fifo, false});
      }
    }
    for (int c = 0; c < p; ++c)
      for (const auto& [f, gd] : silent[c]) {
        const auto& ot = s.orders[c].transitions[f];
        auto to = tup;
        to[c + 1] = ot.target;
        CounterTransition t{"tau:" + ot.id, 0, 0, Guard::all({gd, none_before(c)}), {}, -1, -1};
        add(t, to, {c, ot.fifo, true});
      }
  }
  s.product.index();
}

}  // namespace

SyncSystem build_sync(const FifoMachine& m, const SyncOptions& opt) {
  require_flat(m);
  SyncSystem s;
  s.fifo = m;
  s.table = counter_table(m);
  s.count = build_counting_abstraction(m);
  for (int c = 0; c < (int)m.channels.size(); ++c) {
    s.orders.push_back(build_order_machine(m, c, opt.scope));
    std::vector<std::vector<int>> mem;
    for (int q = 0; q < (int)m.states.size(); ++q) mem.push_back({q});
    s.members.push_back(mem);
  }
  build_product(s, opt);
  return s;
}

SyncSystem build_modified_sync(const FifoMachine& m, const SyncOptions& opt) {
  require_flat(m);
  SyncSystem s;
  s.fifo = m;
  s.modified = true;
  s.table = counter_table(m);
  s.count = build_counting_abstraction(m);
  for (int c = 0; c < (int)m.channels.size(); ++c) {
    std::vector<std::vector<int>> mem;
    s.orders.push_back(build_modified_order_machine(m, c, opt.scope, &mem, &s.renames));
    s.members.push_back(mem);
  }
  build_product(s, opt);
  return s;
}

}  // namespace flatfifo
