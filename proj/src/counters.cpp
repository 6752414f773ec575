#include "flatfifo/counters.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <set>

#include "counters_internal.hpp"

namespace flatfifo {

// ---------------------------------------------------------------- guards

Guard Guard::all(std::vector<Guard> gs) {
  Guard r{Kind::And, -1, {}};
  std::set<std::pair<int, int>> atoms;  // (counter, 0 zero / 1 pos)
  std::function<void(Guard&&)> add = [&](Guard&& g) {
    if (g.kind == Kind::True) return;
    if (g.kind == Kind::And) {
      for (auto& k : g.kids) add(std::move(k));
      return;
    }
    if (g.kind == Kind::Zero || g.kind == Kind::Pos) {
      int pol = g.kind == Kind::Pos;
      if (atoms.count({g.counter, 1 - pol})) r.kind = Kind::False;
      if (!atoms.insert({g.counter, pol}).second) return;
    }
    if (g.kind == Kind::False) r.kind = Kind::False;
    if (std::find(r.kids.begin(), r.kids.end(), g) == r.kids.end()) r.kids.push_back(std::move(g));
  };
  for (auto& g : gs) add(std::move(g));
  if (r.kind == Kind::False) return falsity();
  if (r.kids.empty()) return truth();
  if (r.kids.size() == 1) return r.kids[0];
  return r;
}

Guard Guard::any(std::vector<Guard> gs) {
  Guard r{Kind::Or, -1, {}};
  std::set<std::pair<int, int>> atoms;
  bool top = false;
  std::function<void(Guard&&)> add = [&](Guard&& g) {
    if (g.kind == Kind::False) return;
    if (g.kind == Kind::Or) {
      for (auto& k : g.kids) add(std::move(k));
      return;
    }
    if (g.kind == Kind::Zero || g.kind == Kind::Pos) {
      int pol = g.kind == Kind::Pos;
      if (atoms.count({g.counter, 1 - pol})) top = true;
      if (!atoms.insert({g.counter, pol}).second) return;
    }
    if (g.kind == Kind::True) top = true;
    if (std::find(r.kids.begin(), r.kids.end(), g) == r.kids.end()) r.kids.push_back(std::move(g));
  };
  for (auto& g : gs) add(std::move(g));
  if (top) return truth();
  if (r.kids.empty()) return falsity();
  if (r.kids.size() == 1) return r.kids[0];
  return r;
}

bool Guard::eval(const std::vector<Int>& nu) const {
  switch (kind) {
    case Kind::True: return true;
    case Kind::False: return false;
    case Kind::Zero: return nu[counter] == 0;
    case Kind::Pos: return nu[counter] > 0;
    case Kind::And:
      return std::all_of(kids.begin(), kids.end(), [&](const Guard& g) { return g.eval(nu); });
    case Kind::Or:
      return std::any_of(kids.begin(), kids.end(), [&](const Guard& g) { return g.eval(nu); });
  }
  return false;
}

Guard Guard::negate() const {
  std::vector<Guard> ks;
  for (const auto& k : kids) ks.push_back(k.negate());
  switch (kind) {
    case Kind::True: return falsity();
    case Kind::False: return truth();
    case Kind::Zero: return pos(counter);
    case Kind::Pos: return zero(counter);
    case Kind::And: return any(std::move(ks));
    case Kind::Or: return all(std::move(ks));
  }
  return truth();
}

Guard Guard::assume_zero(const std::vector<char>& z) const {
  std::vector<Guard> ks;
  for (const auto& k : kids) ks.push_back(k.assume_zero(z));
  switch (kind) {
    case Kind::Zero: return z[counter] ? truth() : *this;
    case Kind::Pos: return z[counter] ? falsity() : *this;
    case Kind::And: return all(std::move(ks));
    case Kind::Or: return any(std::move(ks));
    default: return *this;
  }
}

std::string guard_text(const Guard& g, const std::vector<std::string>& names) {
  using K = Guard::Kind;
  auto same_atoms = [&](K atom) {
    return std::all_of(g.kids.begin(), g.kids.end(), [&](const Guard& k) { return k.kind == atom; });
  };
  auto sum = [&]() {
    std::string s;
    for (size_t i = 0; i < g.kids.size(); ++i) s += (i ? "+" : "") + names[g.kids[i].counter];
    return s;
  };
  switch (g.kind) {
    case K::True: return "true";
    case K::False: return "false";
    case K::Zero: return names[g.counter] + "=0";
    case K::Pos: return names[g.counter] + ">0";
    case K::And:
      if (same_atoms(K::Zero)) return sum() + "=0";
      break;
    case K::Or:
      if (same_atoms(K::Pos)) return sum() + ">0";
      break;
  }
  std::string sep = g.kind == K::And ? " && " : " || ";
  std::string s;
  for (size_t i = 0; i < g.kids.size(); ++i) {
    const auto& k = g.kids[i];
    bool paren = (k.kind == K::And || k.kind == K::Or) && k.kind != g.kind;
    s += (i ? sep : "") + (paren ? "(" + guard_text(k, names) + ")" : guard_text(k, names));
  }
  return s;
}

// ---------------------------------------------------------------- counter machines

void CounterMachine::index() {
  out_.assign(states.size(), {});
  for (size_t i = 0; i < transitions.size(); ++i) out_[transitions[i].source].push_back((int)i);
}

int CounterMachine::state_index(const std::string& name) const {
  for (size_t i = 0; i < states.size(); ++i)
    if (states[i] == name) return (int)i;
  throw ValidationError("unknown counter machine state " + name);
}

std::optional<CounterConfig> counter_step(const CounterMachine& cm, const CounterConfig& c, int t) {
  if (t < 0 || t >= (int)cm.transitions.size()) return std::nullopt;
  const auto& tr = cm.transitions[t];
  if (tr.source != c.state || !tr.guard.eval(c.nu)) return std::nullopt;
  CounterConfig n{tr.target, c.nu};
  for (auto [k, d] : tr.update) {
    n.nu[k] += d;
    if (n.nu[k] < 0) return std::nullopt;
  }
  return n;
}

CounterConfig counter_initial(const CounterMachine& cm) {
  return {cm.initial, std::vector<Int>(cm.counters.size(), 0)};
}

bool counter_flat(const CounterMachine& cm) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& t : cm.transitions) edges.push_back({t.source, t.target});
  return flatness_of((int)cm.states.size(), edges).flat;
}

// ---------------------------------------------------------------- structure helpers

namespace detail {

void require_flat(const FifoMachine& m) {
  auto f = is_flat(m);
  if (!f.flat) throw NotFlat(f.vertex);
}

std::vector<int> bfs_distance(const FifoMachine& m) {
  std::vector<int> d(m.states.size(), 1 << 29);
  std::deque<int> q{m.initial};
  d[m.initial] = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int e : m.out_edges(u)) {
      int v = m.transitions[e].target;
      if (d[v] > d[u] + 1) {
        d[v] = d[u] + 1;
        q.push_back(v);
      }
    }
  }
  return d;
}

std::vector<ElementaryLoop> all_loops(const FifoMachine& m) {
  auto dist = bfs_distance(m);
  std::vector<ElementaryLoop> out;
  std::set<std::vector<int>> seen;
  for (int q = 0; q < (int)m.states.size(); ++q) {
    auto l = loop_of(m, q);
    if (!l) continue;
    auto key = l->body;
    std::sort(key.begin(), key.end());
    if (!seen.insert(key).second) continue;
    int best = q;
    for (int e : l->body) {
      int s = m.transitions[e].source;
      if (std::pair(dist[s], s) < std::pair(dist[best], best)) best = s;
    }
    out.push_back(rotate_loop(m, *l, best));
  }
  return out;
}

std::vector<std::vector<char>> reachability(const FifoMachine& m) {
  int n = (int)m.states.size();
  std::vector<std::vector<char>> r(n, std::vector<char>(n, 0));
  for (int s = 0; s < n; ++s) {
    std::deque<int> q{s};
    r[s][s] = 1;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int e : m.out_edges(u)) {
        int v = m.transitions[e].target;
        if (!r[s][v]) {
          r[s][v] = 1;
          q.push_back(v);
        }
      }
    }
  }
  return r;
}

bool sends_on(const FifoMachine& m, int t, int c) {
  const auto& a = m.transitions[t].action;
  return a.kind == ActionKind::Send && (c < 0 || a.channel == c);
}

std::vector<int> loop_counters(const FifoMachine& m, const CounterTable& tab, const ElementaryLoop& l, int c,
                               GuardScope scope) {
  std::vector<int> ks;
  for (int t : l.body)
    if (sends_on(m, t, scope == GuardScope::Channel ? c : -1)) ks.push_back(tab.of_transition[t]);
  std::sort(ks.begin(), ks.end());
  return ks;
}

Guard sum_zero(const std::vector<int>& ks) {
  std::vector<Guard> gs;
  for (int k : ks) gs.push_back(Guard::zero(k));
  return Guard::all(std::move(gs));
}

}  // namespace detail

using namespace detail;

CounterTable counter_table(const FifoMachine& m) {
  CounterTable tab;
  tab.of_transition.assign(m.transitions.size(), -1);
  for (size_t t = 0; t < m.transitions.size(); ++t) {
    const auto& tr = m.transitions[t];
    if (tr.action.kind != ActionKind::Send) continue;
    tab.of_transition[t] = (int)tab.names.size();
    tab.names.push_back("(" + m.letters[tr.action.letter] + "," + tr.id + ")");
    tab.transition.push_back((int)t);
  }
  return tab;
}

CounterMachine build_counting_abstraction(const FifoMachine& m) {
  auto tab = counter_table(m);
  CounterMachine cm;
  cm.states = m.states;
  cm.counters = tab.names;
  cm.initial = m.initial;
  for (size_t t = 0; t < m.transitions.size(); ++t) {
    const auto& tr = m.transitions[t];
    CounterTransition ct{tr.id, tr.source, tr.target, Guard::truth(), {}, -1, (int)t};
    if (tr.action.kind == ActionKind::Send) {
      ct.update = {{tab.of_transition[t], 1}};
      cm.transitions.push_back(ct);
    } else if (tr.action.kind == ActionKind::Internal) {
      cm.transitions.push_back(ct);
    } else {
      for (size_t k = 0; k < tab.names.size(); ++k) {
        const auto& s = m.transitions[tab.transition[k]].action;
        if (s.channel != tr.action.channel || s.letter != tr.action.letter) continue;
        CounterTransition d = ct;
        d.id = tr.id + "[" + tab.names[k] + "]";
        d.guard = Guard::pos((int)k);
        d.update = {{(int)k, -1}};
        d.psi = (int)k;
        cm.transitions.push_back(d);
      }
    }
  }
  cm.index();
  return cm;
}

CounterMachine build_order_machine(const FifoMachine& m, int c, GuardScope scope) {
  require_flat(m);
  auto tab = counter_table(m);
  auto loops = all_loops(m);
  CounterMachine om;
  om.states = m.states;
  om.counters = tab.names;
  om.initial = m.initial;
  for (size_t t = 0; t < m.transitions.size(); ++t) {
    const auto& tr = m.transitions[t];
    CounterTransition ct{tr.id, tr.source, tr.target, Guard::truth(), {}, -1, (int)t};
    if (sends_on(m, (int)t, c)) ct.psi = tab.of_transition[t];
    // every edge leaving a loop waits until the letters of that loop are gone
    std::vector<Guard> gs;
    for (const auto& l : loops) {
      bool in = std::find(l.body.begin(), l.body.end(), (int)t) != l.body.end();
      bool from = std::any_of(l.body.begin(), l.body.end(),
                              [&](int e) { return m.transitions[e].source == tr.source; });
      if (!in && from) gs.push_back(sum_zero(loop_counters(m, tab, l, c, scope)));
    }
    ct.guard = Guard::all(std::move(gs));
    om.transitions.push_back(ct);
  }
  om.index();
  return om;
}

CounterMachine build_modified_order_machine(const FifoMachine& m, int c, GuardScope scope,
                                            std::vector<std::vector<int>>* members,
                                            std::vector<std::pair<std::string, std::string>>* renames) {
  require_flat(m);
  auto tab = counter_table(m);
  int n = (int)m.states.size();
  auto reach = reachability(m);

  // A state whose only move is an unguarded silent edge behaves like the edge's target, so it is merged into it.
  // Every other silent edge is removed by closure: a class takes the sends reachable over silent paths, guarded
  // by the exit guards along the path.
  auto plain = build_order_machine(m, c, scope);
  std::vector<int> lab(n);
  std::iota(lab.begin(), lab.end(), 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (int q = 0; q < n; ++q) {
      const auto& out = m.out_edges(q);
      if (out.size() != 1 || sends_on(m, out[0], c) || !plain.transitions[out[0]].guard.is_true()) continue;
      int a = lab[q], b = lab[m.transitions[out[0]].target];
      if (a == b) continue;
      if (renames) renames->push_back({m.states[a], m.states[b]});
      for (int& x : lab)
        if (x == a) x = b;
      changed = true;
    }
  }

  std::vector<int> cls(n, -1);
  CounterMachine om;
  om.counters = tab.names;
  std::vector<std::vector<int>> mem;
  for (int q = 0; q < n; ++q) {
    int r = lab[q];
    if (cls[r] < 0) {
      cls[r] = (int)om.states.size();
      om.states.push_back(m.states[r]);
      mem.push_back({});
    }
    mem[cls[r]].push_back(q);
  }
  auto class_of = [&](int q) { return cls[lab[q]]; };
  om.initial = class_of(m.initial);
  int k = (int)om.states.size();

  // guards of the silent paths from each class to each state, one alternative per simple path
  std::vector<std::vector<std::vector<Guard>>> via(k, std::vector<std::vector<Guard>>(n));
  for (int x = 0; x < k; ++x) {
    std::vector<char> on(n, 0);
    std::vector<Guard> path;
    std::function<void(int)> go = [&](int q) {
      via[x][q].push_back(Guard::all(path));
      on[q] = 1;
      for (int t : m.out_edges(q)) {
        const auto& tr = m.transitions[t];
        if (sends_on(m, t, c) || on[tr.target]) continue;
        path.push_back(plain.transitions[t].guard);
        go(tr.target);
        path.pop_back();
      }
      on[q] = 0;
    };
    // members other than the representative only lead to it
    go(lab[mem[x][0]]);
  }
  for (size_t t = 0; t < m.transitions.size(); ++t) {
    if (!sends_on(m, (int)t, c)) continue;
    const auto& tr = m.transitions[t];
    // t heads the channel only if every other pending letter is sent after it
    std::vector<Guard> gs;
    for (size_t u = 0; u < m.transitions.size(); ++u)
      if (u != t && sends_on(m, (int)u, c) && !reach[tr.target][m.transitions[u].source])
        gs.push_back(Guard::zero(tab.of_transition[u]));
    Guard later = Guard::all(std::move(gs));
    for (int x = 0; x < k; ++x) {
      if (via[x][tr.source].empty()) continue;
      Guard g = Guard::all({Guard::any(via[x][tr.source]), plain.transitions[t].guard, later});
      if (g.is_false()) continue;
      om.transitions.push_back({tr.id, x, class_of(tr.target), g, {}, tab.of_transition[t], (int)t});
    }
  }
  om.index();
  if (members) *members = mem;
  return om;
}

}  // namespace flatfifo
