#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <set>

#include "counters_internal.hpp"
#include "flatfifo/counters.hpp"

namespace flatfifo {

using namespace detail;

// ---------------------------------------------------------------- correspondence

const std::vector<PathSchema>& Correspondence::schemas(int from, int to) {
  auto key = std::pair(from, to);
  auto it = schemas_.find(key);
  if (it != schemas_.end()) return it->second;
  return schemas_[key] = path_schemas(sys_.fifo, from, to);
}

std::optional<std::vector<int>> Correspondence::path(const SyncConfig& sc, int c) {
  const auto& m = sys_.fifo;
  const auto& tab = sys_.table;
  const auto& tup = sys_.tuples[sc.state];
  int q0 = tup[0];
  auto on_c = [&](int t) { return sends_on(m, t, c); };
  for (int from : sys_.members[c][tup[c + 1]])
    for (const auto& ps : schemas(from, q0)) {
      std::map<int, Int> seg_occ;
      for (const auto& seg : ps.segments)
        for (int t : seg) ++seg_occ[t];
      std::vector<Int> k(ps.loops.size(), 0);
      bool ok = true;
      for (size_t i = 0; i < ps.loops.size() && ok; ++i) {
        std::optional<Int> ki;
        for (int t : ps.loops[i].body) {
          if (!on_c(t)) continue;
          Int need = sc.nu[tab.of_transition[t]] - seg_occ[t];
          if (need < 0 || (ki && *ki != need)) ok = false;
          ki = need;
        }
        k[i] = ki.value_or(0);
      }
      if (!ok) continue;
      std::vector<int> run;
      for (size_t i = 0; i <= ps.loops.size(); ++i) {
        run.insert(run.end(), ps.segments[i].begin(), ps.segments[i].end());
        if (i < ps.loops.size())
          for (Int j = 0; j < k[i]; ++j) run.insert(run.end(), ps.loops[i].body.begin(), ps.loops[i].body.end());
      }
      std::vector<Int> parikh(tab.names.size(), 0);
      for (int t : run)
        if (on_c(t)) ++parikh[tab.of_transition[t]];
      for (size_t x = 0; x < tab.names.size() && ok; ++x)
        if (sends_on(m, tab.transition[x], c) && parikh[x] != sc.nu[x]) ok = false;
      if (ok) return run;
    }
  return std::nullopt;
}

std::optional<Config> Correspondence::operator()(const SyncConfig& sc) {
  const auto& m = sys_.fifo;
  Config r{sys_.tuples[sc.state][0], {}};
  for (int c = 0; c < (int)m.channels.size(); ++c) {
    auto run = path(sc, c);
    if (!run) return std::nullopt;
    Word w;
    for (int t : *run)
      if (sends_on(m, t, c)) w.push_back((Letter)m.transitions[t].action.letter);
    r.contents.push_back(w);
  }
  return r;
}

std::optional<Config> correspondence_h(const SyncSystem& sys, const SyncConfig& sc) {
  Correspondence h(sys);
  return h(sc);
}

// ---------------------------------------------------------------- bisimulation

namespace {

BisimReport check(const FifoMachine& m, const SyncSystem& sys, int depth, bool strict) {
  const auto& P = sys.product;
  Correspondence corr(sys);
  std::map<SyncConfig, std::optional<Config>> hcache;
  auto H = [&](const SyncConfig& sc) -> const std::optional<Config>& {
    auto it = hcache.find(sc);
    if (it != hcache.end()) return it->second;
    return hcache[sc] = corr(sc);
  };
  auto succ = [&](const SyncConfig& sc) {
    std::vector<std::pair<int, SyncConfig>> out;
    for (int t : P.out_edges(sc.state))
      if (auto n = counter_step(P, sc, t)) out.push_back({t, *n});
    return out;
  };
  auto closure = [&](const SyncConfig& sc) {
    std::vector<SyncConfig> out{sc};
    std::set<SyncConfig> seen{sc};
    for (size_t i = 0; i < out.size() && !strict; ++i)
      for (auto& [t, n] : succ(out[i]))
        if (P.transitions[t].fifo < 0 && seen.insert(n).second) out.push_back(n);
    return out;
  };

  BisimReport rep;
  auto fail = [&](const SyncConfig& sc, const std::string& msg) {
    rep.ok = false;
    rep.sync = sc;
    rep.fifo = H(sc);
    rep.message = msg + " at " + P.states[sc.state];
    return rep;
  };
  auto tid = [&](int t) { return m.transitions[t].id; };

  SyncConfig init = counter_initial(P);
  std::deque<std::pair<SyncConfig, int>> work{{init, 0}};
  std::set<SyncConfig> seen{init};
  while (!work.empty()) {
    auto [sc, d] = work.front();
    work.pop_front();
    ++rep.pairs;
    auto h = H(sc);
    if (!h) return fail(sc, "no corresponding FIFO configuration");
    for (auto& [t, n] : succ(sc)) {
      const auto& hn = H(n);
      const auto& tr = P.transitions[t];
      if (!hn) return fail(sc, "move " + tr.id + " leads outside the correspondence");
      if (tr.fifo < 0) {
        if (strict) return fail(sc, "silent move " + tr.id);
        if (*hn != *h) return fail(sc, "silent move " + tr.id + " changes the FIFO configuration");
      } else {
        auto fs = step(m, *h, tr.fifo, Semantics::Perfect);
        if (std::find(fs.begin(), fs.end(), *hn) == fs.end())
          return fail(sc, "move " + tr.id + " has no FIFO counterpart " + tid(tr.fifo));
      }
      if (d < depth && seen.insert(n).second) work.push_back({n, d + 1});
    }
    if (d >= depth) continue;
    auto cl = closure(sc);
    for (int t = 0; t < (int)m.transitions.size(); ++t)
      for (const auto& c2 : step(m, *h, t, Semantics::Perfect)) {
        bool matched = false;
        for (const auto& s1 : cl) {
          for (auto& [u, n] : succ(s1))
            if (P.transitions[u].fifo == t && H(n) == c2) matched = true;
          if (matched) break;
        }
        if (!matched) return fail(sc, "FIFO move " + tid(t) + " to " + render_config(m, c2) + " is not matched");
      }
  }
  return rep;
}

}  // namespace

BisimReport check_weak_bisim(const FifoMachine& m, const SyncSystem& sys, int depth) {
  return check(m, sys, depth, false);
}

BisimReport check_bisim(const FifoMachine& m, const SyncSystem& sys, int depth) {
  return check(m, sys, depth, true);
}

// ---------------------------------------------------------------- trace flattening

namespace {

// Position of each order machine in the FIFO graph: its state, or the target of its last edge when states are
// merged classes.
std::vector<int> initial_levels(const SyncSystem& sys) {
  std::vector<int> lv;
  for (size_t c = 0; c < sys.orders.size(); ++c)
    lv.push_back(sys.modified ? sys.fifo.initial : sys.members[c][sys.tuples[sys.product.initial][c + 1]][0]);
  return lv;
}

}  // namespace

// Unfolds the product by the position of every component. A counter (a,t) can be positive only while t lies
// between its order machine and the counting machine; guards that need it otherwise are dropped, which prunes
// the parts of the product that a component has left for good.
FlatteningMap trace_flatten(const SyncSystem& sys, const SyncConfig& init, std::size_t budget) {
  const auto& m = sys.fifo;
  const auto& P = sys.product;
  auto reach = reachability(m);
  FlatteningMap fm;
  fm.flat.counters = P.counters;
  std::map<std::pair<int, std::vector<int>>, int> ix;
  std::deque<int> work;
  auto intern = [&](int g, const std::vector<int>& lv) {
    auto key = std::pair(g, lv);
    auto it = ix.find(key);
    if (it != ix.end()) return it->second;
    if (fm.f.size() >= budget) throw BudgetExceeded(fm.f.size());
    int id = (int)fm.f.size();
    ix[key] = id;
    fm.f.push_back(g);
    fm.levels.push_back(lv);
    std::string name = P.states[g];
    if (sys.modified) {
      name += "[";
      for (size_t c = 0; c < lv.size(); ++c) name += (c ? "," : "") + m.states[lv[c]];
      name += "]";
    }
    if (std::count(fm.f.begin(), fm.f.end(), g) > 1) name += "#" + std::to_string(id);
    fm.flat.states.push_back(name);
    work.push_back(id);
    return id;
  };
  auto lv0 = initial_levels(sys);
  if (init.state != P.initial) {
    lv0.clear();
    for (size_t c = 0; c < sys.orders.size(); ++c) lv0.push_back(sys.members[c][sys.tuples[init.state][c + 1]][0]);
  }
  fm.flat.initial = intern(init.state, lv0);
  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    int g = fm.f[s];
    auto lv = fm.levels[s];
    int q0 = sys.tuples[g][0];
    std::vector<char> zero(P.counters.size(), 0);
    for (size_t k = 0; k < P.counters.size(); ++k) {
      const auto& t = m.transitions[sys.table.transition[k]];
      zero[k] = !(reach[lv[t.action.channel]][t.source] && reach[t.target][q0]);
    }
    for (int e : P.out_edges(g)) {
      const auto& tr = P.transitions[e];
      if (tr.guard.assume_zero(zero).is_false()) continue;
      auto nl = lv;
      const auto& mv = sys.moves[e];
      if (mv.channel >= 0) nl[mv.channel] = m.transitions[mv.order_transition].target;
      int to = intern(tr.target, nl);
      CounterTransition ft = tr;
      ft.source = s;
      ft.target = to;
      fm.flat.transitions.push_back(ft);
      fm.edge_map.push_back(e);
    }
  }
  fm.flat.index();
  return fm;
}

bool is_flattening(const SyncSystem& sys, const FlatteningMap& fm) {
  const auto& P = sys.product;
  if (fm.flat.transitions.size() != fm.edge_map.size()) return false;
  for (size_t i = 0; i < fm.flat.transitions.size(); ++i) {
    const auto& a = fm.flat.transitions[i];
    const auto& b = P.transitions[fm.edge_map[i]];
    if (fm.f[a.source] != b.source || fm.f[a.target] != b.target || !(a.guard == b.guard) || a.update != b.update)
      return false;
  }
  return true;
}

std::vector<std::vector<int>> counter_traces(const CounterMachine& cm, const CounterConfig& init, int depth,
                                             const std::vector<int>* relabel) {
  std::set<std::vector<int>> out;
  std::vector<int> run;
  std::function<void(const CounterConfig&)> go = [&](const CounterConfig& c) {
    out.insert(run);
    if ((int)run.size() >= depth) return;
    for (int t : cm.out_edges(c.state))
      if (auto n = counter_step(cm, c, t)) {
        run.push_back(relabel ? (*relabel)[t] : t);
        go(*n);
        run.pop_back();
      }
  };
  go(init);
  return {out.begin(), out.end()};
}

}  // namespace flatfifo
