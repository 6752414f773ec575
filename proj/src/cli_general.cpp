#include <algorithm>
#include <set>

#include "cli_internal.hpp"
#include "flatfifo/explorer.hpp"
#include "flatfifo/words.hpp"

namespace flatfifo {

using nlohmann::json;

namespace {

// Kept transitions (original indices, ascending) reachable from the initial state.
std::vector<int> trim(const FifoMachine& m, const std::vector<int>& keep) {
  std::vector<std::vector<int>> out(m.states.size());
  for (int t : keep) out[m.transitions[t].source].push_back(t);
  std::vector<char> seen(m.states.size(), 0);
  std::vector<int> stack{m.initial}, kept;
  seen[m.initial] = 1;
  while (!stack.empty()) {
    int q = stack.back();
    stack.pop_back();
    for (int t : out[q]) {
      kept.push_back(t);
      int r = m.transitions[t].target;
      if (!seen[r]) {
        seen[r] = 1;
        stack.push_back(r);
      }
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

FifoMachine restrict_to(const FifoMachine& m, const std::vector<int>& kept) {
  FifoMachine s;
  s.states = m.states;
  s.channels = m.channels;
  s.letters = m.letters;
  s.letter_channel = m.letter_channel;
  s.initial = m.initial;
  for (int t : kept) s.transitions.push_back(m.transitions[t]);
  s.index();
  return s;
}

// Orders removed sets by size, then lexicographically.
struct BySize {
  bool operator()(const std::vector<int>& a, const std::vector<int>& b) const {
    return a.size() != b.size() ? a.size() < b.size() : a < b;
  }
};

}  // namespace

FifoMachine sub_machine(const FifoMachine& m, const std::vector<int>& keep) {
  return restrict_to(m, trim(m, keep));
}

// Every flat sub-machine lies inside a maximal one, and a flat superset of a stable sub-machine is stable
// too, so maximal ones suffice. A flat F misses an edge of any two cycles through one vertex, so branching
// on those edges reaches every maximal F.
std::vector<std::vector<int>> maximal_flat_submachines(const FifoMachine& m, std::size_t limit, bool* complete) {
  const int n = (int)m.transitions.size();
  const std::size_t node_cap = std::max<std::size_t>(4096, limit * 64);
  std::set<std::vector<int>, BySize> queue{{}};
  std::set<std::vector<int>> visited{{}}, emitted_sets;
  std::vector<std::vector<int>> out;
  std::size_t popped = 0;
  auto kept_of = [&](const std::vector<int>& removed) {
    std::vector<int> keep;
    for (int t = 0, i = 0; t < n; ++t) {
      if (i < (int)removed.size() && removed[i] == t) ++i;
      else keep.push_back(t);
    }
    return trim(m, keep);
  };
  while (!queue.empty() && out.size() < limit && popped < node_cap) {
    auto removed = *queue.begin();
    queue.erase(queue.begin());
    ++popped;
    auto kept = kept_of(removed);
    auto sub = restrict_to(m, kept);
    auto fr = is_flat(sub);
    if (fr.flat) {
      if (emitted_sets.count(kept)) continue;
      bool maximal = true;
      for (int e : removed) {
        auto more = kept;
        more.push_back(e);
        auto grown = trim(m, more);
        if (grown != kept && is_flat(restrict_to(m, grown)).flat) {
          maximal = false;
          break;
        }
      }
      if (!maximal) continue;
      emitted_sets.insert(kept);
      out.push_back(kept);
      continue;
    }
    std::set<int> branch;
    for (int e : fr.cycle1) branch.insert(kept[e]);
    for (int e : fr.cycle2) branch.insert(kept[e]);
    for (int e : branch) {
      auto child = removed;
      child.insert(std::upper_bound(child.begin(), child.end(), e), e);
      if (visited.insert(child).second) queue.insert(child);
    }
  }
  if (complete) *complete = queue.empty();
  return out;
}

namespace {

using namespace cli;

// Three-valued inclusion of one family in the union of families at its state.
Tri included(const SymbolicEngine& e, const SymbolicConfig& f, const std::vector<SymbolicConfig>& at) {
  for (const auto& g : at)
    if (same_family(f, g)) return Tri::Yes;
  auto in_some = [&](const Config& c) {
    return std::any_of(at.begin(), at.end(), [&](const SymbolicConfig& g) { return e.member(g, c).has_value(); });
  };
  if (params_of(f).empty()) return in_some(concretize(f, {})) ? Tri::Yes : Tri::No;
  for (const auto& c : enumerate_members(f, 2))
    if (!in_some(c)) return Tri::No;
  return Tri::Unknown;
}

// Whether Post_T(R) stays in R for the transitions of m outside the sub-machine; the sub-machine's own
// transitions keep its exact reach set closed.
Tri stable(const FifoMachine& m, const std::vector<int>& kept, const ReachMap& r, const Budgets& b,
           std::size_t& posts) {
  SymbolicEngine full(m, b.acceleration);
  full.set_traces(false);
  static const std::vector<SymbolicConfig> none;
  Tri verdict = Tri::Yes;
  for (int t = 0; t < (int)m.transitions.size(); ++t) {
    if (std::binary_search(kept.begin(), kept.end(), t)) continue;
    auto it = r.find(m.transitions[t].source);
    if (it == r.end()) continue;
    for (const auto& s : it->second)
      for (const auto& f : full.post(s, t)) {
        ++posts;
        auto at = r.find(f.state);
        Tri inc = included(full, f, at == r.end() ? none : at->second);
        if (inc == Tri::No) return Tri::No;
        if (inc == Tri::Unknown) verdict = Tri::Unknown;
      }
  }
  if (verdict != Tri::Unknown) return verdict;
  // refutation by exploring the full machine: a reachable config outside r disproves stability
  SymbolicEngine probe(m, b.acceleration);
  auto g = explore(m, m.initial_config(), Semantics::Perfect, {std::min<std::size_t>(b.configs, 2000), 8, 1u << 30});
  for (std::size_t i = 0; i < g.size(); ++i) {
    Config c = g.config((int)i);
    auto at = r.find(c.state);
    if (at == r.end()) return Tri::No;
    if (!std::any_of(at->second.begin(), at->second.end(),
                     [&](const SymbolicConfig& s) { return probe.member(s, c).has_value(); }))
      return Tri::No;
  }
  return Tri::Unknown;
}

// Cycle questions on the finite reach set of m, by complete exploration.
std::optional<bool> finite_cycle(const FifoMachine& m, int q, const Budgets& b) {
  auto g = explore(m, m.initial_config(), Semantics::Perfect, {b.configs, b.channel_len, 1u << 30});
  if (g.truncated) return std::nullopt;
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : g.edges) edges.emplace_back(e.from, e.to);
  auto comp = scc_ids((int)g.size(), edges);
  std::vector<int> size(g.size(), 0);
  for (int c : comp) ++size[c];
  std::vector<char> cyclic(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) cyclic[i] = size[comp[i]] > 1;
  for (const auto& e : g.edges)
    if (e.from == e.to) cyclic[e.from] = 1;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (cyclic[i] && (q < 0 || g.nodes[i][0] == q)) return true;
  return false;
}

// Answers that a sub-machine's reach set already proves for the full machine (reach sets only grow).
std::optional<Report> existential(const FifoMachine& sub, SymbolicEngine& e, const ReachMap& r, const Query& q) {
  switch (q.kind) {
    case QueryKind::Reach: {
      auto it = r.find(q.config->state);
      if (it == r.end()) return std::nullopt;
      for (const auto& s : it->second) {
        auto v = e.member(s, *q.config);
        if (!v) continue;
        Report rep = verdict(true);
        rep.body["witness"] = {{"run", run_json(sub, concretize_trace(s.trace, *v))}};
        return rep;
      }
      return std::nullopt;
    }
    case QueryKind::Csr: {
      auto it = r.find(q.state);
      if (it == r.end() || it->second.empty()) return std::nullopt;
      Report rep = verdict(true);
      if (auto w = family_witness(sub, e, it->second.front())) rep.body["witness"] = *w;
      return rep;
    }
    case QueryKind::RepeatedCsr:
      if (repeated_csr_on(e, sub, r, q.state)) return verdict(true);
      return std::nullopt;
    case QueryKind::Terminate:
      for (int a : loop_anchors(sub))
        if (repeated_csr_on(e, sub, r, a)) {
          Report rep = verdict(false);
          rep.body["witness"] = {{"loop_at", sub.states[a]}};
          return rep;
        }
      return std::nullopt;
    case QueryKind::Bounded:
    case QueryKind::ChannelBounded:
    case QueryKind::LetterBounded:
      if (auto w = unbounded_letter(sub, r, q)) {
        Report rep = verdict(false);
        rep.body["witness"] = *w;
        return rep;
      }
      return std::nullopt;
    case QueryKind::Cyclic: return std::nullopt;
  }
  return std::nullopt;
}

// Answer on a stable reach set, which is the reach set of the full machine.
Report on_stable(const FifoMachine& m, const ReachMap& r, const Query& q, const Budgets& b) {
  Query any = q;
  any.channel = any.letter = -1;
  bool infinite = unbounded_letter(m, r, any).has_value();
  switch (q.kind) {
    case QueryKind::Reach:
    case QueryKind::Csr: return verdict(false);  // the existential check saw the whole reach set
    case QueryKind::Bounded:
    case QueryKind::ChannelBounded:
    case QueryKind::LetterBounded: return verdict(true);
    case QueryKind::Terminate:
      // an infinite reach set of a finitely branching system has an infinite run
      if (infinite) return verdict(false);
      [[fallthrough]];
    case QueryKind::RepeatedCsr: {
      if (infinite) break;
      auto c = finite_cycle(m, q.kind == QueryKind::Terminate ? -1 : q.state, b);
      if (!c) break;
      return verdict(q.kind == QueryKind::Terminate ? !*c : *c);
    }
    case QueryKind::Cyclic: break;
  }
  return {kExitInconclusive, {{"answer", "unknown"}, {"reason", "reach set is stable but the query needs cycles"}}};
}

}  // namespace

Report cmd_verify_general(const FifoMachine& m, const Query& q, const Budgets& b) {
  Report rep;
  json tried = json::array();
  try {
    if (q.kind == QueryKind::Cyclic) {
      if (is_flat(m).flat) return cmd_check(m, q, Semantics::Perfect, b);
      Tri t = oracle_cyclic(m, *q.config, {b.configs, b.channel_len, 1u << 30});
      rep = t == Tri::Unknown ? Report{kExitInconclusive, {{"answer", "unknown"}}} : verdict(t == Tri::Yes);
      rep.body["method"] = "explorer";
      rep.body["query"] = to_string(q.kind);
      return rep;
    }
    std::vector<int> all(m.transitions.size());
    for (int t = 0; t < (int)all.size(); ++t) all[t] = t;
    const auto whole = trim(m, all);
    bool complete = false;
    auto subs = maximal_flat_submachines(m, b.submachines, &complete);
    bool decided = false;
    for (std::size_t i = 0; i < subs.size() && !decided; ++i) {
      const auto& kept = subs[i];
      auto sub = restrict_to(m, kept);
      json entry = {{"index", i}, {"transitions", kept.size()}};
      std::vector<std::string> removed;
      for (int t = 0; t < (int)m.transitions.size(); ++t)
        if (!std::binary_search(kept.begin(), kept.end(), t)) removed.push_back(m.transitions[t].id);
      log(1, "sub-machine " + std::to_string(i) + " without " + std::to_string(removed.size()) + " transitions");
      try {
        SymbolicEngine e(sub, b.acceleration);
        auto r = e.reach_set(m.initial_config());
        if (auto hit = existential(sub, e, r, q)) {
          rep = *hit;
          entry["outcome"] = "witness";
          decided = true;
        } else {
          std::size_t posts = 0;
          // the machine itself (up to unreachable transitions) has an exact reach set
          Tri st = kept == whole ? Tri::Yes : stable(m, kept, r, b, posts);
          entry["stable"] = to_string(st);
          entry["posts"] = posts;
          if (st == Tri::Yes) {
            rep = on_stable(m, r, q, b);
            entry["outcome"] = "stable";
            decided = rep.exit_code != kExitInconclusive;
          }
        }
      } catch (const Error& ex) {
        if (!is_budget_error(ex)) throw;
        entry["outcome"] = std::string("budget: ") + ex.what();
      }
      if (decided) rep.body["removed"] = removed;
      tried.push_back(entry);
    }
    if (!decided) {
      rep = {kExitInconclusive, {{"answer", "unknown"}}};
      rep.body["reason"] = complete && subs.size() < b.submachines ? "no flat sub-machine is stable"
                                                                  : "sub-machine budget exhausted";
    }
  } catch (const Error& ex) {
    rep = error_report(ex);
  }
  rep.body["query"] = to_string(q.kind);
  rep.body["submachines"] = tried;
  return rep;
}

}  // namespace flatfifo
