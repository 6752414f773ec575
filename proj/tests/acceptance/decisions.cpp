#include <map>
#include <random>

#include "acceptance.hpp"
#include "flatfifo/explorer.hpp"
#include "flatfifo/reductions.hpp"
#include "flatfifo/symbolic.hpp"
#include "flatfifo/words.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace flatfifo;

namespace acceptance {

namespace {

struct Tally {
  int compared = 0, disagree = 0, unknown = 0, budget = 0;
};

bool has_cycle(const ReachGraph& g) {
  std::vector<std::vector<int>> adj(g.size());
  for (const auto& e : g.edges) adj[e.from].push_back(e.to);
  std::vector<char> color(g.size(), 0);
  for (size_t s = 0; s < g.size(); ++s) {
    if (color[s]) continue;
    std::vector<std::pair<int, size_t>> st{{(int)s, 0}};
    color[s] = 1;
    while (!st.empty()) {
      auto& [v, i] = st.back();
      if (i < adj[v].size()) {
        int w = adj[v][i++];
        if (color[w] == 1) return true;
        if (!color[w]) {
          color[w] = 1;
          st.push_back({w, 0});
        }
      } else {
        color[v] = 2;
        st.pop_back();
      }
    }
  }
  return false;
}

// Compares one symbolic decision with an explorer verdict; symbolic errors count as budget hits.
template <class F>
void compare(Tally& t, Tri oracle, F&& decide, std::vector<std::string>& log, const std::string& what) {
  if (oracle == Tri::Unknown) {
    ++t.unknown;
    return;
  }
  bool got;
  try {
    got = decide();
  } catch (const Error&) {
    ++t.budget;
    return;
  }
  ++t.compared;
  if (got != (oracle == Tri::Yes)) {
    ++t.disagree;
    if (log.size() < 5) log.push_back(what);
  }
}

Config random_config(const FifoMachine& m, std::mt19937& rng) {
  Config c{(int)(rng() % m.states.size()), {}};
  for (size_t ch = 0; ch < m.channels.size(); ++ch) {
    const auto& letters = m.channel_letters((int)ch);
    Word w;
    int len = (int)(rng() % 4);
    for (int i = 0; i < len && !letters.empty(); ++i) w.push_back((Letter)letters[rng() % letters.size()]);
    c.contents.push_back(w);
  }
  return c;
}

}  // namespace

Outcome oracle_equivalence() {
  Stopwatch sw;
  auto machines = corpus(220);
  for (auto& f : reference_machines()) machines.push_back(std::move(f));
  std::map<std::string, Tally> tally;
  std::vector<std::string> log;
  std::mt19937 rng(1);
  ExploreBounds b;  // 50000 configs, channel length 20
  for (const auto& [name, m] : machines) {
    Config init = m.initial_config();
    auto g = explore(m, init, Semantics::Perfect, b);
    bool complete = !g.truncated;
    std::vector<char> seen(m.states.size(), 0);
    for (size_t i = 0; i < g.size(); ++i) seen[g.nodes[i][0]] = 1;

    for (int q = 0; q < (int)m.states.size(); ++q)
      compare(tally["csr"], seen[q] ? Tri::Yes : complete ? Tri::No : Tri::Unknown,
              [&] { return decide_csr(m, init, q); }, log, name + " csr " + m.states[q]);

    std::vector<Config> targets;
    for (int k = 0; k < 8 && g.size(); ++k) targets.push_back(g.config((int)((k * 7919u) % g.size())));
    for (int k = 0; k < 8; ++k) targets.push_back(random_config(m, rng));
    for (const auto& c : targets)
      compare(tally["reach"], g.find(c) >= 0 ? Tri::Yes : complete ? Tri::No : Tri::Unknown,
              [&] { return decide_reachability(m, init, c); }, log, name + " reach " + render_config(m, c));

    std::vector<Config> starts{init};
    for (int k = 1; k <= 2 && k < (int)g.size(); ++k) starts.push_back(g.config((int)((k * 104729u) % g.size())));
    for (const auto& c : starts)
      compare(tally["cyclic"], oracle_cyclic(m, c, b), [&] { return cyclic(m, c); }, log,
              name + " cyclic " + render_config(m, c));

    Tri nonterm = has_cycle(g) ? Tri::Yes : complete ? Tri::No : Tri::Unknown;
    compare(tally["nontermination"], nonterm, [&] { return decide_nontermination(m, init); }, log,
            name + " nontermination");

    Tri unbounded = complete ? Tri::No : Tri::Unknown;
    compare(tally["unboundedness"], unbounded, [&] { return decide_unboundedness(m, init); }, log,
            name + " unboundedness");
    for (int c = 0; c < (int)m.channels.size(); ++c)
      for (int a : m.channel_letters(c))
        compare(tally["letter"], unbounded, [&] { return decide_letter_unbounded(m, init, c, a); }, log,
                name + " letter " + m.letters[a]);
  }
  double t = sw.seconds();
  bool pass = t < 300;
  Detail d;
  d("machines", machines.size());
  for (const auto& [k, v] : tally) {
    d(k, std::to_string(v.compared - v.disagree) + "/" + std::to_string(v.compared) +
             (v.unknown ? " unknown " + std::to_string(v.unknown) : "") +
             (v.budget ? " budget " + std::to_string(v.budget) : ""));
    pass = pass && v.disagree == 0 && v.budget == 0 && v.compared > 0;
  }
  for (const auto& l : log) d("mismatch", l);
  return {pass, d.str()};
}

Outcome sat_round_trip() {
  Stopwatch sw;
  std::mt19937 rng(5);
  int agree = 0, total = 0, sat = 0;
  std::string first_bad;
  for (int i = 0; i < 100; ++i) {
    int n = 1 + (int)(rng() % 15), m = 1 + (int)(rng() % 40);
    Cnf f{n, generators::random_cnf(rng, n, m)};
    bool want = oracles::satisfiable(n, f.clauses);
    sat += want;
    bool ok = true;
    for (auto v : {Sat3Variant::Reach, Sat3Variant::Unbounded, Sat3Variant::NonTerm, Sat3Variant::RepeatedCSR}) {
      bool got;
      try {
        got = decide_sat3(sat3_to_flat_fifo(f, v), kDefaultAccelerationBudget);
      } catch (const Error&) {
        got = !want;
      }
      if (got != want && first_bad.empty()) first_bad = cnf_to_dimacs(f) + " variant " + to_string(v);
      ok = ok && got == want;
    }
    agree += ok;
    ++total;
  }
  double t = sw.seconds();
  Detail d;
  d("agree", std::to_string(agree) + "/" + std::to_string(total))("satisfiable", sat)("limit_s", 180);
  if (!first_bad.empty()) d("first_mismatch", first_bad);
  return {agree == total && t < 180, d.str()};
}

}  // namespace acceptance
