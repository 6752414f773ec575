#include <doctest.h>

#include <random>

#include "fixtures.hpp"
#include "generators.hpp"
#include "oracles.hpp"
#include "flatfifo/explorer.hpp"
#include "flatfifo/reductions.hpp"

using namespace flatfifo;

namespace {

ExploreBounds small_bounds() {
  ExploreBounds b;
  b.max_configs = 4000;
  b.max_channel_len = 6;
  return b;
}

std::vector<std::string> actions_from(const FifoMachine& m, int q, int len) {
  std::vector<std::string> out;
  for (int i = 0; i < len; ++i) {
    REQUIRE(m.out_edges(q).size() == 1);
    const auto& t = m.transitions[m.out_edges(q)[0]];
    out.push_back(action_text(m, t.action));
    q = t.target;
  }
  return out;
}

}  // namespace

TEST_CASE("DIMACS reading and writing") {
  auto f = parse_dimacs("c example\np cnf 3 2\n1 -2 3 0\n-1\n2 0\n");
  CHECK(f.n == 3);
  CHECK(f.clauses == std::vector<std::vector<int>>{{1, -2, 3}, {-1, 2}});
  CHECK(parse_dimacs(cnf_to_dimacs(f)) == f);
  CHECK_THROWS_AS(parse_dimacs("1 2 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 x 0\n"), ParseError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 2 1\n1 3 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_dimacs("p cnf 4 1\n1 2 3 4 0\n"), ValidationError);
  CHECK_THROWS_AS(sat3_variant_from_string("bogus"), ValidationError);
  CHECK(sat3_variant_from_string("repeated-csr") == Sat3Variant::RepeatedCSR);
}

TEST_CASE("clause gadget reads and rewrites one literal per branch") {
  auto inst = sat3_to_flat_fifo(Cnf{3, {{1, -2, 3}}}, Sat3Variant::Reach);
  const auto& m = inst.machine;
  CHECK(is_flat(m).flat);
  int q0 = m.state_index("v3");
  std::vector<std::string> branches;
  for (int t : m.out_edges(q0)) {
    const auto& tr = m.transitions[t];
    branches.push_back(action_text(m, tr.action) + " " + actions_from(m, tr.target, 1)[0]);
    CHECK(m.transitions[m.out_edges(tr.target)[0]].target == m.state_index("c1"));
  }
  CHECK(branches == std::vector<std::string>{"x1?1@x1 x1!1@x1", "x2?0@x2 x2!0@x2", "x3?1@x3 x3!1@x3"});
  CHECK(m.out_edges(m.state_index("v0")).size() == 2);
  CHECK(inst.target == Config{m.state_index("k3"), {Word(), Word(), Word()}});
}

TEST_CASE("small formulas through the 3SAT gadget") {
  auto unsat = sat3_to_flat_fifo(Cnf{1, {{1}, {-1}}}, Sat3Variant::Reach);
  CHECK_FALSE(decide_sat3(unsat));
  CHECK(oracle_reachable(unsat.machine, unsat.machine.initial_config(), unsat.target, Semantics::Perfect,
                         small_bounds()) == Tri::No);
  auto sat = sat3_to_flat_fifo(Cnf{2, {{1, -2}}}, Sat3Variant::Unbounded);
  CHECK(decide_sat3(sat));
  CHECK_THROWS_AS(sat3_to_flat_fifo(Cnf{0, {}}, Sat3Variant::NonTerm), ValidationError);
  CHECK(decide_sat3(sat3_to_flat_fifo(Cnf{0, {}}, Sat3Variant::Reach)));
}

TEST_CASE("3SAT variants agree with brute force") {
  std::mt19937 rng(31);
  int sat = 0;
  for (int iter = 0; iter < 40; ++iter) {
    int n = 1 + (int)(rng() % 6), m = 1 + (int)(rng() % (5 * n));
    Cnf f{n, generators::random_cnf(rng, n, m)};
    bool want = oracles::satisfiable(n, f.clauses);
    sat += want;
    for (auto v : {Sat3Variant::Reach, Sat3Variant::Unbounded, Sat3Variant::NonTerm, Sat3Variant::RepeatedCSR})
      CHECK_MESSAGE(decide_sat3(sat3_to_flat_fifo(f, v)) == want, cnf_to_dimacs(f), to_string(v));
  }
  MESSAGE("satisfiable ", sat, " of 40");
}

TEST_CASE("reachability to control-state reachability") {
  auto m = parse_machine("channels c\nalphabet c: a b\nstate q init\ntrans t1 q q c!a\n");
  auto r = reach_to_csr(m, parse_config(m, "(q, a)"));
  CHECK(r.machine.states.size() == m.states.size() + 3);
  CHECK(r.machine.states[r.stop] == "q_stop");
  int first = -1;
  for (int t : r.machine.out_edges(0))
    if (r.machine.transitions[t].target != 0) first = t;
  REQUIRE(first >= 0);
  auto path = actions_from(r.machine, r.machine.transitions[first].target, 2);
  CHECK(action_text(r.machine, r.machine.transitions[first].action) == "c!__hash@c");
  CHECK(path == std::vector<std::string>{"c?a", "c?__hash@c"});
  auto two = parse_machine("channels c d\nalphabet c: a\nalphabet d: b\nstate q init\n");
  auto r2 = reach_to_csr(two, two.initial_config());
  CHECK(r2.machine.states.size() == 1 + 4);
  auto none = parse_machine("channels\nstate q init\n");
  CHECK(reach_to_csr(none, none.initial_config()).machine.states.size() == 2);
}

TEST_CASE("reach_to_csr is exact and keeps flatness on random machines") {
  std::mt19937 rng(32);
  auto b = small_bounds();
  int compared = 0;
  for (int iter = 0; iter < 20; ++iter) {
    auto m = parse_machine(generators::random_flat(rng, 1 + iter % 2));
    auto g = explore(m, m.initial_config(), Semantics::Perfect, b);
    // one reachable target and one with a letter appended
    auto yes = g.config((int)(rng() % g.size()));
    auto no = yes;
    no.contents[0].push_back((Letter)m.channel_letters(0)[0]);
    for (const auto& target : {yes, no}) {
      auto r = reach_to_csr(m, target);
      CHECK(is_flat(r.machine).flat);
      auto lhs = oracle_reachable(m, m.initial_config(), target, Semantics::Perfect, b);
      auto rhs = oracle_csr(r.machine, r.machine.initial_config(), r.stop, Semantics::Perfect, b);
      if (lhs == Tri::Unknown || rhs == Tri::Unknown) continue;
      CHECK(lhs == rhs);
      ++compared;
    }
  }
  MESSAGE("conclusive comparisons ", compared, " of 40");
  CHECK(compared >= 20);
}

TEST_CASE("control-state reachability to reachability") {
  auto m = parse_machine("channels c\nalphabet c: a b\nstate p init\nstate q\ntrans t1 p q c!a\n");
  auto r = csr_to_reach(m, 1);
  CHECK(r.machine.out_edges(1).size() == 2);
  for (int t : r.machine.out_edges(1)) CHECK(r.machine.transitions[t].target == 1);
  CHECK(r.target == Config{1, {Word()}});
  // two self loops on one state
  CHECK_FALSE(r.flat);
  auto one = parse_machine("channels c\nalphabet c: a\nstate p init\nstate q\ntrans t1 p q c!a\n");
  CHECK(csr_to_reach(one, 1).flat);
  auto empty = parse_machine("channels\nstate q init\n");
  auto e = csr_to_reach(empty, 0);
  CHECK(e.machine.transitions.empty());
  CHECK(e.target == Config{0, {}});
  auto loop = parse_machine("channels c\nalphabet c: a\nstate q init\ntrans t1 q q c!a\n");
  CHECK_FALSE(csr_to_reach(loop, 0).flat);
}

TEST_CASE("csr_to_reach agrees with the explorer") {
  std::mt19937 rng(33);
  auto b = small_bounds();
  int compared = 0;
  for (int iter = 0; iter < 20; ++iter) {
    auto m = parse_machine(generators::random_flat(rng, 1));
    int q = (int)(rng() % m.states.size());
    auto r = csr_to_reach(m, q);
    CHECK(r.flat == is_flat(r.machine).flat);
    auto lhs = oracle_csr(m, m.initial_config(), q, Semantics::Perfect, b);
    auto rhs = oracle_reachable(r.machine, r.machine.initial_config(), r.target, Semantics::Perfect, b);
    if (lhs == Tri::Unknown || rhs == Tri::Unknown) continue;
    CHECK(lhs == rhs);
    ++compared;
  }
  MESSAGE("conclusive comparisons ", compared, " of 20");
  CHECK(compared >= 10);
}

TEST_CASE("repeated control-state gadget on the two-loop machine") {
  auto m = fixtures::load("two_loops");
  int q3 = m.state_index("q3");
  auto choices = rcsr_witness_choices(m, q3);
  CHECK(choices.size() == 2);
  bool any = false;
  for (const auto& w : choices) {
    auto g = rcsr_gadget(m, q3, w);
    CHECK(is_flat(g.machine).flat);
    CHECK(g.machine.channels.back() == "c__p");
    any = any || decide_csr(g.machine, g.machine.initial_config(), g.final_state);
  }
  CHECK(any == decide_repeated_csr(m, m.initial_config(), q3));
  CHECK(any);
  // the first loop only sends, so its gadget is just the primed copy of the loop
  auto g1 = rcsr_gadget(m, m.state_index("q1"), {std::nullopt});
  CHECK(g1.machine.states.size() == m.states.size() + 2);
  CHECK(decide_csr(g1.machine, g1.machine.initial_config(), g1.final_state));
  CHECK_THROWS_AS(rcsr_gadget(m, q3, {std::nullopt}), BadWitness);
  auto line = parse_machine("channels c\nalphabet c: a\nstate p init\nstate q\ntrans t1 p q c!a\n");
  CHECK_THROWS_AS(rcsr_gadget(line, 0, {std::nullopt}), NoLoopAt);
  Decomposition bad{word_of("a"), Word(), word_of("b"), 1, 1, std::nullopt};
  CHECK_THROWS_AS(rcsr_gadget(m, q3, {bad}), BadWitness);
}

TEST_CASE("repeated control-state gadget agrees with the decision procedure") {
  std::mt19937 rng(34);
  int anchors = 0;
  for (int iter = 0; iter < 30; ++iter) {
    auto m = parse_machine(generators::random_flat(rng, 1 + iter % 2));
    for (int q = 0; q < (int)m.states.size(); ++q) {
      if (!loop_of(m, q) || m.states[q][0] != 's') continue;
      bool want = decide_repeated_csr(m, m.initial_config(), q);
      bool any = false;
      for (const auto& w : rcsr_witness_choices(m, q)) {
        auto g = rcsr_gadget(m, q, w);
        bool hit = decide_csr(g.machine, g.machine.initial_config(), g.final_state);
        // every witness is sound on its own
        if (hit) CHECK(want);
        any = any || hit;
      }
      CHECK_MESSAGE(any == want, render_machine(m), m.states[q]);
      ++anchors;
    }
  }
  MESSAGE("loop anchors ", anchors);
}

TEST_CASE("corpus generation") {
  CorpusParams p;
  p.max_states = 5;
  auto a = gen_corpus(1, p);
  auto b = gen_corpus(1, p);
  REQUIRE(a.size() == 100);
  int conclusive = 0;
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].machine == b[i].machine);
    CHECK(a[i].annotations == b[i].annotations);
    const auto& m = a[i].machine;
    CHECK(is_flat(m).flat);
    CHECK((int)m.states.size() <= 5);
    CHECK((int)m.channels.size() <= 2);
    for (int c = 0; c < (int)m.channels.size(); ++c) CHECK(m.channel_letters(c).size() <= 3);
    int loops = 0;
    for (int q = 0; q < (int)m.states.size(); ++q) loops += m.states[q][0] == 's' && loop_of(m, q).has_value();
    CHECK(loops <= 3);
    conclusive += a[i].conclusive;
  }
  MESSAGE("conclusive ", conclusive, " of 100");
  CHECK(conclusive >= 60);
  CHECK(gen_corpus(2, p)[0].machine != a[0].machine);
  CorpusParams minimal{1, 1, 0, 1, 1};
  auto one = gen_corpus(7, minimal);
  REQUIRE(one.size() == 1);
  CHECK(one[0].machine.states.size() == 1);
  CHECK(one[0].machine.transitions.empty());
}
