#include <doctest.h>

#include <functional>
#include <set>

#include "fixtures.hpp"
#include "flatfifo/model.hpp"

using namespace flatfifo;

TEST_CASE("parse two-loop machine") {
  auto m = fixtures::load("two_loops");
  CHECK(m.states.size() == 4);
  CHECK(m.transitions.size() == 5);
  CHECK(m.channels.size() == 1);
  CHECK(m.transitions[3].action.kind == ActionKind::Retrieve);
  CHECK(m.transitions[4].action.kind == ActionKind::Internal);
  CHECK(m.initial == m.state_index("q1"));
}

TEST_CASE("degenerate and invalid sources") {
  auto m = parse_machine("channels\nstate only init\n");
  CHECK(m.states.size() == 1);
  CHECK(m.transitions.empty());

  const char* wrong_channel =
      "channels c1 c2\nalphabet c1: a\nalphabet c2: b\nstate q init\ntrans t q q c2!a\n";
  CHECK_THROWS_AS(parse_machine(wrong_channel), ValidationError);

  const char* shared = "channels c1 c2\nalphabet c1: a\nalphabet c2: a\nstate q init\ntrans t q q c2!a\n";
  CHECK_THROWS_AS(parse_machine(shared), ValidationError);
  auto renamed = parse_machine(shared, ParseOptions{true});
  CHECK(renamed.letters == std::vector<std::string>{"a@c1", "a@c2"});
  CHECK(renamed.transitions[0].action.letter == 1);

  try {
    parse_machine("channels c\nstate q init\nbogus line\n");
    FAIL("expected parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
    CHECK(e.col == 1);
  }
  CHECK_THROWS_AS(parse_machine("channels c\nalphabet c: a\nstate q init\ntrans t q q c!!a\n"), ParseError);
  CHECK_THROWS_AS(parse_machine("channels c\nstate q init\nstate q\n"), ValidationError);
}

TEST_CASE("render and json round-trip") {
  for (const char* name : {"two_loops", "branching_loops", "schema", "proc_p", "proc_q", "proc_r"}) {
    auto m = fixtures::load(name);
    CHECK(parse_machine(render_machine(m)) == m);
    CHECK(machine_from_json(machine_to_json(m)) == m);
  }
}

TEST_CASE("config text form") {
  auto m = fixtures::load("two_loops");
  auto c = parse_config(m, "(q3,ab)");
  CHECK(c.state == 2);
  CHECK(c.contents[0] == Word{0, 1});
  CHECK(render_config(m, c) == "(q3,ab)");
  CHECK(render_config(m, parse_config(m, "(q1,)")) == "(q1,)");
  CHECK_THROWS(parse_config(m, "(q9,a)"));

  auto p = fixtures::load("proc_p");
  auto pc = parse_config(p, "(p2,a1.y,,c,)");
  CHECK(pc.contents[0].size() == 2);
  CHECK(render_config(p, pc) == "(p2,a1.y,,c,)");
}

TEST_CASE("perfect and front-lossy steps") {
  auto m = fixtures::load("two_loops");
  int t3 = m.transition_index("t3"), t4 = m.transition_index("t4");
  auto r = step(m, parse_config(m, "(q3,a)"), t3, Semantics::Perfect);
  REQUIRE(r.size() == 1);
  CHECK(render_config(m, r[0]) == "(q4,aa)");
  CHECK(step(m, parse_config(m, "(q4,ba)"), t4, Semantics::Perfect).empty());
  // front-lossy: b is discarded before the retrieved a
  auto fl = step(m, parse_config(m, "(q4,ba)"), t4, Semantics::FrontLossy);
  REQUIRE(fl.size() == 1);
  CHECK(render_config(m, fl[0]) == "(q3,)");
  auto fl2 = step(m, parse_config(m, "(q4,aba)"), t4, Semantics::FrontLossy);
  CHECK(fl2.size() == 2);
  // wrong source state disables
  CHECK(step(m, parse_config(m, "(q1,)"), t4, Semantics::Perfect).empty());
  CHECK(lose_successors(parse_config(m, "(q1,aab)")).size() == 2);
}

TEST_CASE("perfect steps are deterministic") {
  auto m = fixtures::load("two_loops");
  std::vector<Config> cs = {parse_config(m, "(q1,)"), parse_config(m, "(q4,ab)"), parse_config(m, "(q4,a)")};
  for (const auto& c : cs)
    for (int t = 0; t < (int)m.transitions.size(); ++t) CHECK(step(m, c, t, Semantics::Perfect).size() <= 1);
}

TEST_CASE("product construction") {
  auto p = fixtures::load("proc_p"), q = fixtures::load("proc_q"), r = fixtures::load("proc_r");
  auto pr = product({p, q, r});
  CHECK(pr.states.size() == 10 * 10 * 3);
  CHECK(pr.states[pr.initial] == "(p1,q1,r1)");
  CHECK(pr.transition_index("P1@(p1,q1,r1)") >= 0);
  CHECK(pr.transitions[pr.transition_index("P1@(p1,q1,r1)")].target == pr.state_index("(p2,q1,r1)"));
  auto fr = is_flat(pr);
  CHECK_FALSE(fr.flat);

  auto single = product({p});
  CHECK(single.states.size() == p.states.size());
  CHECK(single.transitions.size() == p.transitions.size());

  auto a = parse_machine("channels c\nalphabet c: a\nstate s init\ntrans ta s s c!a\n");
  auto b = parse_machine("channels c\nalphabet c: a\nstate s init\ntrans tb s s c?a\n");
  auto ab = product({a, b});
  CHECK(ab.states.size() == 1);
  CHECK(ab.transitions.size() == 2);

  auto clash = parse_machine("channels d\nalphabet d: a\nstate s init\n");
  CHECK_THROWS_AS(product({a, clash}), AlphabetClash);
}

namespace {
// a cycle is a closed walk through the given vertex with no repeated edge
bool closed_walk(const FifoMachine& m, const std::vector<int>& cyc, int v) {
  if (cyc.empty() || m.transitions[cyc[0]].source != v) return false;
  for (size_t i = 0; i + 1 < cyc.size(); ++i)
    if (m.transitions[cyc[i]].target != m.transitions[cyc[i + 1]].source) return false;
  return m.transitions[cyc.back()].target == v;
}
}  // namespace

TEST_CASE("flatness and certificates") {
  CHECK(is_flat(fixtures::load("two_loops")).flat);
  CHECK(is_flat(fixtures::load("branching_loops")).flat);
  CHECK(is_flat(parse_machine("channels\nstate a init\nstate b\ntrans t a b tau\n")).flat);

  auto pr = product({fixtures::load("proc_p"), fixtures::load("proc_q"), fixtures::load("proc_r")});
  auto fr = is_flat(pr);
  REQUIRE_FALSE(fr.flat);
  CHECK(closed_walk(pr, fr.cycle1, fr.vertex));
  CHECK(closed_walk(pr, fr.cycle2, fr.vertex));
  CHECK(fr.cycle1 != fr.cycle2);

  auto nested = parse_machine("channels\nstate a init\nstate b\ntrans x a b tau\ntrans y b a tau\ntrans z a a tau\n");
  auto fn = is_flat(nested);
  REQUIRE_FALSE(fn.flat);
  CHECK(fn.vertex == 0);
  CHECK(closed_walk(nested, fn.cycle1, 0));
  CHECK(closed_walk(nested, fn.cycle2, 0));
}

TEST_CASE("loop_of") {
  auto m = fixtures::load("two_loops");
  auto l = loop_of(m, m.state_index("q3"));
  REQUIRE(l);
  CHECK(l->body == std::vector<int>{m.transition_index("t3"), m.transition_index("t4")});
  auto l1 = loop_of(m, m.state_index("q1"));
  REQUIRE(l1);
  CHECK(l1->body.size() == 2);
  auto bl = fixtures::load("branching_loops");
  auto lb = loop_of(bl, bl.state_index("q1"));
  REQUIRE(lb);
  CHECK(lb->body.size() == 4);
  CHECK_FALSE(loop_of(bl, bl.state_index("q0")));
  auto nested = parse_machine("channels\nstate a init\ntrans y a a tau\ntrans z a a tau\n");
  CHECK_THROWS_AS(loop_of(nested, 0), NotFlat);
}

TEST_CASE("path schemas") {
  auto bl = fixtures::load("branching_loops");
  auto s = path_schemas(bl, bl.state_index("q0"), bl.state_index("q3"));
  // one schema per way of entering and leaving each loop
  CHECK(s.size() == 5);
  std::set<std::string> texts;
  for (const auto& x : s) texts.insert(render_schema(bl, x));
  CHECK(texts.count("e01.e02 (l11.l12.l13.l14)* s13") == 1);
  CHECK(texts.count("e01.e02 (l11.l12.l13.l14)* e03.e04 (l21.l22.l23.l24)* e05.e06") == 1);
  CHECK(texts.count("e01.e02 (l11.l12.l13.l14)* l11.l12.s45 (l23.l24.l21.l22)* l23.s63") == 1);

  auto sc = fixtures::load("schema");
  auto s2 = path_schemas(sc, sc.state_index("q0"), sc.state_index("q3"));
  REQUIRE(s2.size() == 1);
  CHECK(render_schema(sc, s2[0]) == "p0 (l1a.l1b)* p1 (l2a.l2b)* p2");

  auto one = parse_machine("channels\nstate a init\n");
  auto s3 = path_schemas(one, 0, 0);
  REQUIRE(s3.size() == 1);
  CHECK(s3[0].loops.empty());
  CHECK(s3[0].segments == std::vector<std::vector<int>>{{}});
}

namespace {
// Does seq embed in the language segment0 loop1* segment1 ...?
bool embeds(const PathSchema& s, const std::vector<int>& seq) {
  std::function<bool(size_t, size_t)> go = [&](size_t part, size_t pos) -> bool {
    // part even: segment part/2, odd: loop (part-1)/2
    if (part == 2 * s.loops.size() + 1) return pos == seq.size();
    if (part % 2 == 0) {
      const auto& seg = s.segments[part / 2];
      if (pos + seg.size() > seq.size()) return false;
      for (size_t i = 0; i < seg.size(); ++i)
        if (seq[pos + i] != seg[i]) return false;
      return go(part + 1, pos + seg.size());
    }
    const auto& body = s.loops[part / 2].body;
    size_t p = pos;
    while (true) {
      if (go(part + 1, p)) return true;
      if (p + body.size() > seq.size()) return false;
      for (size_t i = 0; i < body.size(); ++i)
        if (seq[p + i] != body[i]) return false;
      p += body.size();
    }
  };
  return go(0, 0);
}
}  // namespace

TEST_CASE("every short run embeds in exactly one schema") {
  for (const char* name : {"branching_loops", "two_loops", "schema"}) {
    auto m = fixtures::load(name);
    for (int from = 0; from < (int)m.states.size(); ++from)
      for (int to = 0; to < (int)m.states.size(); ++to) {
        auto schemas = path_schemas(m, from, to);
        std::function<void(int, std::vector<int>&)> walk = [&](int v, std::vector<int>& seq) {
          if (v == to) {
            int hits = 0;
            for (const auto& s : schemas) hits += embeds(s, seq);
            CHECK(hits == 1);
          }
          if (seq.size() == 12) return;
          for (int e : m.out_edges(v)) {
            seq.push_back(e);
            walk(m.transitions[e].target, seq);
            seq.pop_back();
          }
        };
        std::vector<int> seq;
        walk(from, seq);
      }
  }
}
