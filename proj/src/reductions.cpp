#include "flatfifo/reductions.hpp"

#include <random>
#include <set>
#include <sstream>

#include "edit_internal.hpp"
#include "flatfifo/explorer.hpp"

namespace flatfifo {

using namespace detail;

// ---------------------------------------------------------------- CNF

void validate_cnf(const Cnf& f) {
  if (f.n < 0) throw ValidationError("variable count must be non-negative");
  for (const auto& c : f.clauses) {
    if (c.empty() || c.size() > 3) throw ValidationError("clauses have 1 to 3 literals");
    for (int l : c)
      if (l == 0 || std::abs(l) > f.n) throw ValidationError("literal " + std::to_string(l) + " out of range");
  }
}

Cnf parse_dimacs(const std::string& text) {
  Cnf f;
  bool header = false;
  std::vector<int> cur;
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok) || tok == "c") continue;
    if (tok == "%") break;  // end marker of some benchmark files
    if (tok == "p") {
      std::string fmt;
      int m = 0;
      if (header || !(ls >> fmt >> f.n >> m) || fmt != "cnf") throw ParseError(ln, 1, "expected 'p cnf N M'");
      header = true;
      continue;
    }
    if (!header) throw ParseError(ln, 1, "clause before the 'p cnf' header");
    ls.clear();
    ls.str(line);
    long v;
    while (ls >> v) {
      if (v == 0) {
        f.clauses.push_back(cur);
        cur.clear();
      } else {
        cur.push_back((int)v);
      }
    }
    if (!ls.eof()) throw ParseError(ln, 1, "expected integer literals");
  }
  if (!header) throw ParseError(ln, 1, "missing 'p cnf' header");
  if (!cur.empty()) f.clauses.push_back(cur);
  validate_cnf(f);
  return f;
}

std::string cnf_to_dimacs(const Cnf& f) {
  std::ostringstream o;
  o << "p cnf " << f.n << " " << f.clauses.size() << "\n";
  for (const auto& c : f.clauses) {
    for (int l : c) o << l << " ";
    o << "0\n";
  }
  return o.str();
}

// ---------------------------------------------------------------- reachability to control states

CsrReduction reach_to_csr(const FifoMachine& m, const Config& target) {
  FifoMachine r = m;
  const int nc = (int)m.channels.size();
  std::vector<Action> path;
  for (int c = 0; c < nc; ++c) {
    int hash = add_letter(r, c, "__hash@" + m.channels[c]);
    path.push_back({ActionKind::Send, c, hash});
    for (Letter a : target.contents[c]) path.push_back({ActionKind::Retrieve, c, (int)a});
    path.push_back({ActionKind::Retrieve, c, hash});
  }
  // without channels a silent step still gives a fresh q_stop
  if (path.empty()) path.push_back(Action{});
  int prev = target.state;
  for (size_t i = 0; i < path.size(); ++i) {
    int dst = add_state(r, i + 1 == path.size() ? "q_stop" : "stop" + std::to_string(i + 1));
    add_transition(r, "stop_t" + std::to_string(i + 1), prev, dst, path[i]);
    prev = dst;
  }
  r.index();
  return {r, prev};
}

ReachReduction csr_to_reach(const FifoMachine& m, int q) {
  FifoMachine r = m;
  for (int c = 0; c < (int)m.channels.size(); ++c)
    for (int a : m.channel_letters(c))
      add_transition(r, "drain_" + m.channels[c] + "_" + m.letters[a], q, q, {ActionKind::Retrieve, c, a});
  r.index();
  ReachReduction out{r, Config{q, std::vector<Word>(m.channels.size())}, is_flat(r).flat};
  return out;
}

// ---------------------------------------------------------------- 3SAT

const char* to_string(Sat3Variant v) {
  switch (v) {
    case Sat3Variant::Reach: return "reach";
    case Sat3Variant::Unbounded: return "unbounded";
    case Sat3Variant::NonTerm: return "nonterm";
    case Sat3Variant::RepeatedCSR: return "repeated-csr";
  }
  return "reach";
}

Sat3Variant sat3_variant_from_string(const std::string& s) {
  for (auto v : {Sat3Variant::Reach, Sat3Variant::Unbounded, Sat3Variant::NonTerm, Sat3Variant::RepeatedCSR})
    if (s == to_string(v)) return v;
  throw ValidationError("unknown variant '" + s + "'");
}

Sat3Instance sat3_to_flat_fifo(const Cnf& f, Sat3Variant variant) {
  validate_cnf(f);
  MachineBuilder b;
  b.rename_shared_letters();
  auto x = [](int i) { return "x" + std::to_string(i); };
  for (int i = 1; i <= f.n; ++i) b.channel(x(i)).letter(x(i), "0").letter(x(i), "1");
  int tid = 0;
  auto id = [&] { return "t" + std::to_string(++tid); };
  std::string prev = "v0";
  b.state(prev, true);
  for (int i = 1; i <= f.n; ++i) {
    std::string next = "v" + std::to_string(i);
    b.state(next);
    b.send(id(), prev, next, x(i), "0").send(id(), prev, next, x(i), "1");
    prev = next;
  }
  for (size_t j = 0; j < f.clauses.size(); ++j) {
    std::string next = "c" + std::to_string(j + 1);
    b.state(next);
    // one branch per literal, in clause order
    for (size_t k = 0; k < f.clauses[j].size(); ++k) {
      int l = f.clauses[j][k];
      std::string mid = next + "_" + std::to_string(k + 1), bit = l > 0 ? "1" : "0";
      b.state(mid);
      b.retrieve(id(), prev, mid, x(std::abs(l)), bit).send(id(), mid, next, x(std::abs(l)), bit);
    }
    prev = next;
  }
  for (int i = 1; i <= f.n; ++i) {
    std::string next = "k" + std::to_string(i);
    b.state(next);
    b.retrieve(id(), prev, next, x(i), "0").retrieve(id(), prev, next, x(i), "1");
    prev = next;
  }
  if (variant != Sat3Variant::Reach) {
    if (f.n == 0) throw ValidationError("the pumping loop needs a variable");
    b.send("pump", prev, prev, x(1), "1");
  }
  Sat3Instance inst;
  inst.machine = b.build();
  inst.variant = variant;
  inst.last = inst.machine.state_index(prev);
  inst.target = Config{inst.last, std::vector<Word>(inst.machine.channels.size())};
  return inst;
}

bool decide_sat3(const Sat3Instance& inst, int budget) {
  const auto& m = inst.machine;
  auto init = m.initial_config();
  switch (inst.variant) {
    case Sat3Variant::Reach: return decide_reachability(m, init, inst.target, budget);
    case Sat3Variant::Unbounded: return decide_unboundedness(m, init, budget);
    case Sat3Variant::NonTerm: return decide_nontermination(m, init, budget);
    case Sat3Variant::RepeatedCSR: return decide_repeated_csr(m, init, inst.last, budget);
  }
  return false;
}

// ---------------------------------------------------------------- repeated control states

RcsrGadget rcsr_gadget(const FifoMachine& m, int q, const std::vector<std::optional<Decomposition>>& witnesses) {
  if (!is_flat(m).flat) throw NotFlat(is_flat(m).vertex);
  auto l = loop_of(m, q);
  if (!l) throw NoLoopAt(m.states[q]);
  const int nc = (int)m.channels.size();
  if ((int)witnesses.size() != nc) throw BadWitness("one entry per channel expected");
  FifoMachine r = m;
  // primed channels with primed copies of the letters
  std::vector<int> primed(nc);
  std::vector<int> letter_p(m.letters.size(), -1);
  for (int c = 0; c < nc; ++c) {
    primed[c] = add_channel(r, m.channels[c] + "__p");
    for (int a : m.channel_letters(c)) letter_p[a] = add_letter(r, primed[c], m.letters[a] + "__p");
  }
  int cur = q;
  auto edge = [&](int src, int dst, Action a) { add_transition(r, "g_t", src, dst, a); };
  auto chain = [&](int from, const std::vector<Action>& acts, int to) {
    int s = from;
    for (size_t i = 0; i < acts.size(); ++i) {
      int d = i + 1 == acts.size() ? to : add_state(r, "g_s");
      edge(s, d, acts[i]);
      s = d;
    }
  };
  auto move = [&](int c, const Word& w) {
    std::vector<Action> acts;
    for (Letter a : w) {
      acts.push_back({ActionKind::Retrieve, c, (int)a});
      acts.push_back({ActionKind::Send, primed[c], letter_p[a]});
    }
    return acts;
  };
  for (int c = 0; c < nc; ++c) {
    auto [x, y] = loop_projection(m, *l, c);
    if (x.empty()) continue;
    const auto& d = witnesses[c];
    const std::string ch = m.channels[c];
    if (!d) throw BadWitness("channel " + ch + " needs a decomposition");
    if (x.size() > y.size()) throw BadWitness("the loop shrinks channel " + ch);
    if (d->z.empty() || d->x_prime + d->x_dprime != x || d->x_dprime + d->x_prime != power(d->z, d->j) ||
        y != power(d->z, d->k))
      throw BadWitness("decomposition does not fit channel " + ch);
    int hash = add_letter(r, c, "__hash@" + ch);
    int a = add_state(r, "g_" + ch + "_loop");
    edge(cur, a, {ActionKind::Send, c, hash});
    chain(a, move(c, x), a);
    int b = add_state(r, "g_" + ch + "_rest");
    auto rest = move(c, d->x_prime);
    if (rest.empty())
      edge(a, b, Action{});
    else
      chain(a, rest, b);
    int e = add_state(r, "g_" + ch + "_done");
    edge(b, e, {ActionKind::Retrieve, c, hash});
    cur = e;
  }
  // sigma on the primed channels
  std::vector<Action> sigma;
  for (int t : l->body) {
    Action a = m.transitions[t].action;
    if (a.kind != ActionKind::Internal) a = {a.kind, primed[a.channel], letter_p[a.letter]};
    sigma.push_back(a);
  }
  int qf = add_state(r, "q_f");
  chain(cur, sigma, qf);
  r.index();
  return {r, qf};
}

std::vector<std::vector<std::optional<Decomposition>>> rcsr_witness_choices(const FifoMachine& m, int q) {
  auto l = loop_of(m, q);
  if (!l) throw NoLoopAt(m.states[q]);
  std::vector<std::vector<std::optional<Decomposition>>> out{{}};
  for (int c = 0; c < (int)m.channels.size(); ++c) {
    auto [x, y] = loop_projection(m, *l, c);
    std::vector<std::optional<Decomposition>> opts;
    if (x.empty())
      opts.push_back(std::nullopt);
    else if (x.size() <= y.size())
      for (auto& d : candidate_splits(x, y)) opts.push_back(d);
    std::vector<std::vector<std::optional<Decomposition>>> next;
    for (const auto& pre : out)
      for (const auto& o : opts) {
        next.push_back(pre);
        next.back().push_back(o);
      }
    out = std::move(next);
  }
  return out;
}

// ---------------------------------------------------------------- corpus

namespace {

// Spine states with loops hung on them; a loop state may also leave forward to the next spine state.
FifoMachine random_machine(std::mt19937_64& rng, const CorpusParams& p) {
  auto pick = [&](int lo, int hi) { return hi <= lo ? lo : lo + (int)(rng() % (std::uint64_t)(hi - lo + 1)); };
  int nc = pick(1, std::max(1, p.max_channels));
  int total = pick(1, std::max(1, p.max_states));
  int spine = pick(1, total);
  MachineBuilder b;
  b.rename_shared_letters();
  std::vector<std::string> chans;
  std::vector<int> nletters;
  for (int c = 0; c < nc; ++c) {
    chans.push_back("c" + std::to_string(c));
    b.channel(chans.back());
    nletters.push_back(pick(1, std::max(1, p.alphabet)));
    for (int a = 0; a < nletters.back(); ++a) b.letter(chans.back(), std::string(1, (char)('a' + a)));
  }
  int tid = 0;
  auto id = [&] { return "t" + std::to_string(++tid); };
  auto act = [&](const std::string& s, const std::string& d) {
    int k = pick(0, 4), c = pick(0, nc - 1);
    std::string l(1, (char)('a' + pick(0, nletters[c] - 1)));
    if (k == 0)
      b.internal(id(), s, d);
    else if (k <= 2)
      b.send(id(), s, d, chans[c], l);
    else
      b.retrieve(id(), s, d, chans[c], l);
  };
  auto sp = [](int i) { return "s" + std::to_string(i); };
  for (int i = 0; i < spine; ++i) b.state(sp(i), i == 0);
  for (int i = 0; i + 1 < spine; ++i) act(sp(i), sp(i + 1));
  for (int i = 0; i + 2 < spine; ++i)
    if (pick(0, 2) == 0) act(sp(i), sp(i + 2));
  int spare = total - spine, loops = 0;
  for (int i = 0; i < spine && loops < p.max_loops; ++i) {
    if (pick(0, 2) == 0) continue;
    int len = pick(1, std::min(3, spare + 1));
    spare -= len - 1;
    ++loops;
    std::string prev = sp(i);
    for (int j = 1; j < len; ++j) {
      std::string mid = "l" + std::to_string(i) + "_" + std::to_string(j);
      b.state(mid);
      act(prev, mid);
      if (i + 1 < spine && pick(0, 3) == 0) act(mid, sp(i + 1));
      prev = mid;
    }
    act(prev, sp(i));
  }
  return b.build();
}

// Some cycle of the explored graph: a run that never has to stop.
bool graph_has_cycle(const ReachGraph& g) {
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

}  // namespace

std::vector<CorpusEntry> gen_corpus(std::uint64_t seed, const CorpusParams& p) {
  std::mt19937_64 rng(seed);
  std::vector<CorpusEntry> out;
  ExploreBounds bounds;
  bounds.max_configs = 5000;
  bounds.max_channel_len = 8;
  for (int i = 0; i < p.count; ++i) {
    CorpusEntry e;
    e.name = "corpus_" + std::to_string(seed) + "_" + std::to_string(i);
    e.machine = random_machine(rng, p);
    const auto& m = e.machine;
    auto g = explore(m, m.initial_config(), Semantics::Perfect, bounds);
    auto verdict = [](bool known, bool yes) { return !known ? "unknown" : yes ? "yes" : "no"; };
    std::vector<char> seen(m.states.size(), 0);
    for (size_t k = 0; k < g.size(); ++k) seen[g.nodes[k][0]] = 1;
    nlohmann::json csr = nlohmann::json::object();
    for (size_t q = 0; q < m.states.size(); ++q) csr[m.states[q]] = verdict(seen[q] || !g.truncated, seen[q]);
    bool cycle = graph_has_cycle(g);
    e.annotations = {{"csr", csr},
                     {"bounded", verdict(!g.truncated, true)},
                     {"terminating", verdict(cycle || !g.truncated, !cycle)},
                     {"configs", g.size()}};
    // boundedness stays unknown whenever the bounds cut the graph, so it does not count here
    e.conclusive = e.annotations["terminating"] != "unknown";
    for (auto& [k, v] : csr.items()) e.conclusive = e.conclusive && v != "unknown";
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace flatfifo
