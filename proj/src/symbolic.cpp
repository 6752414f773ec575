#include "flatfifo/symbolic.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <set>
#include <unordered_map>

#include "flatfifo/words.hpp"

namespace flatfifo {

// ---------------------------------------------------------------- descriptors

namespace {

Segment literal(Word w) { return Segment{std::move(w), {}, {}}; }
Segment block(Word root, Affine count) { return Segment{{}, std::move(root), std::move(count)}; }

// Pushes literal mass to the right of blocks, expands constant blocks and merges neighbours.
bool normalize_desc(ContentDescriptor& d) {
  bool changed = true;
  while (changed) {
    changed = false;
    std::vector<Segment> out;
    for (auto seg : d.parts) {
      if (seg.block() && seg.count.is_const()) {
        if (seg.count.c < 0) return false;
        seg = literal(power(seg.root, seg.count.c));
        changed = true;
      }
      if (!seg.block() && seg.lit.empty()) {
        changed = true;
        continue;
      }
      if (!out.empty()) {
        auto& b = out.back();
        if (!b.block() && !seg.block()) {
          b.lit += seg.lit;
          changed = true;
          continue;
        }
        if (b.block() && seg.block() && b.root == seg.root) {
          b.count += seg.count;
          changed = true;
          continue;
        }
      }
      out.push_back(std::move(seg));
    }
    for (size_t i = 0; i < out.size(); ++i) {
      if (!out[i].block()) continue;
      if (i > 0 && !out[i - 1].block()) {
        Word u = out[i].root;
        Word& L = out[i - 1].lit;
        while (L.size() >= u.size() && L.compare(L.size() - u.size(), u.size(), u) == 0) {
          L.resize(L.size() - u.size());
          out[i].count += Affine::constant(1);
          changed = true;
        }
        // L's (rs)^e = L' (sr)^e s for the longest proper suffix s of the root
        for (size_t s = u.size() - 1; s >= 1; --s) {
          if (L.size() < s || L.compare(L.size() - s, s, u, u.size() - s, s) != 0) continue;
          Word suf = u.substr(u.size() - s);
          L.resize(L.size() - s);
          out[i].root = suf + u.substr(0, u.size() - s);
          if (i + 1 < out.size() && !out[i + 1].block()) out[i + 1].lit = suf + out[i + 1].lit;
          else out.insert(out.begin() + (long)i + 1, literal(suf));
          changed = true;
          break;
        }
      }
      if (i + 1 < out.size() && !out[i + 1].block()) {
        const Word u = out[i].root;
        Word& R = out[i + 1].lit;
        while (R.size() >= u.size() && R.compare(0, u.size(), u) == 0) {
          R.erase(0, u.size());
          out[i].count += Affine::constant(1);
          changed = true;
        }
      }
    }
    d.parts = std::move(out);
  }
  return true;
}

Int gcd_of(const Affine& e) {
  Int g = 0;
  for (const auto& [p, k] : e.t) g = std::gcd(g, k < 0 ? -k : k);
  return g;
}

Int floordiv(Int a, Int b) {
  Int q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

void subst_all(SymbolicConfig& s, int p, const Affine& by) {
  for (auto& ch : s.chans)
    for (auto& seg : ch.parts)
      if (seg.block()) seg.count = seg.count.subst(p, by);
  for (auto& c : s.cons) c.e = c.e.subst(p, by);
  for (auto& t : s.trace) t.times = t.times.subst(p, by);
}

void append_trace(SymbolicConfig& s, int t) {
  if (!s.trace.empty() && s.trace.back().times == Affine::constant(1)) {
    s.trace.back().seq.push_back(t);
    return;
  }
  s.trace.push_back({{t}, Affine::constant(1)});
}

Constraint nonneg(const Affine& e) { return {e, false}; }

}  // namespace

bool same_family(const SymbolicConfig& a, const SymbolicConfig& b) {
  return a.state == b.state && a.chans == b.chans && a.cons == b.cons;
}

std::vector<int> params_of(const SymbolicConfig& s) {
  std::set<int> ps;
  for (const auto& ch : s.chans)
    for (const auto& seg : ch.parts)
      for (const auto& [p, k] : seg.count.t) ps.insert(p);
  for (const auto& c : s.cons)
    for (const auto& [p, k] : c.e.t) ps.insert(p);
  for (const auto& t : s.trace)
    for (const auto& [p, k] : t.times.t) ps.insert(p);
  return {ps.begin(), ps.end()};
}

Word expand(const ContentDescriptor& d, const std::map<int, Int>& v) {
  Word w;
  for (const auto& seg : d.parts) w += seg.block() ? power(seg.root, seg.count.eval(v)) : seg.lit;
  return w;
}

Config concretize(const SymbolicConfig& s, const std::map<int, Int>& v) {
  Config c{s.state, {}};
  for (const auto& d : s.chans) c.contents.push_back(expand(d, v));
  return c;
}

std::vector<int> concretize_trace(const std::vector<TraceItem>& t, const std::map<int, Int>& v) {
  std::vector<int> run;
  for (const auto& it : t) {
    Int n = it.times.eval(v);
    for (Int i = 0; i < n; ++i) run.insert(run.end(), it.seq.begin(), it.seq.end());
  }
  return run;
}

std::vector<Config> enumerate_members(const SymbolicConfig& s, Int max_value) {
  auto ps = params_of(s);
  std::vector<Config> out;
  std::map<int, Int> v;
  for (int p : ps) v[p] = 0;
  while (true) {
    bool ok = true;
    for (const auto& c : s.cons) {
      Int x = c.e.eval(v);
      ok = ok && (c.eq ? x == 0 : x >= 0);
    }
    for (const auto& ch : s.chans)
      for (const auto& seg : ch.parts) ok = ok && (!seg.block() || seg.count.eval(v) >= 0);
    if (ok) out.push_back(concretize(s, v));
    size_t i = 0;
    for (; i < ps.size(); ++i) {
      if (++v[ps[i]] <= max_value) break;
      v[ps[i]] = 0;
    }
    if (i == ps.size()) break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::string descriptor_text(const FifoMachine& m, const ContentDescriptor& d) {
  if (d.parts.empty()) return "eps";
  std::string s;
  for (const auto& seg : d.parts) {
    if (!s.empty()) s += ' ';
    s += seg.block() ? "(" + word_text(m, seg.root) + ")^{" + seg.count.str() + "}" : word_text(m, seg.lit);
  }
  return s;
}

nlohmann::json symbolic_to_json(const FifoMachine& m, const SymbolicConfig& s) {
  nlohmann::json j;
  j["state"] = m.states[s.state];
  j["channels"] = nlohmann::json::array();
  for (const auto& d : s.chans) j["channels"].push_back(descriptor_text(m, d));
  j["constraints"] = nlohmann::json::array();
  for (const auto& c : s.cons) j["constraints"].push_back(c.str());
  auto ps = params_of(s);
  j["parameters"] = nlohmann::json::array();
  for (int p : ps) j["parameters"].push_back("n" + std::to_string(p));
  return j;
}

// ---------------------------------------------------------------- engine

SymbolicEngine::SymbolicEngine(const FifoMachine& m, int budget) : m_(m), budget_(budget) {}

void SymbolicEngine::reserve_params(const SymbolicConfig& s) {
  for (int p : params_of(s)) next_param_ = std::max(next_param_, p + 1);
}

SymbolicConfig SymbolicEngine::lift(const Config& c) const {
  SymbolicConfig s;
  s.state = c.state;
  for (const auto& w : c.contents) {
    ContentDescriptor d;
    if (!w.empty()) d.parts.push_back(literal(w));
    s.chans.push_back(d);
  }
  return s;
}

std::optional<SymbolicConfig> SymbolicEngine::simplify(SymbolicConfig s) const {
  // eliminate equalities that have a unit coefficient
  while (true) {
    bool did = false;
    for (size_t i = 0; i < s.cons.size() && !did; ++i) {
      if (!s.cons[i].eq) continue;
      for (const auto& [p, k] : s.cons[i].e.t) {
        if (k != 1 && k != -1) continue;
        Affine rest = s.cons[i].e - Affine::var(p, k);
        Affine by = rest * (-k);
        int param = p;
        s.cons.erase(s.cons.begin() + (long)i);
        subst_all(s, param, by);
        s.cons.push_back(nonneg(by));
        did = true;
        break;
      }
    }
    if (!did) break;
  }
  std::map<std::map<int, Int>, Int> ineq;
  std::set<Constraint> eqs;
  for (auto c : s.cons) {
    if (c.e.is_const()) {
      if (c.eq ? c.e.c != 0 : c.e.c < 0) return std::nullopt;
      continue;
    }
    Int g = gcd_of(c.e);
    if (c.eq) {
      if (c.e.c % g != 0) return std::nullopt;
      for (auto& [p, k] : c.e.t) k /= g;
      c.e.c /= g;
      if (c.e.t.begin()->second < 0) c.e *= -1;
      eqs.insert(c);
      continue;
    }
    for (auto& [p, k] : c.e.t) k /= g;
    c.e.c = floordiv(c.e.c, g);
    bool trivial = c.e.c >= 0;
    for (const auto& [p, k] : c.e.t) trivial = trivial && k > 0;
    if (trivial) continue;
    auto it = ineq.find(c.e.t);
    if (it == ineq.end()) ineq.emplace(c.e.t, c.e.c);
    else it->second = std::min(it->second, c.e.c);
  }
  s.cons.assign(eqs.begin(), eqs.end());
  for (const auto& [t, c] : ineq) s.cons.push_back({Affine{c, t}, false});
  std::sort(s.cons.begin(), s.cons.end());
  for (auto& d : s.chans)
    if (!normalize_desc(d)) return std::nullopt;
  if (!ilp_feasible(s.cons)) return std::nullopt;
  return s;
}

namespace {
std::vector<SymbolicConfig> retrieve(const SymbolicEngine& e, SymbolicConfig s, int c, Letter a) {
  auto& parts = s.chans[c].parts;
  if (parts.empty()) return {};
  Segment f = parts[0];
  if (!f.block()) {
    if (f.lit[0] != a) return {};
    parts[0].lit.erase(0, 1);
    normalize_desc(s.chans[c]);
    std::vector<SymbolicConfig> out;
    out.push_back(std::move(s));
    return out;
  }
  std::vector<SymbolicConfig> out;
  {
    SymbolicConfig z = s;
    z.chans[c].parts.erase(z.chans[c].parts.begin());
    z.cons.push_back({f.count, true});
    if (auto zs = e.simplify(z))
      for (auto& r : retrieve(e, *zs, c, a)) out.push_back(std::move(r));
  }
  if (f.root[0] == a) {
    SymbolicConfig o = s;
    auto& ps = o.chans[c].parts;
    Affine rest = f.count - Affine::constant(1);
    ps[0] = block(f.root, rest);
    ps.insert(ps.begin(), literal(f.root.substr(1)));
    o.cons.push_back(nonneg(rest));
    if (auto os = e.simplify(o)) out.push_back(std::move(*os));
  }
  return out;
}
}  // namespace

bool SymbolicEngine::may_fire(const SymbolicConfig& s, int ti) const {
  const Transition& t = m_.transitions[ti];
  if (s.state != t.source) return false;
  if (t.action.kind != ActionKind::Retrieve) return true;
  // empty channel or a literal head with another letter
  const auto& parts = s.chans[t.action.channel].parts;
  return !parts.empty() && (parts[0].block() || parts[0].lit[0] == static_cast<Letter>(t.action.letter));
}

std::vector<SymbolicConfig> SymbolicEngine::post(const SymbolicConfig& s, int ti) const {
  if (!may_fire(s, ti)) return {};
  return post(SymbolicConfig(s), ti);
}

std::vector<SymbolicConfig> SymbolicEngine::post(SymbolicConfig&& s, int ti) const {
  if (!may_fire(s, ti)) return {};
  const Transition& t = m_.transitions[ti];
  const Action& a = t.action;
  SymbolicConfig n = std::move(s);
  n.state = t.target;
  if (traces_) append_trace(n, ti);
  if (a.kind == ActionKind::Send) {
    n.chans[a.channel].parts.push_back(literal(Word(1, static_cast<Letter>(a.letter))));
    normalize_desc(n.chans[a.channel]);
  }
  if (a.kind != ActionKind::Retrieve) {
    std::vector<SymbolicConfig> out;
    out.push_back(std::move(n));
    return out;
  }
  return retrieve(*this, std::move(n), a.channel, static_cast<Letter>(a.letter));
}

std::vector<SymbolicConfig> SymbolicEngine::post_seq(const SymbolicConfig& s, const std::vector<int>& seq) const {
  std::vector<SymbolicConfig> cur{s};
  for (int t : seq) {
    std::vector<SymbolicConfig> next;
    for (const auto& c : cur)
      for (auto& n : post(c, t)) next.push_back(std::move(n));
    cur = std::move(next);
    if (cur.size() > kUnionCap) throw UnionCapExceeded(kUnionCap);
  }
  return cur;
}

namespace {

// L0 B1 L1 ... Bk Lk with possibly empty literals.
struct Aligned {
  std::vector<Word> lits;
  std::vector<Segment> blocks;
};

Aligned align(const ContentDescriptor& d) {
  Aligned a;
  a.lits.push_back({});
  for (const auto& seg : d.parts) {
    if (seg.block()) {
      a.blocks.push_back(seg);
      a.lits.push_back({});
    } else {
      a.lits.back() += seg.lit;
    }
  }
  return a;
}

struct Insertion {
  size_t pos;
  Word v;
};

// Ways to obtain `to` from `from` by inserting one non-empty word; end position first.
std::vector<Insertion> insertions(const Word& from, const Word& to) {
  std::vector<Insertion> out;
  if (to.size() <= from.size()) return out;
  size_t len = to.size() - from.size();
  for (size_t k = 0; k <= from.size(); ++k) {
    size_t pos = from.size() - k;
    if (to.compare(0, pos, from, 0, pos) != 0) continue;
    if (to.compare(pos + len, std::u32string::npos, from, pos) != 0) continue;
    out.push_back({pos, to.substr(pos, len)});
  }
  return out;
}

bool subsumed_by(const SymbolicConfig& n, const std::vector<SymbolicConfig>& result) {
  for (const auto& r : result)
    if (r.state == n.state && r.chans == n.chans && ilp_entails(n.cons, r.cons)) return true;
  return false;
}

}  // namespace

std::optional<SymbolicConfig> SymbolicEngine::generalize(const SymbolicConfig& f, const SymbolicConfig& n,
                                                         const ElementaryLoop& l,
                                                         std::vector<SymbolicConfig>& escapes) {
  size_t nc = f.chans.size();
  std::vector<Aligned> af(nc), an(nc);
  std::vector<std::vector<Affine>> delta(nc);
  // per channel and literal: candidate insertions (empty list means literal unchanged)
  std::vector<std::vector<std::vector<Insertion>>> ins(nc);
  bool moves = false;
  for (size_t c = 0; c < nc; ++c) {
    af[c] = align(f.chans[c]);
    an[c] = align(n.chans[c]);
    if (af[c].blocks.size() != an[c].blocks.size()) return std::nullopt;
    for (size_t i = 0; i < af[c].blocks.size(); ++i) {
      if (af[c].blocks[i].root != an[c].blocks[i].root) return std::nullopt;
      Affine d = an[c].blocks[i].count - af[c].blocks[i].count;
      if (!d.is_const()) return std::nullopt;
      moves = moves || d.c != 0;
      delta[c].push_back(d);
    }
    ins[c].resize(af[c].lits.size());
    for (size_t i = 0; i < af[c].lits.size(); ++i) {
      if (af[c].lits[i] == an[c].lits[i]) continue;
      ins[c][i] = insertions(af[c].lits[i], an[c].lits[i]);
      if (ins[c][i].empty()) return std::nullopt;
      moves = true;
    }
  }
  if (!moves) return std::nullopt;

  // choice[c][i] indexes ins[c][i]; start with all end positions, then vary one literal at a time
  std::vector<std::vector<std::vector<size_t>>> choices;
  std::vector<std::vector<size_t>> base(nc);
  for (size_t c = 0; c < nc; ++c) base[c].assign(af[c].lits.size(), 0);
  choices.push_back(base);
  for (size_t c = 0; c < nc; ++c)
    for (size_t i = 0; i < ins[c].size(); ++i)
      for (size_t k = 1; k < ins[c][i].size(); ++k) {
        auto ch = base;
        ch[c][i] = k;
        choices.push_back(ch);
      }

  int p = fresh();
  Affine P = Affine::var(p);
  for (const auto& choice : choices) {
    SymbolicConfig g;
    g.state = f.state;
    g.cons = f.cons;
    if (traces_) {
      g.trace = f.trace;
      g.trace.push_back({l.body, P});
    }
    for (size_t c = 0; c < nc; ++c) {
      ContentDescriptor d;
      for (size_t i = 0; i < af[c].lits.size(); ++i) {
        const Word& L = af[c].lits[i];
        if (ins[c][i].empty()) {
          d.parts.push_back(literal(L));
        } else {
          const auto& in = ins[c][i][choice[c][i]];
          auto [z, e] = primitive_root(in.v);
          d.parts.push_back(literal(L.substr(0, in.pos)));
          d.parts.push_back(block(z, P * e));
          d.parts.push_back(literal(L.substr(in.pos)));
        }
        if (i < af[c].blocks.size()) {
          Affine cnt = af[c].blocks[i].count + P * delta[c][i].c;
          d.parts.push_back(block(af[c].blocks[i].root, cnt));
          g.cons.push_back(nonneg(cnt));
        }
      }
      g.chans.push_back(d);
    }
    auto gs = simplify(g);
    if (!gs) continue;
    // p = 0 must give back f
    SymbolicConfig g0 = *gs;
    subst_all(g0, p, Affine::constant(0));
    auto g0s = simplify(g0);
    if (!g0s || g0s->chans != f.chans || !ilp_entails(f.cons, g0s->cons)) continue;
    // one more iteration of sigma must land on g[p := p + 1]
    SymbolicConfig g1 = *gs;
    subst_all(g1, p, P + Affine::constant(1));
    auto g1s = simplify(g1);
    if (!g1s) continue;
    auto branches = post_seq(*gs, l.body);
    int hit = -1;
    for (size_t b = 0; b < branches.size() && hit < 0; ++b)
      if (branches[b].state == g1s->state && branches[b].chans == g1s->chans &&
          ilp_entails(g1s->cons, branches[b].cons))
        hit = (int)b;
    if (hit < 0) continue;
    escapes.clear();
    for (size_t b = 0; b < branches.size(); ++b)
      if ((int)b != hit) escapes.push_back(std::move(branches[b]));
    return gs;
  }
  return std::nullopt;
}

std::vector<SymbolicConfig> SymbolicEngine::accelerate(const std::vector<SymbolicConfig>& S, const ElementaryLoop& l) {
  std::vector<SymbolicConfig> result;
  std::deque<std::pair<SymbolicConfig, int>> frontier;
  for (const auto& s : S) {
    reserve_params(s);
    if (subsumed_by(s, result)) continue;
    result.push_back(s);
    frontier.emplace_back(s, 0);
  }
  while (!frontier.empty()) {
    auto [f, depth] = std::move(frontier.front());
    frontier.pop_front();
    if (depth >= budget_) throw AccelerationBudgetExceeded(budget_);
    for (auto& n : post_seq(f, l.body)) {
      if (subsumed_by(n, result)) continue;
      std::vector<SymbolicConfig> escapes;
      if (auto g = generalize(f, n, l, escapes)) {
        std::erase_if(result, [&](const SymbolicConfig& r) { return same_family(r, f); });
        if (!subsumed_by(*g, result)) result.push_back(*g);
        for (auto& e : escapes) {
          if (subsumed_by(e, result)) continue;
          result.push_back(e);
          frontier.emplace_back(std::move(e), depth + 1);
        }
      } else {
        result.push_back(n);
        frontier.emplace_back(std::move(n), depth + 1);
      }
      if (result.size() > kUnionCap) throw UnionCapExceeded(kUnionCap);
    }
  }
  return result;
}

namespace {
void mix(std::size_t& h, std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); }

void mix_affine(std::size_t& h, const Affine& e) {
  mix(h, std::hash<Int>{}(e.c));
  for (const auto& [p, k] : e.t) {
    mix(h, std::hash<int>{}(p));
    mix(h, std::hash<Int>{}(k));
  }
}

std::size_t family_hash(const SymbolicConfig& s) {
  std::size_t h = 0;
  for (const auto& d : s.chans) {
    mix(h, d.parts.size());
    for (const auto& seg : d.parts) {
      for (Letter a : seg.lit) mix(h, a);
      mix(h, 0xffffffff);
      if (!seg.block()) continue;
      for (Letter a : seg.root) mix(h, a);
      mix_affine(h, seg.count);
    }
  }
  for (const auto& c : s.cons) {
    mix(h, c.eq);
    mix_affine(h, c.e);
  }
  return h;
}

// Families deduplicated on contents and constraints; the trace of the first arrival is kept.
struct FamilySet {
  std::vector<SymbolicConfig> items;
  std::unordered_multimap<std::size_t, std::size_t> index;

  bool insert(SymbolicConfig s) {
    std::size_t h = family_hash(s);
    auto [lo, hi] = index.equal_range(h);
    for (auto it = lo; it != hi; ++it)
      if (same_family(items[it->second], s)) return false;
    index.emplace(h, items.size());
    items.push_back(std::move(s));
    return true;
  }
};
}  // namespace

// Components are visited in topological order, so every state sees the union of all families that enter it
// before anything leaves it; joins of a branching graph are then explored once.
ReachMap SymbolicEngine::reach_set(const Config& init, const std::optional<std::set<int>>& keep) {
  auto fr = is_flat(m_);
  if (!fr.flat) throw NotFlat(fr.vertex);
  const int n = (int)m_.states.size();
  std::vector<std::pair<int, int>> edges;
  for (const auto& t : m_.transitions) edges.emplace_back(t.source, t.target);
  auto comp = scc_ids(n, edges);
  int nc = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
  std::vector<int> indeg(nc, 0);
  std::vector<std::set<int>> succ(nc);
  for (auto [a, b] : edges)
    if (comp[a] != comp[b] && succ[comp[a]].insert(comp[b]).second) ++indeg[comp[b]];
  std::vector<int> order;
  for (int c = 0; c < nc; ++c)
    if (!indeg[c]) order.push_back(c);
  for (size_t i = 0; i < order.size(); ++i)
    for (int d : succ[order[i]])
      if (!--indeg[d]) order.push_back(d);
  std::vector<std::vector<int>> members(nc);
  for (int q = 0; q < n; ++q) members[comp[q]].push_back(q);
  std::vector<bool> cyclic(nc, false);
  for (int c = 0; c < nc; ++c) cyclic[c] = members[c].size() > 1;
  for (auto [a, b] : edges)
    if (a == b) cyclic[comp[a]] = true;

  ReachMap out;
  std::vector<FamilySet> pending(n);
  auto record = [&](int q, const std::vector<SymbolicConfig>& S) {
    if (keep && !keep->count(q)) return;
    FamilySet seen;
    auto& v = out[q];
    for (auto& x : v) seen.insert(x);
    for (const auto& x : S)
      if (seen.insert(x)) v.push_back(x);
  };
  auto push = [&](int q, std::vector<SymbolicConfig> S) {
    for (auto& x : S) pending[q].insert(std::move(x));
    if (pending[q].items.size() > kStateUnionCap) throw UnionCapExceeded(kStateUnionCap);
  };
  auto post_all = [&](const std::vector<SymbolicConfig>& S, int e) {
    std::vector<SymbolicConfig> r;
    for (const auto& s : S)
      for (auto& x : post(s, e)) r.push_back(std::move(x));
    return r;
  };
  push(init.state, {lift(init)});
  for (int c : order)
    for (int v : members[c]) {
      // nothing enters v after its component is processed
      auto S = std::move(pending[v].items);
      pending[v] = FamilySet{};
      if (S.empty()) continue;
      auto l = cyclic[c] ? loop_of(m_, v) : std::nullopt;
      if (!l) {
        record(v, S);
        const auto& outs = m_.out_edges(v);
        std::vector<int> viable;
        for (auto& x : S) {
          viable.clear();
          for (int e : outs)
            if (may_fire(x, e)) viable.push_back(e);
          // the last viable edge takes the family itself
          for (size_t i = 0; i < viable.size(); ++i) {
            int e = viable[i];
            push(m_.transitions[e].target, i + 1 < viable.size() ? post(x, e) : post(std::move(x), e));
          }
        }
        continue;
      }
      auto A = accelerate(S, *l);
      int u = v;
      for (int t : l->body) {
        record(u, A);
        for (int e : m_.out_edges(u))
          if (comp[m_.transitions[e].target] != c) push(m_.transitions[e].target, post_all(A, e));
        A = post_all(A, t);
        u = m_.transitions[t].target;
      }
    }
  return out;
}

std::optional<std::map<int, Int>> SymbolicEngine::member(const SymbolicConfig& s, const Config& c) const {
  if (s.state != c.state) return std::nullopt;
  std::optional<std::map<int, Int>> found;
  std::vector<Constraint> eqs;
  std::function<void(size_t, size_t, size_t)> match = [&](size_t ch, size_t part, size_t pos) {
    if (found) return;
    if (ch == s.chans.size()) {
      auto cs = s.cons;
      cs.insert(cs.end(), eqs.begin(), eqs.end());
      found = ilp_solve(cs);
      return;
    }
    const auto& parts = s.chans[ch].parts;
    const Word& w = c.contents[ch];
    if (part == parts.size()) {
      if (pos == w.size()) match(ch + 1, 0, 0);
      return;
    }
    const Segment& seg = parts[part];
    if (!seg.block()) {
      if (w.compare(pos, seg.lit.size(), seg.lit) == 0 && pos + seg.lit.size() <= w.size())
        match(ch, part + 1, pos + seg.lit.size());
      return;
    }
    size_t k = 0, p = pos;
    while (true) {
      eqs.push_back({seg.count - Affine::constant((Int)k), true});
      match(ch, part + 1, p);
      eqs.pop_back();
      if (found || p + seg.root.size() > w.size() || w.compare(p, seg.root.size(), seg.root) != 0) break;
      p += seg.root.size();
      ++k;
    }
  };
  match(0, 0, 0);
  return found;
}

std::vector<SymbolicConfig> SymbolicEngine::restrict_to(const SymbolicConfig& s, int c, const Word& x, const Word& xp) {
  // DFA for x^* x': state (i, seen a full copy) encoded 2i + full, -1 dead
  const int n = (int)x.size();
  const bool need_full = xp.size() == x.size();
  const int acc_pos = (int)(xp.size() % x.size());
  auto delta = [&](int st, Letter a) {
    if (st < 0) return -1;
    int i = st / 2, full = st % 2;
    if (x[i] != a) return -1;
    ++i;
    if (i == n) return 1;
    return 2 * i + full;
  };
  auto run = [&](int st, const Word& w) {
    for (Letter a : w) st = delta(st, a);
    return st;
  };
  auto accepting = [&](int st) { return st >= 0 && st / 2 == acc_pos && (!need_full || st % 2 == 1); };

  std::vector<SymbolicConfig> out;
  const auto& parts = s.chans[c].parts;
  std::vector<Constraint> extra;
  std::function<void(size_t, int)> go = [&](size_t i, int st) {
    if (st < 0) return;
    if (i == parts.size()) {
      if (!accepting(st)) return;
      SymbolicConfig r = s;
      r.cons.insert(r.cons.end(), extra.begin(), extra.end());
      if (auto rs = simplify(r)) out.push_back(std::move(*rs));
      return;
    }
    const Segment& seg = parts[i];
    if (!seg.block()) {
      go(i + 1, run(st, seg.lit));
      return;
    }
    // orbit of the block root: tail lambda, cycle pi
    std::vector<int> orbit{st};
    std::map<int, int> seen{{st, 0}};
    int lambda = 0, pi = 0;
    while (true) {
      int nx = run(orbit.back(), seg.root);
      auto it = seen.find(nx);
      if (it != seen.end()) {
        lambda = it->second;
        pi = (int)orbit.size() - lambda;
        break;
      }
      seen[nx] = (int)orbit.size();
      orbit.push_back(nx);
    }
    for (int v = 0; v < lambda; ++v) {
      extra.push_back({seg.count - Affine::constant(v), true});
      go(i + 1, orbit[v]);
      extra.pop_back();
    }
    for (int r = 0; r < pi; ++r) {
      int t = fresh();
      extra.push_back({seg.count - Affine::constant(lambda + r) - Affine::var(t, pi), true});
      go(i + 1, orbit[lambda + r]);
      extra.pop_back();
    }
  };
  go(0, 0);
  return out;
}

// ---------------------------------------------------------------- free functions and decisions

std::vector<SymbolicConfig> sym_post(const FifoMachine& m, const SymbolicConfig& s, int t) {
  return SymbolicEngine(m).post(s, t);
}

std::vector<SymbolicConfig> sym_accelerate(const FifoMachine& m, const std::vector<SymbolicConfig>& S,
                                           const ElementaryLoop& l, int budget) {
  SymbolicEngine e(m, budget);
  return e.accelerate(S, l);
}

ReachMap reach_set(const FifoMachine& m, const Config& init, int budget) {
  SymbolicEngine e(m, budget);
  return e.reach_set(init);
}

bool decide_reachability(const FifoMachine& m, const Config& init, const Config& target, int budget,
                         ReachWitness* witness) {
  SymbolicEngine e(m, budget);
  e.set_traces(witness != nullptr);
  auto r = e.reach_set(init, std::set<int>{target.state});
  auto it = r.find(target.state);
  if (it == r.end()) return false;
  for (const auto& s : it->second) {
    auto v = e.member(s, target);
    if (!v) continue;
    if (witness) {
      witness->skeleton.clear();
      for (const auto& t : s.trace) witness->skeleton.emplace_back(t.seq, t.times.eval(*v));
      witness->run = concretize_trace(s.trace, *v);
    }
    return true;
  }
  return false;
}

bool decide_csr(const FifoMachine& m, const Config& init, int q, int budget) {
  SymbolicEngine e(m, budget);
  e.set_traces(false);
  auto r = e.reach_set(init, std::set<int>{q});
  auto it = r.find(q);
  return it != r.end() && !it->second.empty();
}

bool repeated_csr_on(SymbolicEngine& e, const FifoMachine& m, const ReachMap& r, int q) {
  auto l = loop_of(m, q);
  if (!l) return false;
  auto it = r.find(q);
  if (it == r.end()) return false;
  size_t nc = m.channels.size();
  std::vector<Word> xs(nc), ys(nc);
  for (size_t c = 0; c < nc; ++c) {
    std::tie(xs[c], ys[c]) = loop_projection(m, *l, (int)c);
    if (!xs[c].empty() && xs[c].size() > ys[c].size()) return false;
  }
  for (const auto& s : it->second) {
    e.reserve_params(s);
    std::vector<SymbolicConfig> cur{s};
    for (size_t c = 0; c < nc && !cur.empty(); ++c) {
      if (xs[c].empty()) continue;
      auto splits = candidate_splits(xs[c], ys[c]);
      std::vector<SymbolicConfig> next;
      for (const auto& sc : cur)
        for (const auto& d : splits)
          for (auto& rs : e.restrict_to(sc, (int)c, xs[c], d.x_prime)) next.push_back(std::move(rs));
      cur = std::move(next);
    }
    for (const auto& sc : cur)
      if (!e.post_seq(sc, l->body).empty()) return true;
  }
  return false;
}

namespace {
// One representative state per cycle of a flat machine.
std::vector<int> loop_anchors(const FifoMachine& m) {
  std::vector<int> out;
  std::set<int> covered;
  for (int q = 0; q < (int)m.states.size(); ++q) {
    if (covered.count(q)) continue;
    auto l = loop_of(m, q);
    if (!l) continue;
    out.push_back(q);
    for (int t : l->body) covered.insert(m.transitions[t].source);
  }
  return out;
}
}  // namespace

bool decide_repeated_csr(const FifoMachine& m, const Config& init, int q, int budget) {
  SymbolicEngine e(m, budget);
  e.set_traces(false);
  auto r = e.reach_set(init, std::set<int>{q});
  return repeated_csr_on(e, m, r, q);
}

bool decide_nontermination(const FifoMachine& m, const Config& init, int budget) {
  SymbolicEngine e(m, budget);
  e.set_traces(false);
  auto anchors = loop_anchors(m);
  auto r = e.reach_set(init, std::set<int>(anchors.begin(), anchors.end()));
  for (int q : anchors)
    if (repeated_csr_on(e, m, r, q)) return true;
  return false;
}

bool decide_unboundedness(const FifoMachine& m, const Config& init, int budget) {
  SymbolicEngine e(m, budget);
  e.set_traces(false);
  auto anchors = loop_anchors(m);
  auto r = e.reach_set(init, std::set<int>(anchors.begin(), anchors.end()));
  for (int q : anchors) {
    auto g = loop_growth(m, *loop_of(m, q));
    bool nonneg = std::all_of(g.begin(), g.end(), [](int v) { return v >= 0; });
    bool grows = std::any_of(g.begin(), g.end(), [](int v) { return v > 0; });
    if (nonneg && grows && repeated_csr_on(e, m, r, q)) return true;
  }
  return false;
}

bool letter_unbounded_on(const ReachMap& r, int c, Letter a) {
  for (const auto& [q, v] : r)
    for (const auto& s : v)
      for (const auto& seg : s.chans[c].parts)
        if (seg.block() && seg.root.find(a) != Word::npos && objective_unbounded(s.cons, seg.count)) return true;
  return false;
}

bool decide_letter_unbounded(const FifoMachine& m, const Config& init, int c, int a, int budget) {
  auto r = reach_set(m, init, budget);
  return letter_unbounded_on(r, c, static_cast<Letter>(a));
}

bool decide_channel_unbounded(const FifoMachine& m, const Config& init, int c, int budget) {
  auto r = reach_set(m, init, budget);
  for (int a : m.channel_letters(c))
    if (letter_unbounded_on(r, c, static_cast<Letter>(a))) return true;
  return false;
}

}  // namespace flatfifo
