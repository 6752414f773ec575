#include "flatfifo/lossy.hpp"

#include "edit_internal.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <set>

namespace flatfifo {

// ---------------------------------------------------------------- SRE calculus

Atom choice(Letter a) { return Atom{false, {a}}; }

Atom star(std::vector<Letter> letters) {
  std::sort(letters.begin(), letters.end());
  letters.erase(std::unique(letters.begin(), letters.end()), letters.end());
  return Atom{true, std::move(letters)};
}

Product product_of_word(const Word& w) {
  Product p;
  for (Letter a : w) p.push_back(choice(a));
  return p;
}

namespace {

bool has(const std::vector<Letter>& s, Letter a) { return std::binary_search(s.begin(), s.end(), a); }

bool subset(const std::vector<Letter>& a, const std::vector<Letter>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

bool atom_includes(const Atom& x, const Atom& y) {
  if (!y.star) return !x.star && x.letters == y.letters;
  return subset(x.letters, y.letters);
}

}  // namespace

Product normalize_product(Product p) {
  std::erase_if(p, [](const Atom& a) { return a.letters.empty(); });
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < p.size(); ++i) {
      const Atom& x = p[i];
      const Atom& y = p[i + 1];
      if (y.star && atom_includes(x, y)) {
        p.erase(p.begin() + (long)i);
      } else if (x.star && atom_includes(y, x)) {
        p.erase(p.begin() + (long)i + 1);
      } else {
        continue;
      }
      changed = true;
      break;
    }
  }
  return p;
}

bool product_includes(const Product& p, const Product& q) {
  size_t j = 0;
  for (size_t i = 0; i < p.size();) {
    if (j == q.size()) return false;
    if (atom_includes(p[i], q[j])) {
      ++i;
      if (!q[j].star) ++j;
    } else {
      ++j;
    }
  }
  return true;
}

Sre normalize(Sre s) {
  for (auto& p : s.products) p = normalize_product(std::move(p));
  std::sort(s.products.begin(), s.products.end());
  s.products.erase(std::unique(s.products.begin(), s.products.end()), s.products.end());
  std::vector<Product> keep;
  for (size_t i = 0; i < s.products.size(); ++i) {
    bool sub = false;
    for (size_t j = 0; j < s.products.size() && !sub; ++j)
      sub = j != i && product_includes(s.products[i], s.products[j]) &&
            (!product_includes(s.products[j], s.products[i]) || j < i);
    if (!sub) keep.push_back(s.products[i]);
  }
  s.products = std::move(keep);
  return s;
}

bool sre_includes(const Sre& l1, const Sre& l2) {
  for (const auto& p : l1.products) {
    bool ok = false;
    for (const auto& q : l2.products) ok = ok || product_includes(p, q);
    if (!ok) return false;
  }
  return true;
}

bool sre_member(const Word& w, const Sre& l) { return sre_includes(Sre{{product_of_word(w)}}, l); }

std::vector<Word> sre_members(const Sre& l, const std::vector<Letter>& alphabet, std::size_t max_len) {
  std::vector<Word> out, layer{Word{}};
  for (std::size_t len = 0; len <= max_len; ++len) {
    std::vector<Word> next;
    for (const auto& w : layer) {
      if (sre_member(w, l)) out.push_back(w);
      if (len < max_len)
        for (Letter a : alphabet) next.push_back(w + a);
    }
    layer = std::move(next);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {
std::string atom_text(const FifoMachine& m, const Atom& a) {
  std::string s = "(";
  for (size_t i = 0; i < a.letters.size(); ++i) s += (i ? "+" : "") + m.letters[a.letters[i]];
  return a.star ? s + ")*" : s + "+e)";
}

std::string product_text(const FifoMachine& m, const Product& p) {
  if (p.empty()) return "e";
  std::string s;
  for (size_t i = 0; i < p.size(); ++i) s += (i ? "." : "") + atom_text(m, p[i]);
  return s;
}
}  // namespace

std::string sre_text(const FifoMachine& m, const Sre& s) {
  if (s.products.empty()) return "0";
  std::string out;
  for (size_t i = 0; i < s.products.size(); ++i) out += (i ? " + " : "") + product_text(m, s.products[i]);
  return out;
}

nlohmann::json sre_to_json(const FifoMachine& m, const Sre& s) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& p : s.products) {
    nlohmann::json pj = nlohmann::json::array();
    for (const auto& a : p) {
      nlohmann::json ls = nlohmann::json::array();
      for (Letter l : a.letters) ls.push_back(m.letters[l]);
      if (a.star) pj.push_back({{"star", ls}});
      else pj.push_back({{"choice", ls[0]}});
    }
    j.push_back(pj);
  }
  return j;
}

// ---------------------------------------------------------------- ideals

bool ideal_includes(const Ideal& a, const Ideal& b) {
  for (size_t c = 0; c < a.size(); ++c)
    if (!product_includes(a[c], b[c])) return false;
  return true;
}

void add_ideal(IdealSet& s, Ideal i) {
  for (const auto& k : s)
    if (ideal_includes(i, k)) return;
  std::erase_if(s, [&](const Ideal& k) { return ideal_includes(k, i); });
  s.push_back(std::move(i));
}

bool ideal_member(const Config& c, const Ideal& i) {
  for (size_t k = 0; k < i.size(); ++k)
    if (!product_includes(product_of_word(c.contents[k]), i[k])) return false;
  return true;
}

std::optional<Ideal> lossy_post(const FifoMachine& m, const Ideal& i, int ti) {
  const Action& a = m.transitions[ti].action;
  if (a.kind == ActionKind::Internal) return i;
  Ideal r = i;
  Product& p = r[a.channel];
  Letter l = static_cast<Letter>(a.letter);
  if (a.kind == ActionKind::Send) {
    p.push_back(choice(l));
    p = normalize_product(std::move(p));
    return r;
  }
  // left quotient by l of a downward-closed product
  for (size_t k = 0; k < p.size(); ++k) {
    if (!has(p[k].letters, l)) continue;
    p.erase(p.begin(), p.begin() + (long)k + (p[k].star ? 0 : 1));
    return r;
  }
  return std::nullopt;
}

std::optional<Ideal> lossy_post_seq(const FifoMachine& m, Ideal i, const std::vector<int>& seq) {
  for (int t : seq) {
    auto n = lossy_post(m, i, t);
    if (!n) return std::nullopt;
    i = std::move(*n);
  }
  return i;
}

namespace {

struct Insert {
  size_t pos;
  Product d;
};

// Ways to write to = from[:pos] . d . from[pos:]; end position first.
std::vector<Insert> product_insertions(const Product& from, const Product& to) {
  std::vector<Insert> out;
  if (to.size() <= from.size()) return out;
  size_t len = to.size() - from.size();
  for (size_t k = 0; k <= from.size(); ++k) {
    size_t pos = from.size() - k;
    if (!std::equal(from.begin(), from.begin() + (long)pos, to.begin())) continue;
    if (!std::equal(from.begin() + (long)pos, from.end(), to.begin() + (long)(pos + len))) continue;
    out.push_back({pos, Product(to.begin() + (long)pos, to.begin() + (long)(pos + len))});
  }
  return out;
}

Product splice(const Product& base, const Insert& in, const Product& mid) {
  Product p(base.begin(), base.begin() + (long)in.pos);
  p.insert(p.end(), mid.begin(), mid.end());
  p.insert(p.end(), base.begin() + (long)in.pos, base.end());
  return p;
}

std::optional<Ideal> post_power(const FifoMachine& m, Ideal i, const ElementaryLoop& l, int times) {
  for (int k = 0; k < times; ++k) {
    auto n = lossy_post_seq(m, std::move(i), l.body);
    if (!n) return std::nullopt;
    i = std::move(*n);
  }
  return i;
}

// lo is included in hi = sigma^p(lo); guess the limit by starring each channel's single insertion.
std::optional<Ideal> widen(const FifoMachine& m, const Ideal& lo, const Ideal& hi, const ElementaryLoop& l, int p) {
  size_t nc = lo.size();
  std::vector<std::vector<Insert>> ins(nc);
  for (size_t c = 0; c < nc; ++c) {
    if (lo[c] == hi[c]) continue;
    ins[c] = product_insertions(lo[c], hi[c]);
    if (ins[c].empty()) return std::nullopt;
  }
  std::vector<std::vector<size_t>> choices{std::vector<size_t>(nc, 0)};
  for (size_t c = 0; c < nc; ++c)
    for (size_t k = 1; k < ins[c].size(); ++k) {
      auto ch = choices[0];
      ch[c] = k;
      choices.push_back(ch);
    }
  auto h2 = post_power(m, hi, l, p);
  auto h3 = h2 ? post_power(m, *h2, l, p) : std::nullopt;
  if (!h3) return std::nullopt;
  for (const auto& ch : choices) {
    Ideal w(nc), d2(nc), d3(nc);
    for (size_t c = 0; c < nc; ++c) {
      if (ins[c].empty()) {
        w[c] = d2[c] = d3[c] = lo[c];
        continue;
      }
      const Insert& in = ins[c][ch[c]];
      std::vector<Letter> letters;
      for (const auto& a : in.d) letters.insert(letters.end(), a.letters.begin(), a.letters.end());
      w[c] = normalize_product(splice(lo[c], in, {star(letters)}));
      Product dd = in.d;
      dd.insert(dd.end(), in.d.begin(), in.d.end());
      d2[c] = normalize_product(splice(lo[c], in, dd));
      dd.insert(dd.end(), in.d.begin(), in.d.end());
      d3[c] = normalize_product(splice(lo[c], in, dd));
    }
    // the guessed pattern must continue for two more periods
    if (!ideal_includes(d2, *h2) || !ideal_includes(d3, *h3)) continue;
    // and the limit must be closed under sigma^p
    auto pw = post_power(m, w, l, p);
    if (pw && !ideal_includes(*pw, w)) continue;
    return w;
  }
  return std::nullopt;
}

constexpr int kMaxPeriod = 4;

}  // namespace

IdealSet lossy_loop_star_ideals(const FifoMachine& m, const IdealSet& from, const ElementaryLoop& l, int budget) {
  IdealSet out;
  for (const auto& start : from) {
    std::vector<Ideal> chain{start};
    add_ideal(out, start);
    int rounds = 0;
    while (true) {
      if (++rounds > budget) throw FixpointBudgetExceeded(budget);
      auto nx = lossy_post_seq(m, chain.back(), l.body);
      if (!nx) break;
      bool covered = false;
      for (const auto& k : out) covered = covered || ideal_includes(*nx, k);
      if (covered) break;
      std::optional<Ideal> w;
      int period = 0;
      for (int p = 1; p <= kMaxPeriod && p <= (int)chain.size() && !w; ++p) {
        const Ideal& lo = chain[chain.size() - (size_t)p];
        if (!ideal_includes(lo, *nx)) continue;
        w = widen(m, lo, *nx, l, p);
        period = p;
      }
      if (w) {
        // the widened ideal and its images cover the rest of the chain
        Ideal img = *w;
        add_ideal(out, img);
        for (int k = 1; k < period; ++k) {
          auto n = lossy_post_seq(m, img, l.body);
          if (!n) break;
          img = std::move(*n);
          add_ideal(out, img);
        }
        break;
      }
      add_ideal(out, *nx);
      chain.push_back(std::move(*nx));
    }
  }
  return out;
}

namespace {

IdealSet ideals_of(const std::vector<Sre>& chans) {
  IdealSet out;
  Ideal cur;
  std::function<void(size_t)> go = [&](size_t c) {
    if (c == chans.size()) {
      add_ideal(out, cur);
      return;
    }
    for (const auto& p : chans[c].products) {
      cur.push_back(p);
      go(c + 1);
      cur.pop_back();
    }
  };
  go(0);
  return out;
}

std::vector<Sre> project(const IdealSet& s, size_t nc) {
  std::vector<Sre> out(nc);
  for (const auto& i : s)
    for (size_t c = 0; c < nc; ++c) out[c].products.push_back(i[c]);
  for (auto& x : out) x = normalize(std::move(x));
  return out;
}

}  // namespace

std::vector<Sre> lossy_loop_star(const FifoMachine& m, const std::vector<Sre>& from, const ElementaryLoop& l,
                                 int budget) {
  return project(lossy_loop_star_ideals(m, ideals_of(from), l, budget), from.size());
}

LossyReach lossy_reach_ideals(const FifoMachine& m, const Config& init, int budget) {
  auto fr = is_flat(m);
  if (!fr.flat) throw NotFlat(fr.vertex);
  std::vector<std::pair<int, int>> edges;
  for (const auto& t : m.transitions) edges.emplace_back(t.source, t.target);
  auto comp = scc_ids((int)m.states.size(), edges);
  LossyReach out;
  auto post_all = [&](const IdealSet& S, int e) {
    IdealSet r;
    for (const auto& i : S)
      if (auto n = lossy_post(m, i, e)) add_ideal(r, std::move(*n));
    return r;
  };
  auto record = [&](int q, const IdealSet& S) {
    auto& v = out[q];
    for (const auto& i : S) add_ideal(v, i);
  };
  std::function<void(int, const IdealSet&)> go = [&](int v, const IdealSet& S) {
    if (S.empty()) return;
    auto l = loop_of(m, v);
    if (!l) {
      record(v, S);
      for (int e : m.out_edges(v)) go(m.transitions[e].target, post_all(S, e));
      return;
    }
    auto A = lossy_loop_star_ideals(m, S, *l, budget);
    int u = v;
    for (int t : l->body) {
      record(u, A);
      for (int e : m.out_edges(u))
        if (comp[m.transitions[e].target] != comp[v]) go(m.transitions[e].target, post_all(A, e));
      A = post_all(A, t);
      u = m.transitions[t].target;
    }
  };
  Ideal i0;
  for (const auto& w : init.contents) i0.push_back(product_of_word(w));
  go(init.state, {i0});
  return out;
}

std::map<int, std::vector<Sre>> lossy_reach_set(const FifoMachine& m, const Config& init, int budget) {
  std::map<int, std::vector<Sre>> out;
  for (const auto& [q, s] : lossy_reach_ideals(m, init, budget)) out[q] = project(s, m.channels.size());
  return out;
}

bool channelwise_exact(const FifoMachine& m, const LossyReach& r) {
  for (const auto& [q, s] : r) {
    auto per = project(s, m.channels.size());
    for (const auto& i : ideals_of(per)) {
      bool in = false;
      for (const auto& k : s) in = in || ideal_includes(i, k);
      if (!in) return false;
    }
  }
  return true;
}

bool lossy_reachable(const FifoMachine& m, const Config& init, const Config& target, int budget) {
  auto r = lossy_reach_ideals(m, init, budget);
  auto it = r.find(target.state);
  if (it == r.end()) return false;
  for (const auto& i : it->second)
    if (ideal_member(target, i)) return true;
  return false;
}

// ---------------------------------------------------------------- HPDA

bool hpda_accepts(const Hpda& a, const std::vector<int>& tape, HpdaStats* stats, int zeta, int exempt) {
  const int n = (int)tape.size();
  std::vector<std::vector<const HpdaRule*>> by_state(a.states.size());
  for (const auto& r : a.rules) by_state[r.from].push_back(&r);
  std::set<int> finals(a.finals.begin(), a.finals.end());
  HpdaId id0{a.start, std::vector<int>(a.heads, 0), {a.bottom}};
  std::set<HpdaId> seen{id0};
  std::deque<HpdaId> work{id0};
  while (!work.empty()) {
    HpdaId id = std::move(work.front());
    work.pop_front();
    if (stats) {
      ++stats->ids;
      if (zeta >= 0 && a.heads == 2 && id.state != exempt) {
        long z = std::count(id.stack.begin(), id.stack.end(), zeta);
        if (z != id.pos[0] - id.pos[1]) ++stats->invariant_violations;
      }
    }
    if (finals.count(id.state) &&
        std::all_of(id.pos.begin(), id.pos.end(), [&](int p) { return p >= n; }))
      return true;
    int h = a.head[id.state];
    int p = id.pos[h];
    if (p > n) continue;
    int sym = p < n ? tape[p] : kDollar;
    for (const HpdaRule* r : by_state[id.state]) {
      if (r->symbol != sym) continue;
      HpdaId nx = id;
      if (r->pop >= 0) {
        if (nx.stack.empty() || nx.stack.back() != r->pop) continue;
        nx.stack.pop_back();
      }
      nx.stack.insert(nx.stack.end(), r->push.begin(), r->push.end());
      nx.state = r->to;
      nx.pos[h] = p + 1;
      if (seen.insert(nx).second) work.push_back(std::move(nx));
    }
  }
  return false;
}

Hpda channel_hpda(const FifoMachine& m, int c) {
  enum { kH = 0, kLow = 1 };
  const auto& letters = m.channel_letters(c);
  const int n = (int)letters.size();
  Hpda a;
  a.heads = 2;
  a.states.push_back("q_H");
  for (int l : letters) a.states.push_back("q_h^" + m.letters[l]);
  a.states.push_back("q_f");
  const int qH = 0, qf = n + 1;
  a.head.assign(a.states.size(), kLow);
  a.head[qH] = kH;
  for (const auto& t : m.transitions) a.tape_alphabet.push_back(t.id);
  a.stack_alphabet = {"gamma0", "zeta"};
  a.bottom = 0;
  const int zeta = 1;
  a.start = qH;
  a.finals = {qf};
  auto slot = [&](int letter) { return (int)(std::find(letters.begin(), letters.end(), letter) - letters.begin()); };
  for (int t = 0; t < (int)m.transitions.size(); ++t) {
    const Action& act = m.transitions[t].action;
    bool on_c = act.kind != ActionKind::Internal && act.channel == c;
    if (on_c && act.kind == ActionKind::Retrieve) a.rules.push_back({qH, t, -1, {zeta}, 1 + slot(act.letter)});
    else a.rules.push_back({qH, t, -1, {zeta}, qH});
    for (int i = 0; i < n; ++i) {
      a.rules.push_back({1 + i, t, zeta, {}, 1 + i});
      if (on_c && act.kind == ActionKind::Send && act.letter == letters[i]) a.rules.push_back({1 + i, t, zeta, {}, qH});
    }
    a.rules.push_back({qf, t, -1, {}, qf});
  }
  a.rules.push_back({qH, kDollar, -1, {}, qf});
  a.rules.push_back({qf, kDollar, -1, {}, qf});
  return a;
}

using detail::add_state;
using detail::add_transition;
using detail::fresh_name;

FrontLossyEncoding build_frontlossy_hpda(const FifoMachine& m, const Config& init, int q_target, bool allow_filler) {
  auto fr = is_flat(m);
  if (!fr.flat) throw NotFlat(fr.vertex);
  FrontLossyEncoding enc{m, init, q_target, {}, {}};
  bool empty = std::all_of(init.contents.begin(), init.contents.end(), [](const Word& w) { return w.empty(); });
  if (!empty) {
    if (!allow_filler) throw NonEmptyInit();
    // fresh chain of sends that fills the channels, ending in the old initial state
    FifoMachine& fm = enc.machine;
    int prev = (int)fm.states.size();
    add_state(fm, "fill0");
    int k = 0;
    std::vector<std::pair<int, int>> sends;
    for (int c = 0; c < (int)init.contents.size(); ++c)
      for (Letter a : init.contents[c]) sends.emplace_back(c, (int)a);
    for (size_t i = 0; i < sends.size(); ++i) {
      int dst = init.state;
      if (i + 1 < sends.size()) {
        dst = (int)fm.states.size();
        add_state(fm, "fill" + std::to_string(++k));
      }
      add_transition(fm, "fill_t" + std::to_string(i + 1), prev, dst,
                     Action{ActionKind::Send, sends[i].first, sends[i].second});
      prev = dst;
    }
    fm.initial = (int)m.states.size();
    fm.index();
    enc.init = fm.initial_config();
  }
  const FifoMachine& fm = enc.machine;
  // A_0: the control graph read by one head
  Hpda a0;
  a0.states = fm.states;
  a0.head.assign(fm.states.size(), 0);
  for (const auto& t : fm.transitions) a0.tape_alphabet.push_back(t.id);
  a0.stack_alphabet = {"gamma0"};
  a0.start = enc.init.state;
  a0.finals = {q_target};
  for (int t = 0; t < (int)fm.transitions.size(); ++t)
    a0.rules.push_back({fm.transitions[t].source, t, -1, {}, fm.transitions[t].target});
  enc.automata.push_back(a0);
  for (int c = 0; c < (int)fm.channels.size(); ++c) enc.automata.push_back(channel_hpda(fm, c));
  for (const auto& s : path_schemas(fm, enc.init.state, q_target)) {
    for (size_t i = 0; i < s.segments.size(); ++i) {
      if (!s.segments[i].empty()) enc.expr.push_back(s.segments[i]);
      if (i < s.loops.size()) enc.expr.push_back(s.loops[i].body);
    }
  }
  return enc;
}

namespace {
// Earliest-match viability of a transition sequence on every channel; a necessary and sufficient
// condition for front-lossy executability, used only to prune the tape enumeration.
bool greedy_viable(const FifoMachine& m, const std::vector<int>& tape) {
  for (int c = 0; c < (int)m.channels.size(); ++c) {
    size_t h = 0;
    for (size_t i = 0; i < tape.size(); ++i) {
      const Action& a = m.transitions[tape[i]].action;
      if (a.kind != ActionKind::Retrieve || a.channel != c) continue;
      while (h < i) {
        const Action& b = m.transitions[tape[h]].action;
        ++h;
        if (b.kind == ActionKind::Send && b.channel == c && b.letter == a.letter) goto matched;
      }
      return false;
    matched:;
    }
  }
  return true;
}
}  // namespace

Tri decide_frontlossy_csr(const FifoMachine& m, const Config& init, int q, int tape_bound, HpdaStats* stats,
                          bool allow_filler) {
  auto enc = build_frontlossy_hpda(m, init, q, allow_filler);
  const FifoMachine& fm = enc.machine;
  // the filler prefix does not count against the bound
  std::vector<int> prefix;
  int start = enc.init.state;
  while (start != init.state) {
    int t = fm.out_edges(start)[0];
    prefix.push_back(t);
    start = fm.transitions[t].target;
  }
  std::vector<int> tape = prefix;
  const int zeta = 1;
  std::function<bool(int, int)> go = [&](int v, int depth) {
    if (!greedy_viable(fm, tape)) return false;
    if (v == q) {
      bool all = true;
      for (size_t i = 0; i < enc.automata.size() && all; ++i) {
        bool two = enc.automata[i].heads == 2;
        all = hpda_accepts(enc.automata[i], tape, stats, two ? zeta : -1,
                           two ? (int)enc.automata[i].states.size() - 1 : -1);
      }
      if (all) return true;
    }
    if (depth == tape_bound) return false;
    for (int e : fm.out_edges(v)) {
      tape.push_back(e);
      bool ok = go(fm.transitions[e].target, depth + 1);
      tape.pop_back();
      if (ok) return true;
    }
    return false;
  };
  return go(start, 0) ? Tri::Yes : Tri::No;
}

std::pair<FifoMachine, int> lossy_reach_to_csr(const FifoMachine& m, const Config& target) {
  FifoMachine r = m;
  const int nc = (int)m.channels.size();
  std::vector<int> marker(nc);
  for (int c = 0; c < nc; ++c) {
    marker[c] = (int)r.letters.size();
    r.letters.push_back(fresh_name(r.letters, "$" + m.channels[c]));
    r.letter_channel.push_back(c);
  }
  std::vector<Action> path;
  for (int c = 0; c < nc; ++c) path.push_back({ActionKind::Send, c, marker[c]});
  for (int c = 0; c < nc; ++c) {
    for (Letter a : target.contents[c]) path.push_back({ActionKind::Retrieve, c, (int)a});
    path.push_back({ActionKind::Retrieve, c, marker[c]});
  }
  int prev = target.state;
  for (size_t i = 0; i < path.size(); ++i) {
    int dst = (int)r.states.size();
    add_state(r, i + 1 == path.size() ? "q_stop" : "stop" + std::to_string(i + 1));
    add_transition(r, "stop_t" + std::to_string(i + 1), prev, dst, path[i]);
    prev = dst;
  }
  if (path.empty()) {
    // no channels: a silent step still makes q_stop fresh
    int dst = (int)r.states.size();
    add_state(r, "q_stop");
    add_transition(r, "stop_t1", prev, dst, Action{});
    prev = dst;
  }
  r.index();
  return {r, prev};
}

}  // namespace flatfifo
