#include "flatfifo/words.hpp"

namespace flatfifo {

Word power(const Word& w, long n) {
  Word r;
  r.reserve(w.size() * std::max(0L, n));
  for (long i = 0; i < n; ++i) r += w;
  return r;
}

std::pair<Word, int> primitive_root(const Word& w) {
  if (w.empty()) throw EmptyWord();
  size_t n = w.size();
  for (size_t d = 1; d <= n; ++d) {
    if (n % d) continue;
    bool ok = true;
    for (size_t i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
    if (ok) return {w.substr(0, d), int(n / d)};
  }
  return {w, 1};
}

bool is_primitive(const Word& w) { return !w.empty() && primitive_root(w).second == 1; }

std::vector<Decomposition> candidate_splits(const Word& x, const Word& y) {
  std::vector<Decomposition> out;
  if (x.empty() || y.empty()) return out;
  auto [z, k] = primitive_root(y);
  for (size_t i = 0; i <= x.size(); ++i) {
    Word xp = x.substr(0, i), xpp = x.substr(i);
    Word rot = xpp + xp;
    auto [zr, j] = primitive_root(rot);
    if (zr != z) continue;
    out.push_back({xp, xpp, z, j, k, std::nullopt});
  }
  return out;
}

std::optional<Decomposition> omega_prefix_eq(const Word& x, const Word& w, const Word& y) {
  for (auto d : candidate_splits(x, y)) {
    size_t i = d.x_prime.size();
    if (w.size() < i || (w.size() - i) % x.size()) continue;
    size_t s = (w.size() - i) / x.size();
    if (w.compare(0, w.size() - i, power(x, (long)s)) != 0) continue;
    if (w.compare(w.size() - i, i, d.x_prime) != 0) continue;
    d.s = (int)s;
    return d;
  }
  return std::nullopt;
}

bool verify_decomposition(const Word& x, const Word& w, const Word& y, const Decomposition& d) {
  if (d.z.empty() || !is_primitive(d.z)) return false;
  if (d.x_prime + d.x_dprime != x) return false;
  if (d.x_dprime + d.x_prime != power(d.z, d.j)) return false;
  if (y != power(d.z, d.k)) return false;
  if (!d.s) return true;
  return w == power(x, *d.s) + d.x_prime;
}

std::pair<Word, Word> loop_projection(const FifoMachine& m, const ElementaryLoop& l, int c) {
  Word x, y;
  for (int t : l.body) {
    const Action& a = m.transitions[t].action;
    if (a.channel != c) continue;
    if (a.kind == ActionKind::Send) y.push_back(static_cast<Letter>(a.letter));
    else if (a.kind == ActionKind::Retrieve) x.push_back(static_cast<Letter>(a.letter));
  }
  return {x, y};
}

std::vector<int> loop_effect(const FifoMachine& m, const ElementaryLoop& l) {
  std::vector<int> v(m.channels.size());
  for (int c = 0; c < (int)v.size(); ++c) {
    auto [x, y] = loop_projection(m, l, c);
    v[c] = int(x.size()) - int(y.size());
  }
  return v;
}

std::vector<int> loop_growth(const FifoMachine& m, const ElementaryLoop& l) {
  auto v = loop_effect(m, l);
  for (int& e : v) e = -e;
  return v;
}

std::optional<Config> fire_sequence(const FifoMachine& m, Config c, const std::vector<int>& seq) {
  for (int t : seq) {
    auto n = step(m, c, t, Semantics::Perfect);
    if (n.empty()) return std::nullopt;
    c = std::move(n[0]);
  }
  return c;
}

Iterability infinitely_iterable(const FifoMachine& m, const ElementaryLoop& l, const Config& cfg) {
  Iterability r;
  r.witnesses.resize(m.channels.size());
  bool any_retrieve = false;
  for (int c = 0; c < (int)m.channels.size(); ++c) {
    auto [x, y] = loop_projection(m, l, c);
    if (x.empty()) continue;
    any_retrieve = true;
    if (x.size() > y.size()) return r;
    auto d = omega_prefix_eq(x, cfg.contents[c], y);
    if (!d) return r;
    r.witnesses[c] = d;
  }
  if (any_retrieve && !fire_sequence(m, cfg, l.body)) {
    r.witnesses.assign(m.channels.size(), std::nullopt);
    return r;
  }
  r.iterable = true;
  return r;
}

std::vector<PeriodicContent> accelerate_contents(const FifoMachine& m, const ElementaryLoop& l, const Config& cfg) {
  auto it = infinitely_iterable(m, l, cfg);
  if (!it.iterable) throw NotIterable();
  std::vector<PeriodicContent> out;
  for (int c = 0; c < (int)m.channels.size(); ++c) {
    auto [x, y] = loop_projection(m, l, c);
    PeriodicContent p{cfg.contents[c], {}, 0};
    if (x.empty() && !y.empty()) {
      auto [z, k] = primitive_root(y);
      p.period = y;
      p.stride = k;
    } else if (!x.empty()) {
      const auto& d = *it.witnesses[c];
      p.stride = d.k - d.j;
      p.period = power(d.z, p.stride);
    }
    out.push_back(p);
  }
  return out;
}

bool cyclic(const FifoMachine& m, const Config& cfg) {
  auto l = loop_of(m, cfg.state);
  if (!l) return false;
  // Each channel is the stored word followed by what sigma sends; a head index
  // replaces popping so one firing costs O(|sigma| + |w|).
  std::vector<Word> queue = cfg.contents;
  std::vector<size_t> head(queue.size(), 0);
  for (int t : l->body) {
    const Action& a = m.transitions[t].action;
    if (a.kind == ActionKind::Send) {
      queue[a.channel].push_back(static_cast<Letter>(a.letter));
    } else if (a.kind == ActionKind::Retrieve) {
      auto& h = head[a.channel];
      if (h >= queue[a.channel].size() || queue[a.channel][h] != static_cast<Letter>(a.letter)) return false;
      ++h;
    }
  }
  for (size_t c = 0; c < queue.size(); ++c)
    if (queue[c].compare(head[c], std::u32string::npos, cfg.contents[c]) != 0) return false;
  return true;
}

}  // namespace flatfifo
