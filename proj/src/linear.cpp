#include "flatfifo/linear.hpp"

#include <algorithm>
#include <numeric>
#include <set>

namespace flatfifo {

// ---------------------------------------------------------------- Affine

Affine Affine::var(int p, Int coef) {
  Affine a;
  if (coef) a.t[p] = coef;
  return a;
}

Int Affine::coef(int p) const {
  auto it = t.find(p);
  return it == t.end() ? 0 : it->second;
}

Affine& Affine::operator+=(const Affine& o) {
  c += o.c;
  for (const auto& [p, k] : o.t)
    if ((t[p] += k) == 0) t.erase(p);
  return *this;
}

Affine& Affine::operator-=(const Affine& o) {
  c -= o.c;
  for (const auto& [p, k] : o.t)
    if ((t[p] -= k) == 0) t.erase(p);
  return *this;
}

Affine& Affine::operator*=(Int k) {
  if (k == 0) {
    c = 0;
    t.clear();
    return *this;
  }
  c *= k;
  for (auto& [p, v] : t) v *= k;
  return *this;
}

Affine Affine::subst(int p, const Affine& by) const {
  Int k = coef(p);
  if (!k) return *this;
  Affine r = *this;
  r.t.erase(p);
  r += by * k;
  return r;
}

Int Affine::eval(const std::map<int, Int>& v) const {
  Int s = c;
  for (const auto& [p, k] : t) {
    auto it = v.find(p);
    if (it != v.end()) s += k * it->second;
  }
  return s;
}

std::string Affine::str() const {
  std::string s;
  for (const auto& [p, k] : t) {
    if (!s.empty()) s += k < 0 ? "-" : "+";
    else if (k < 0) s += "-";
    Int a = k < 0 ? -k : k;
    if (a != 1) s += std::to_string(a) + "*";
    s += "n" + std::to_string(p);
  }
  if (s.empty()) return std::to_string(c);
  if (c > 0) s += "+" + std::to_string(c);
  if (c < 0) s += std::to_string(c);
  return s;
}

std::string Constraint::str() const { return e.str() + (eq ? " = 0" : " >= 0"); }

// ---------------------------------------------------------------- Omega-style elimination

namespace {

using I = Int;

I mul(I a, I b) {
  I r;
  if (__builtin_mul_overflow(a, b, &r)) throw SolverBudgetExceeded("coefficient overflow");
  return r;
}
I add(I a, I b) {
  I r;
  if (__builtin_add_overflow(a, b, &r)) throw SolverBudgetExceeded("coefficient overflow");
  return r;
}
I floordiv(I a, I b) {  // b > 0
  I q = a / b;
  if ((a % b != 0) && (a < 0)) --q;
  return q;
}

// a.x + c >= 0 (or == 0)
struct Row {
  std::vector<I> a;
  I c = 0;
};

class Solver {
 public:
  explicit Solver(bool integer) : integer_(integer) {}

  bool feasible(std::vector<Row> eqs, std::vector<Row> ineqs) {
    if (++work_ > kWork) throw SolverBudgetExceeded("elimination budget exhausted");
    if (!solve_equalities(eqs, ineqs)) return false;
    return solve_inequalities(std::move(ineqs));
  }

 private:
  static constexpr long kWork = 2000000;
  static constexpr size_t kRows = 20000;
  bool integer_;
  long work_ = 0;

  static I row_gcd(const Row& r) {
    I g = 0;
    for (I v : r.a) g = std::gcd(g, v < 0 ? -v : v);
    return g;
  }

  static void widen(std::vector<Row>& rows, size_t n) {
    for (auto& r : rows) r.a.resize(n, 0);
  }

  // Replaces column j using row e, which has e.a[j] != 0, so that j vanishes in r.
  static void eliminate_with(Row& r, const Row& e, size_t j) {
    I rj = r.a[j];
    if (!rj) return;
    I ej = e.a[j];
    I s = ej > 0 ? ej : -ej;
    I f = ej > 0 ? rj : -rj;
    for (size_t i = 0; i < r.a.size(); ++i) r.a[i] = add(mul(s, r.a[i]), -mul(f, e.a[i]));
    r.c = add(mul(s, r.c), -mul(f, e.c));
    r.a[j] = 0;
  }

  bool solve_equalities(std::vector<Row>& eqs, std::vector<Row>& ineqs) {
    while (!eqs.empty()) {
      Row e = eqs.back();
      eqs.pop_back();
      I g = row_gcd(e);
      if (g == 0) {
        if (e.c != 0) return false;
        continue;
      }
      if (integer_) {
        if (e.c % g != 0) return false;
        for (I& v : e.a) v /= g;
        e.c /= g;
      }
      size_t j = 0;
      I best = 0;
      for (size_t i = 0; i < e.a.size(); ++i) {
        I v = e.a[i] < 0 ? -e.a[i] : e.a[i];
        if (v && (!best || v < best)) {
          best = v;
          j = i;
        }
      }
      if (best == 1 || !integer_) {
        for (auto& r : eqs) eliminate_with(r, e, j);
        for (auto& r : ineqs) eliminate_with(r, e, j);
        continue;
      }
      // Euclid step: t = x_j + sum q_i x_i + q_c, a free integer column.
      if (e.a[j] < 0) {
        for (I& v : e.a) v = -v;
        e.c = -e.c;
      }
      I a = e.a[j];
      size_t n = e.a.size();
      std::vector<I> q(n, 0);
      for (size_t i = 0; i < n; ++i)
        if (i != j) q[i] = floordiv(e.a[i], a);
      I qc = floordiv(e.c, a);
      eqs.push_back(e);
      widen(eqs, n + 1);
      widen(ineqs, n + 1);
      auto substitute = [&](Row& r) {
        I rj = r.a[j];
        if (!rj) return;
        r.a[n] = add(r.a[n], rj);
        for (size_t i = 0; i < n; ++i)
          if (i != j) r.a[i] = add(r.a[i], -mul(rj, q[i]));
        r.c = add(r.c, -mul(rj, qc));
        r.a[j] = 0;
      };
      for (auto& r : eqs) substitute(r);
      for (auto& r : ineqs) substitute(r);
    }
    return true;
  }

  // Normalizes, removes duplicates and detects trivial contradictions; may yield equalities.
  bool tidy(std::vector<Row>& rows, std::vector<Row>& eqs_out) {
    std::map<std::vector<I>, I> tight;
    for (auto& r : rows) {
      I g = row_gcd(r);
      if (g == 0) {
        if (r.c < 0) return false;
        continue;
      }
      if (integer_) {
        for (I& v : r.a) v /= g;
        r.c = floordiv(r.c, g);
      } else if (r.c % g == 0) {
        for (I& v : r.a) v /= g;
        r.c /= g;
      }
      auto it = tight.find(r.a);
      if (it == tight.end()) tight.emplace(r.a, r.c);
      else it->second = std::min(it->second, r.c);
    }
    rows.clear();
    std::set<std::vector<I>> done;
    for (const auto& [a, c] : tight) {
      if (done.count(a)) continue;
      std::vector<I> neg(a.size());
      for (size_t i = 0; i < a.size(); ++i) neg[i] = -a[i];
      auto it = tight.find(neg);
      if (it != tight.end()) {
        I s = add(c, it->second);
        if (s < 0) return false;
        if (s == 0 && integer_) {
          eqs_out.push_back(Row{a, c});
          done.insert(a);
          done.insert(neg);
          continue;
        }
      }
      rows.push_back(Row{a, c});
    }
    if (rows.size() > kRows) throw SolverBudgetExceeded("too many constraints");
    return true;
  }

  bool solve_inequalities(std::vector<Row> rows) {
    while (true) {
      if (++work_ > kWork) throw SolverBudgetExceeded("elimination budget exhausted");
      std::vector<Row> eqs;
      if (!tidy(rows, eqs)) return false;
      if (!eqs.empty()) return feasible(std::move(eqs), std::move(rows));
      if (rows.empty()) return true;
      size_t n = rows[0].a.size();
      // pick the cheapest variable, preferring exact eliminations
      int pick = -1;
      bool pick_exact = false;
      size_t pick_cost = 0;
      for (size_t j = 0; j < n; ++j) {
        size_t lo = 0, hi = 0;
        bool unit_lo = true, unit_hi = true;
        for (const auto& r : rows) {
          if (r.a[j] > 0) {
            ++lo;
            unit_lo = unit_lo && r.a[j] == 1;
          } else if (r.a[j] < 0) {
            ++hi;
            unit_hi = unit_hi && r.a[j] == -1;
          }
        }
        if (lo + hi == 0) continue;
        if (lo == 0 || hi == 0) {
          pick = (int)j;
          pick_exact = true;
          pick_cost = 0;
          break;
        }
        bool exact = !integer_ || unit_lo || unit_hi;
        size_t cost = lo * hi;
        if (pick < 0 || (exact && !pick_exact) || (exact == pick_exact && cost < pick_cost)) {
          pick = (int)j;
          pick_exact = exact;
          pick_cost = cost;
        }
      }
      if (pick < 0) return true;
      size_t j = (size_t)pick;
      std::vector<Row> lower, upper, rest;
      for (auto& r : rows) {
        if (r.a[j] > 0) lower.push_back(r);
        else if (r.a[j] < 0) upper.push_back(r);
        else rest.push_back(r);
      }
      if (lower.empty() || upper.empty()) {
        rows = std::move(rest);
        continue;
      }
      auto shadow = [&](I dark) {
        std::vector<Row> out = rest;
        for (const auto& l : lower)
          for (const auto& u : upper) {
            I a = l.a[j], b = -u.a[j];
            Row r{std::vector<I>(n), 0};
            for (size_t i = 0; i < n; ++i) r.a[i] = add(mul(b, l.a[i]), mul(a, u.a[i]));
            r.c = add(mul(b, l.c), mul(a, u.c));
            if (dark) r.c = add(r.c, -mul(a - 1, b - 1));
            r.a[j] = 0;
            out.push_back(std::move(r));
          }
        return out;
      };
      if (pick_exact) {
        rows = shadow(0);
        continue;
      }
      if (!solve_inequalities(shadow(0))) return false;
      if (solve_inequalities(shadow(1))) return true;
      I bmax = 0;
      for (const auto& u : upper) bmax = std::max(bmax, -u.a[j]);
      for (const auto& l : lower) {
        I a = l.a[j];
        I kmax = floordiv(mul(bmax, a) - a - bmax, bmax);
        for (I k = 0; k <= kmax; ++k) {
          Row e = l;
          e.c = add(e.c, -k);
          if (feasible({e}, rows)) return true;
        }
      }
      return false;
    }
  }
};

struct Dense {
  std::vector<int> params;  // column -> parameter id
  std::map<int, size_t> col;
};

Dense columns(const std::vector<Constraint>& cs, const Affine* extra = nullptr) {
  Dense d;
  std::set<int> ps;
  for (const auto& c : cs)
    for (const auto& [p, k] : c.e.t) ps.insert(p);
  if (extra)
    for (const auto& [p, k] : extra->t) ps.insert(p);
  d.params.assign(ps.begin(), ps.end());
  for (size_t i = 0; i < d.params.size(); ++i) d.col[d.params[i]] = i;
  return d;
}

Row dense_row(const Dense& d, const Affine& e) {
  Row r{std::vector<I>(d.params.size(), 0), e.c};
  for (const auto& [p, k] : e.t) r.a[d.col.at(p)] = k;
  return r;
}

void split(const Dense& d, const std::vector<Constraint>& cs, std::vector<Row>& eqs, std::vector<Row>& ineqs) {
  for (const auto& c : cs) (c.eq ? eqs : ineqs).push_back(dense_row(d, c.e));
  for (size_t i = 0; i < d.params.size(); ++i) {
    Row nn{std::vector<I>(d.params.size(), 0), 0};
    nn.a[i] = 1;
    ineqs.push_back(nn);
  }
}

bool check(const std::vector<Constraint>& cs, bool integer) {
  auto d = columns(cs);
  std::vector<Row> eqs, ineqs;
  split(d, cs, eqs, ineqs);
  return Solver(integer).feasible(eqs, ineqs);
}

}  // namespace

bool ilp_feasible(const std::vector<Constraint>& cs) { return check(cs, true); }
bool rational_feasible(const std::vector<Constraint>& cs) { return check(cs, false); }

std::optional<std::map<int, Int>> ilp_solve(const std::vector<Constraint>& cs) {
  if (!ilp_feasible(cs)) return std::nullopt;
  auto d = columns(cs);
  std::vector<Constraint> cur = cs;
  std::map<int, Int> sol;
  for (int p : d.params) {
    // smallest value of p among solutions: double, then bisect
    auto fits = [&](Int m) {
      auto t = cur;
      t.push_back({Affine::constant(m) - Affine::var(p), false});
      return ilp_feasible(t);
    };
    Int hi = 0;
    while (!fits(hi)) {
      if (hi > (Int(1) << 60)) throw SolverBudgetExceeded("model search overflow");
      hi = hi * 2 + 1;
    }
    Int lo = hi == 0 ? 0 : (hi - 1) / 2 + 1;
    while (lo < hi) {
      Int mid = lo + (hi - lo) / 2;
      if (fits(mid)) hi = mid;
      else lo = mid + 1;
    }
    sol[p] = lo;
    cur.push_back({Affine::var(p) - Affine::constant(lo), true});
  }
  return sol;
}

bool ilp_entails(const std::vector<Constraint>& lhs, const std::vector<Constraint>& rhs) {
  if (!ilp_feasible(lhs)) return true;
  for (const auto& c : rhs) {
    auto t = lhs;
    t.push_back({c.e * -1 - Affine::constant(1), false});
    if (ilp_feasible(t)) return false;
    if (c.eq) {
      auto u = lhs;
      u.push_back({c.e - Affine::constant(1), false});
      if (ilp_feasible(u)) return false;
    }
  }
  return true;
}

bool objective_unbounded(const std::vector<Constraint>& cs, const Affine& obj) {
  if (!ilp_feasible(cs)) return false;
  // recession cone: homogeneous parts, direction >= 0, obj grows
  std::vector<Constraint> cone;
  for (const auto& c : cs) {
    Affine h = c.e;
    h.c = 0;
    if (!h.is_const()) cone.push_back({h, c.eq});
  }
  Affine g = obj;
  g.c = -1;
  if (g.t.empty()) return false;
  cone.push_back({g, false});
  return rational_feasible(cone);
}

bool integer_objective_unbounded(const LinearSystem& sys) {
  size_t r = sys.k.size();
  if (sys.A.size() != sys.b.size()) throw DimensionMismatch();
  for (const auto& row : sys.A)
    if (row.size() != r) throw DimensionMismatch();
  std::vector<Constraint> cs;
  for (size_t i = 0; i < sys.A.size(); ++i) {
    Affine e = Affine::constant(-sys.b[i]);
    for (size_t j = 0; j < r; ++j) e += Affine::var((int)j, sys.A[i][j]);
    cs.push_back({e, false});
  }
  Affine obj;
  for (size_t j = 0; j < r; ++j) obj += Affine::var((int)j, sys.k[j]);
  return objective_unbounded(cs, obj);
}

}  // namespace flatfifo
