#include <functional>
#include <random>

#include "acceptance.hpp"
#include "flatfifo/linear.hpp"

using namespace flatfifo;

namespace acceptance {

namespace {

using Vec = std::vector<Int>;

bool satisfies(const LinearSystem& s, const Vec& x) {
  for (size_t i = 0; i < s.A.size(); ++i) {
    Int v = 0;
    for (size_t j = 0; j < x.size(); ++j) v += s.A[i][j] * x[j];
    if (v < s.b[i]) return false;
  }
  return true;
}

// Some integer point of [0, box]^r satisfies Ax >= b.
bool feasible_in_box(const LinearSystem& s, int r, Int box) {
  Vec x(r, 0);
  while (true) {
    if (satisfies(s, x)) return true;
    int i = 0;
    while (i < r && ++x[i] > box) x[i++] = 0;
    if (i == r) return false;
  }
}

Int det(std::vector<Vec> m) {
  // Bareiss elimination keeps every intermediate value integral
  int n = (int)m.size();
  Int sign = 1, prev = 1;
  for (int k = 0; k < n; ++k) {
    if (m[k][k] == 0) {
      int p = k + 1;
      while (p < n && m[p][k] == 0) ++p;
      if (p == n) return 0;
      std::swap(m[k], m[p]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

// The cone {d >= 0, Ad >= 0} is pointed, so it contains d with k.d > 0 iff one of its extreme rays does.
// Extreme rays span the kernel of r-1 tight constraints; the kernel vector comes from signed minors.
bool improving_ray(const LinearSystem& s, int r) {
  std::vector<Vec> rows = s.A;
  for (int j = 0; j < r; ++j) {
    Vec e(r, 0);
    e[j] = 1;
    rows.push_back(e);
  }
  auto in_cone = [&](const Vec& d) {
    for (const auto& row : rows) {
      Int v = 0;
      for (int j = 0; j < r; ++j) v += row[j] * d[j];
      if (v < 0) return false;
    }
    return true;
  };
  auto improves = [&](const Vec& d) {
    Int v = 0;
    for (int j = 0; j < r; ++j) v += s.k[j] * d[j];
    return v > 0;
  };
  if (r == 1) return in_cone({1}) && improves({1});
  int n = (int)rows.size();
  std::vector<int> pick(r - 1);
  std::function<bool(int, int)> go = [&](int from, int depth) {
    if (depth == r - 1) {
      Vec d(r);
      bool zero = true;
      for (int j = 0; j < r; ++j) {
        std::vector<Vec> minor;
        for (int i : pick) {
          Vec row;
          for (int c = 0; c < r; ++c)
            if (c != j) row.push_back(rows[i][c]);
          minor.push_back(row);
        }
        d[j] = ((j % 2) ? -1 : 1) * det(minor);
        zero = zero && d[j] == 0;
      }
      if (zero) return false;
      Vec neg(r);
      for (int j = 0; j < r; ++j) neg[j] = -d[j];
      return (in_cone(d) && improves(d)) || (in_cone(neg) && improves(neg));
    }
    for (int i = from; i < n; ++i) {
      pick[depth] = i;
      if (go(i + 1, depth + 1)) return true;
    }
    return false;
  };
  return go(0, 0);
}

}  // namespace

Outcome objective_lemma() {
  Stopwatch sw;
  std::mt19937 rng(10);
  std::uniform_int_distribution<int> dim(1, 4), nrows(1, 4), coef(-5, 5);
  int agree = 0, unbounded = 0, infeasible = 0, total = 500;
  std::string first_bad;
  for (int it = 0; it < total; ++it) {
    int r = dim(rng), m = nrows(rng);
    LinearSystem s;
    for (int i = 0; i < m; ++i) {
      Vec row;
      for (int j = 0; j < r; ++j) row.push_back(coef(rng));
      s.A.push_back(row);
      s.b.push_back(coef(rng));
    }
    for (int j = 0; j < r; ++j) s.k.push_back(coef(rng));
    bool feasible = feasible_in_box(s, r, 50);
    bool want = feasible && improving_ray(s, r);
    bool got = integer_objective_unbounded(s);
    agree += got == want;
    unbounded += want;
    infeasible += !feasible;
    if (got != want && first_bad.empty()) first_bad = "system " + std::to_string(it);
  }
  double t = sw.seconds();
  Detail d;
  d("agree", std::to_string(agree) + "/" + std::to_string(total))("unbounded", unbounded)("infeasible", infeasible)(
      "limit_s", 60);
  if (!first_bad.empty()) d("first_mismatch", first_bad);
  return {agree == total && t < 60, d.str()};
}

}  // namespace acceptance
