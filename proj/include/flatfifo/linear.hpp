#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "flatfifo/common.hpp"

namespace flatfifo {

using Int = long long;

// c + sum coef[p] * p over integer parameters p.
struct Affine {
  Int c = 0;
  std::map<int, Int> t;  // no zero coefficients

  static Affine constant(Int v) { return Affine{v, {}}; }
  static Affine var(int p, Int coef = 1);

  bool is_const() const { return t.empty(); }
  Int coef(int p) const;
  Affine& operator+=(const Affine& o);
  Affine& operator-=(const Affine& o);
  Affine& operator*=(Int k);
  friend Affine operator+(Affine a, const Affine& b) { return a += b; }
  friend Affine operator-(Affine a, const Affine& b) { return a -= b; }
  friend Affine operator*(Affine a, Int k) { return a *= k; }
  Affine subst(int p, const Affine& by) const;
  Int eval(const std::map<int, Int>& v) const;  // missing parameters read as 0
  std::string str() const;

  auto operator<=>(const Affine&) const = default;
  bool operator==(const Affine&) const = default;
};

// e >= 0, or e == 0 when eq is set.
struct Constraint {
  Affine e;
  bool eq = false;
  auto operator<=>(const Constraint&) const = default;
  bool operator==(const Constraint&) const = default;
  std::string str() const;
};

// Integer feasibility and models over parameters that are all >= 0.
bool ilp_feasible(const std::vector<Constraint>& cs);
std::optional<std::map<int, Int>> ilp_solve(const std::vector<Constraint>& cs);
// Every nonnegative integer point of lhs satisfies rhs.
bool ilp_entails(const std::vector<Constraint>& lhs, const std::vector<Constraint>& rhs);
// Integer points exist and obj is unbounded above on them (parameters >= 0).
bool objective_unbounded(const std::vector<Constraint>& cs, const Affine& obj);
// Rational feasibility of the same constraints (no integrality).
bool rational_feasible(const std::vector<Constraint>& cs);

struct LinearSystem {
  std::vector<std::vector<Int>> A;
  std::vector<Int> b;
  std::vector<Int> k;
};

// Decides whether {x in N^r | Ax >= b} is non-empty and k.x is unbounded on it.
bool integer_objective_unbounded(const LinearSystem& sys);

}  // namespace flatfifo
