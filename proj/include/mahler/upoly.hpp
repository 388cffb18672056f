#pragma once

// Dense univariate polynomials over Q: enough algebra for root isolation,
// Sturm counting and exact-zero tests at algebraic points.

#include <utility>
#include <vector>

#include "mahler/numerics.hpp"

namespace mahler {

class UPoly {
 public:
  UPoly() = default;
  /// c[i] is the coefficient of x^i.
  explicit UPoly(std::vector<Rational> c);
  static UPoly from_integers(const std::vector<BigInt>& c);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  const Rational& leading() const { return c_.back(); }

  Rational eval(const Rational& x) const;
  int sign_at(const Rational& x) const;
  UPoly derivative() const;
  UPoly monic() const;

  friend UPoly operator+(const UPoly& a, const UPoly& b);
  friend UPoly operator-(const UPoly& a, const UPoly& b);
  friend UPoly operator*(const UPoly& a, const UPoly& b);
  friend UPoly operator*(const Rational& s, const UPoly& a);

  static std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b);
  /// Monic gcd; gcd(0, 0) = 0.
  friend UPoly gcd(UPoly a, UPoly b);
  UPoly squarefree() const;

  std::vector<UPoly> sturm_chain() const;
  /// Distinct real roots in (a, b]; requires a squarefree polynomial.
  int count_roots(const Rational& a, const Rational& b) const;
  /// Every real root lies in [-bound, bound].
  Rational root_bound() const;

 private:
  void trim();
  std::vector<Rational> c_;
};

/// Sign of sum c_i x^i at a dyadic point, computed in integers.
int sign_at(const std::vector<BigInt>& c, const Dyadic& x);

}  // namespace mahler
