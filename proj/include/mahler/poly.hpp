#pragma once

// Integer polynomials over a MonomialBasis, heights, and certified values of
// linear forms a0 + q . f(x).

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mahler/monomial.hpp"
#include "mahler/numerics.hpp"
#include "mahler/oracle.hpp"

namespace mahler {

/// P(x) = a0 + sum_i q_i f_i(x).
class IntPolynomial {
 public:
  IntPolynomial(BasisPtr b, BigInt a0, std::vector<BigInt> q);

  const MonomialBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const BigInt& a0() const { return a0_; }
  const std::vector<BigInt>& q() const { return q_; }

  bool is_zero() const;
  /// Nonzero nonconstant part.
  bool search_admissible() const;
  std::string to_string() const;

  friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) {
    return *a.basis_ == *b.basis_ && a.a0_ == b.a0_ && a.q_ == b.q_;
  }

 private:
  BasisPtr basis_;
  BigInt a0_;
  std::vector<BigInt> q_;
};

struct HeightPair {
  BigInt H;       // max(|a0|, |q_i|)
  BigInt Htilde;  // max |q_i|
};

HeightPair heights(const IntPolynomial& P);
BigInt sup_norm(const std::vector<BigInt>& q);

Rational eval_exact(const IntPolynomial& P, const std::vector<Rational>& x);
/// Width <= (sum |q_i|) 2^(-p) <= n H~ 2^(-p).
DyadicInterval eval_enclosure(const IntPolynomial& P, const std::vector<RealOracle>& x, long p);

struct PrecisionPolicy {
  long p_start = 64;
  long p_max = 2048;
  long rel_bits = 48;  // target relative width of a nonzero value
};

/// Certified |a0 + q . y|.
struct CertifiedValue {
  BigInt a0;
  DyadicInterval value;
  std::optional<Rational> exact;  // present when y is rational
  bool exact_zero = false;
  bool undecided = false;  // enclosure still contains 0 at p_max without proof
};

/// The vector y = f(x) against which linear forms are measured. Cheap to
/// copy; caches enclosures.
class FormTarget {
 public:
  static FormTarget from_point(const std::vector<RealOracle>& x, BasisPtr b);
  /// y used directly (each coordinate is its own monomial).
  static FormTarget from_reals(const std::vector<RealOracle>& y);

  std::size_t size() const;
  const MonomialBasis& basis() const;
  const BasisPtr& basis_ptr() const;
  const std::vector<RealOracle>& coordinates() const;
  bool is_exact() const;
  /// Requires is_exact().
  const std::vector<Rational>& exact_values() const;
  /// Each enclosure has width <= 2^(-p).
  std::vector<DyadicInterval> enclosures(long p) const;
  /// Fractional parts of y_i scaled by 2^128, each within 2 units.
  const std::vector<unsigned __int128>& fractions() const;

  /// Exact decision of a0 + q.y == 0 when the point allows it (rational
  /// coordinates, or one algebraic coordinate with the rest rational).
  std::optional<bool> exact_zero(const BigInt& a0, const std::vector<BigInt>& q) const;

  /// Certifies |a0 + q.y| with a0 = -round(q.y).
  CertifiedValue certify(const std::vector<BigInt>& q, const PrecisionPolicy& policy = {}) const;
  CertifiedValue certify_with(const BigInt& a0, const std::vector<BigInt>& q,
                              const PrecisionPolicy& policy = {}) const;
  /// Enclosure of q.y with width <= 2^(-p).
  DyadicInterval dot(const std::vector<BigInt>& q, long p) const;

 private:
  struct State;
  explicit FormTarget(std::shared_ptr<State> s) : state_(std::move(s)) {}
  std::shared_ptr<State> state_;
};

/// Enclosure of a rational with relative width about 2^(-rel_bits).
DyadicInterval enclose_relative(const Rational& v, long rel_bits);

}  // namespace mahler
