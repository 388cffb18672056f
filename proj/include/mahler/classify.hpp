#pragma once

// Exponent estimates, very-well-approximable witnesses, heuristic class
// labels and transference diagnostics built on the search routines.

#include <optional>
#include <string>
#include <vector>

#include "mahler/search.hpp"

namespace mahler {

enum class ExponentKind { linear_form, simultaneous };
std::string to_string(ExponentKind k);

/// Certified lower bound on an exponent from a finite search.
struct ExponentEstimate {
  std::optional<Rational> value;  // nullopt: +inf (exact zero / exact hit)
  ExponentKind kind = ExponentKind::linear_form;
  BigInt Q_max;
  std::size_t witnesses = 0;      // approximations that contributed a ratio
  BigInt witness_height;          // height where the supremum was attained
  bool beyond_truncation = false; // search passed the scale a truncated series is valid for

  bool infinite() const { return !value.has_value(); }
  /// Decimal value or "+inf".
  std::string text(int digits = 6) const;
};

/// Sup of the record ratios; a record of height 1 enters as 2P (height 2).
ExponentEstimate estimate_from_records(const RecordTable& table);
/// omega_k lower bound for the point x with monomials of degree <= k.
ExponentEstimate estimate_omega_k(const std::vector<RealOracle>& x, unsigned k, const BigInt& Q_max, Method method,
                                  const SearchConfig& cfg = {});

struct VwaWitness {
  IntPolynomial P;
  HeightPair heights;
  DyadicInterval value;
};

struct VwaReport {
  Rational eps;
  BigInt H_lo, H_hi;
  std::vector<VwaWitness> witnesses;         // |P(x)| <= H^-(n+eps), certified
  std::vector<IntPolynomial> exact_zeros;    // the point lies on P = 0
  std::vector<IntPolynomial> undecided;
};

/// All P with H(P) in [H_lo, H_hi] and |P(x)| <= H(P)^-(n+eps). An empty
/// witness list means none in range, not "not very well approximable". When
/// the point lies on a zero set inside the range only the smallest zeros are
/// reported and the search is skipped.
VwaReport detect_k_vwa(const std::vector<RealOracle>& x, unsigned k, const Rational& eps, const BigInt& H_lo,
                       const BigInt& H_hi, const SearchConfig& cfg = {});

enum class ClassLabel { a_like, s_like, u_like, inconclusive };
std::string to_string(ClassLabel l);

struct ClassOptions {
  Rational u_threshold = 3;
  Rational s_slack = Rational(1, 2);
};

struct ClassReport {
  std::vector<unsigned> k;
  std::vector<std::size_t> n;                     // monomial counts n_k
  std::vector<ExponentEstimate> omega;            // per k
  std::vector<std::optional<Rational>> normalized;  // omega_k / n_k, nullopt for +inf
  ClassLabel label = ClassLabel::inconclusive;
};

ClassReport class_heuristic(const std::vector<RealOracle>& x, unsigned k_max, const BigInt& Q_max, Method method,
                            const SearchConfig& cfg = {}, const ClassOptions& opt = {});

struct SimultaneousBest {
  BigInt q;
  DyadicInterval value;            // max_i ||q y_i||
  std::vector<BigInt> ties;
  ExponentEstimate exponent;       // kind simultaneous
  std::size_t records = 0;
};

SimultaneousBest simultaneous_best(const std::vector<RealOracle>& y, const BigInt& q_max,
                                   const SearchConfig& cfg = {});

enum class TransferenceVerdict { consistent, consistent_at_dirichlet, inconsistent_pending };
std::string to_string(TransferenceVerdict v);

/// Khintchine transference for y in R^n (omega: linear forms, lambda:
/// simultaneous):  omega >= n lambda + n - 1,  lambda >= omega / ((n-1) omega + n).
struct TransferenceReport {
  std::optional<Rational> gap_lower;  // omega - (n lambda + n - 1); nullopt: infinite, sign as lower_holds
  std::optional<Rational> gap_upper;  // lambda - omega/((n-1) omega + n); nullopt: infinite, sign as upper_holds
  bool lower_holds = false;
  bool upper_holds = false;
  TransferenceVerdict verdict = TransferenceVerdict::inconsistent_pending;
};

TransferenceReport transference_check(const ExponentEstimate& lin, const ExponentEstimate& sim, std::size_t n,
                                      const Rational& slack = Rational(3, 10));

}  // namespace mahler
