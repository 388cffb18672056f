#pragma once

// Searches for small |P(x)|: exact box minima, record tables, Dirichlet
// profiles and weighted statistics.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mahler/lattice.hpp"
#include "mahler/poly.hpp"

namespace mahler {

/// brute: exact exhaustive minima (direct enumeration for small boxes,
/// complete lattice enumeration otherwise). lattice: LLL proposals only.
enum class Method { brute, lattice };
std::string to_string(Method m);
Method parse_method(std::string_view s);

struct SearchConfig {
  PrecisionPolicy precision;
  unsigned threads = 0;                       // 0: MAHLER_LAB_THREADS, else hardware
  std::uint64_t brute_cap = 1'000'000'000;    // evaluations allowed in brute_force_best
  std::uint64_t direct_limit = 2'000'000;     // larger boxes use lattice enumeration
  std::size_t node_cap = kDefaultNodeCap;
  std::size_t pool_cap = 2'000'000;
};

unsigned worker_count(const SearchConfig& cfg);

struct WeightVector {
  std::vector<Rational> r;

  std::size_t support() const;
  bool normalized() const;
  /// All zero weights come after all nonzero ones.
  bool prefix_form() const;
  void validate(std::size_t n) const;

  static WeightVector uniform(std::size_t n);
  /// 1/n_k on the first n_k coordinates, 0 on the remaining n - n_k.
  static WeightVector prefix(std::size_t n, std::size_t n_k);
};

/// Per-coordinate bounds floor(Q^(s r_i)), s = |supp r|; the matching
/// threshold for |q.y + p| is Q^(-s).
std::vector<BigInt> weighted_bounds(const BigInt& Q, const WeightVector& w);

struct BestForm {
  std::vector<BigInt> q;
  CertifiedValue value;
  std::vector<std::vector<BigInt>> ties;  // alternatives that could not be separated
};

/// Exhaustive minimum of |q.y + p| over 0 < |q|_inf <= Q by direct
/// enumeration; refuses when (2Q+1)^n exceeds the configured cap.
BestForm brute_force_best(const FormTarget& y, const BigInt& Q, const SearchConfig& cfg = {});
/// Exact minimum over |q_i| <= bounds_i, q != 0 (either engine).
BestForm box_minimum(const FormTarget& y, const std::vector<BigInt>& bounds, const SearchConfig& cfg = {});

struct ApproximationRecord {
  IntPolynomial P;
  HeightPair heights;
  DyadicInterval value;
  bool exact_zero = false;
  bool undecided = false;
  std::optional<Rational> ratio;  // certified lower bound of log(1/|P|)/log H
};

ApproximationRecord make_record(const FormTarget& y, const std::vector<BigInt>& q, const CertifiedValue& v);

struct RecordTable {
  unsigned d = 0, k = 0;
  Method method = Method::brute;
  BigInt Q_max;
  std::vector<ApproximationRecord> entries;  // successive minima by max |q_i|
  std::optional<DyadicInterval> c_min;       // min over entries of |P| * Htilde^n
  bool exact_zero = false;
  bool undecided = false;
};

RecordTable record_scan(const FormTarget& y, const BigInt& Q_max, Method method, const SearchConfig& cfg = {});

struct EpsilonSample {
  BigInt Q;
  DyadicInterval eps;
  IntPolynomial witness;
  std::optional<Rational> exact;  // when y is rational
};

/// Reads eps*(Q) off a complete record table with Q <= table.Q_max.
EpsilonSample epsilon_from_records(const FormTarget& y, const RecordTable& table, const BigInt& Q);
EpsilonSample epsilon_star(const FormTarget& y, const BigInt& Q, const std::optional<WeightVector>& w,
                           Method method, const SearchConfig& cfg = {});

struct DirichletProfile {
  std::optional<WeightVector> weights;
  Method method = Method::brute;
  std::vector<EpsilonSample> samples;
  bool singular_trend = false;
  DyadicInterval tail_sup;  // sup of eps* over the last third
};

DirichletProfile dirichlet_profile(const FormTarget& y, const std::vector<BigInt>& schedule,
                                   const std::optional<WeightVector>& w, Method method,
                                   const SearchConfig& cfg = {});

struct CandidateSet {
  std::vector<std::vector<BigInt>> accepted;
  std::vector<std::vector<BigInt>> undecided;
};

/// Every q in the weighted box with |q.y + p| <= factor * Q^(-s), certified.
CandidateSet dirichlet_candidates(const FormTarget& y, const BigInt& Q, const std::optional<WeightVector>& w,
                                  const Rational& factor = Rational(1), const SearchConfig& cfg = {});

/// Every q != 0 in the box with min_p |q.y + p| <= threshold, possibly with a
/// few extras; callers certify.
std::vector<std::vector<BigInt>> threshold_candidates(const FormTarget& y, const std::vector<BigInt>& bounds,
                                                      const Rational& threshold, const SearchConfig& cfg = {});

struct ScalarBest {
  BigInt q;
  DyadicInterval value;
  std::vector<BigInt> ties;
};

/// min over 1 <= q <= Q_max of q * max_i ||q y_i||^(1/r_i), zero weights
/// contributing 0.
ScalarBest weighted_bad_statistic(const std::vector<RealOracle>& y, const WeightVector& r, const BigInt& Q_max,
                                  const SearchConfig& cfg = {});

struct SimultaneousScan {
  ScalarBest best;                 // min over q of max_i ||q y_i||
  bool exact_hit = false;          // some q makes every q y_i an integer
  Rational exponent = 0;           // certified lower bound of max_q log(1/max_i ||q y_i||)/log q, q >= 2
  BigInt exponent_q;               // where that maximum was found
  std::size_t records = 0;         // successive minima of max_i ||q y_i||
};

SimultaneousScan simultaneous_scan(const std::vector<RealOracle>& y, const BigInt& q_max,
                                   const SearchConfig& cfg = {});

/// Certified ||q y|| (distance to the nearest integer).
DyadicInterval int_dist_at(const RealOracle& y, const BigInt& q, long p);

}  // namespace mahler
