#pragma once

// On-demand certified enclosures of real numbers.

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mahler/numerics.hpp"

namespace mahler {

/// Integer polynomial with a rational isolating interval holding exactly one
/// simple root.
struct AlgebraicData {
  std::vector<BigInt> minpoly;  // minpoly[i] is the coefficient of x^i
  Rational iso_lo;
  Rational iso_hi;
};

/// Truncated series sum_{j<=terms} base^(-j!).
struct LiouvilleData {
  BigInt base;
  unsigned terms = 0;
  BigInt truncation_denominator;  // base^(terms!)
  Rational tail_bound;            // upper bound for the omitted infinite tail
};

class RealOracle {
 public:
  enum class Kind { rational, algebraic, liouville, sampled, derived };
  using Query = std::function<DyadicInterval(long)>;

  RealOracle(Kind kind, Query query, std::string description);

  static RealOracle from_rational(const Rational& value, Kind kind = Kind::rational,
                                  std::string description = {});
  /// Validates sign change and a single root on the interval.
  static RealOracle from_algebraic(AlgebraicData data);
  static RealOracle from_liouville(LiouvilleData data, const Rational& value);

  Kind kind() const { return state_->kind; }
  const std::string& description() const { return state_->description; }
  /// Raw query; `refine` enforces the width contract.
  DyadicInterval query(long p) const { return state_->query(p); }

  const std::optional<Rational>& exact() const { return state_->exact; }
  const std::optional<AlgebraicData>& algebraic() const { return state_->algebraic; }
  const std::optional<LiouvilleData>& liouville() const { return state_->liouville; }

 private:
  struct State {
    Kind kind;
    Query query;
    std::string description;
    std::optional<Rational> exact;
    std::optional<AlgebraicData> algebraic;
    std::optional<LiouvilleData> liouville;
  };
  explicit RealOracle(std::shared_ptr<const State> s) : state_(std::move(s)) {}
  std::shared_ptr<const State> state_;
};

std::string to_string(RealOracle::Kind k);

/// Enclosure of width <= 2^(-p). Retries with extra bits up to `max_attempts`
/// times, then fails with OracleError.
DyadicInterval refine(const RealOracle& o, long p, int max_attempts = 16);

}  // namespace mahler
