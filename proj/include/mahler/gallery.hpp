#pragma once

// Test points: rationals, algebraic numbers, truncated Liouville series,
// points on zero sets, and seeded Lebesgue / Cantor samples.

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "mahler/oracle.hpp"
#include "mahler/poly.hpp"

namespace mahler {

struct RationalSpec {
  std::vector<Rational> values;
};

struct AlgebraicSpec {
  std::vector<AlgebraicData> coords;
};

struct LiouvilleSpec {
  BigInt base;
  unsigned terms = 0;
};

/// The last coordinate solves P(free..., t) = 0 with t in [lo, hi].
struct ZeroSetSpec {
  unsigned d = 0, k = 0;
  BigInt a0;
  std::vector<BigInt> q;
  std::vector<Rational> free;
  Rational lo, hi;
};

struct LebesgueSpec {
  std::uint64_t seed = 0;
  unsigned d = 1;
  unsigned bits = 64;
};

struct CantorSpec {
  std::uint64_t seed = 0;
  unsigned d = 1;
  unsigned digits = 32;
};

using PointSpec = std::variant<RationalSpec, AlgebraicSpec, LiouvilleSpec, ZeroSetSpec, LebesgueSpec, CantorSpec>;

inline constexpr std::size_t kLiouvilleBudgetBits = std::size_t{1} << 20;
inline constexpr unsigned kMaxSampleBits = 1u << 14;
inline constexpr unsigned kMaxCantorDigits = 1u << 13;

/// sum_{j=1..m} b^(-j!), exact, with the tail bound 2 b^(-(m+1)!).
RealOracle make_liouville(const BigInt& b, unsigned m, std::size_t budget_bits = kLiouvilleBudgetBits);
/// Root of minpoly in [lo, hi]; rejects intervals without exactly one root.
RealOracle make_algebraic(const std::vector<BigInt>& minpoly, const Rational& lo, const Rational& hi);

/// Solves for the last coordinate. Returns a RationalSpec when the root is
/// rational, otherwise an AlgebraicSpec (free coordinates as linear minimal
/// polynomials). Throws DomainError unless the slice has exactly one root in
/// [lo, hi].
PointSpec on_zero_set(const IntPolynomial& P, const std::vector<Rational>& free, const Rational& lo,
                      const Rational& hi);

enum class SampleKind { lebesgue, cantor };

/// Deterministic per (kind, seed, d, resolution): resolution is bits for
/// Lebesgue samples and ternary digits for Cantor samples.
PointSpec sample_point(SampleKind kind, std::uint64_t seed, unsigned d, unsigned resolution);

/// SplitMix64.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();

 private:
  std::uint64_t state_;
};

/// Per-sample seed for sample i of a run seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

std::vector<RealOracle> realize(const PointSpec& spec);
unsigned dimension(const PointSpec& spec);
std::string describe(const PointSpec& spec);

nlohmann::json to_json(const PointSpec& spec);
PointSpec point_from_json(const nlohmann::json& j);
/// Text forms:
///   rational:1/2,1/3
///   algebraic:-2,0,1@1:2;-1,-1,1@1:2     (minpoly low to high @ lo:hi, per coordinate)
///   liouville:10,5
///   zero_set:2,2|-1|0,0,1,0,1|3/5|0:1    (d,k | a0 | q | free | lo:hi)
///   lebesgue:7,2,64                      (seed, d, bits)
///   cantor:7,1,32                        (seed, d, digits)
/// or a JSON object.
PointSpec parse_point(std::string_view text);

}  // namespace mahler
