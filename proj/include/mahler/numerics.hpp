#pragma once

// Exact integers and rationals (GMP), dyadic numbers and outward-rounded
// dyadic intervals.

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mahler {

using BigInt = mpz_class;
using Rational = mpq_class;

/// Base class for every diagnostic failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input or configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A configured resource guard refused the request.
class ResourceCapError : public Error {
 public:
  using Error::Error;
};

/// An oracle failed to deliver the requested width.
class OracleError : public Error {
 public:
  using Error::Error;
};

/// Mathematical precondition violated (no sign change, dependent rows, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Decimal string conversion.
std::string to_string(const BigInt& v);
std::string to_string(const Rational& v);
BigInt parse_bigint(std::string_view text);
/// Accepts "a", "a/b" and finite decimals such as "-0.125".
Rational parse_rational(std::string_view text);

/// Fixed-point decimal with `digits` fraction digits, rounded down or up.
std::string to_decimal(const Rational& v, int digits, bool round_up = false);

Rational make_rational(const BigInt& num, const BigInt& den);
BigInt floor(const Rational& r);
BigInt ceil(const Rational& r);
/// Nearest integer, halves rounded up: floor(r + 1/2).
BigInt round_nearest(const Rational& r);
BigInt abs(const BigInt& v);
Rational abs(const Rational& v);
std::size_t bit_length(const BigInt& v);
BigInt pow(const BigInt& base, unsigned long e);
Rational pow(const Rational& base, unsigned long e);
BigInt binomial(unsigned long n, unsigned long k);

/// mant * 2^exp, exact.
class Dyadic {
 public:
  Dyadic() = default;
  Dyadic(BigInt mant, long exp = 0);
  static Dyadic from_int(long v) { return Dyadic(BigInt(v), 0); }

  const BigInt& mant() const { return mant_; }
  long exp() const { return exp_; }
  int sign() const { return sgn(mant_); }

  Rational to_rational() const;
  double to_double() const;
  long double to_long_double() const;
  /// Rounded to a multiple of 2^(-p): toward -inf or +inf.
  Dyadic floor_at(long p) const;
  Dyadic ceil_at(long p) const;
  /// floor(value) as an integer.
  BigInt floor_int() const;

  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a);
  friend std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b);
  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return (a <=> b) == std::strong_ordering::equal;
  }
  friend std::strong_ordering compare(const Dyadic& a, const Rational& b);

  /// Multiplies by 2^shift.
  Dyadic scaled(long shift) const { return Dyadic(mant_, exp_ + shift); }

 private:
  void normalize();
  BigInt mant_ = 0;
  long exp_ = 0;
};

Dyadic floor_dyadic(const Rational& r, long p);
Dyadic ceil_dyadic(const Rational& r, long p);

/// Closed interval [lo, hi] with dyadic endpoints. Arithmetic is exact on
/// endpoints; `round_out` widens to a precision grid.
class DyadicInterval {
 public:
  DyadicInterval() = default;
  DyadicInterval(Dyadic lo, Dyadic hi);
  static DyadicInterval point(Dyadic v) { return {v, v}; }
  static DyadicInterval from_rational(const Rational& r, long p);
  static DyadicInterval from_int(const BigInt& v) { return point(Dyadic(v, 0)); }

  const Dyadic& lo() const { return lo_; }
  const Dyadic& hi() const { return hi_; }
  Dyadic width() const { return hi_ - lo_; }
  Dyadic mid_floor(long p) const;
  bool is_point() const { return lo_ == hi_; }
  bool contains(const Rational& r) const;
  bool contains(const DyadicInterval& o) const { return lo_ <= o.lo_ && o.hi_ <= hi_; }
  bool contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }
  /// width <= 2^(-p)
  bool width_at_most(long p) const;
  std::optional<DyadicInterval> intersect(const DyadicInterval& o) const;

  DyadicInterval round_out(long p) const;
  DyadicInterval abs() const;

  friend DyadicInterval operator+(const DyadicInterval& a, const DyadicInterval& b);
  friend DyadicInterval operator-(const DyadicInterval& a, const DyadicInterval& b);
  friend DyadicInterval operator*(const DyadicInterval& a, const DyadicInterval& b);
  friend DyadicInterval operator-(const DyadicInterval& a);
  friend bool operator==(const DyadicInterval& a, const DyadicInterval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

  /// Hull of two intervals.
  friend DyadicInterval hull(const DyadicInterval& a, const DyadicInterval& b);
  friend DyadicInterval max(const DyadicInterval& a, const DyadicInterval& b);
  friend DyadicInterval min(const DyadicInterval& a, const DyadicInterval& b);

 private:
  Dyadic lo_, hi_;
};

/// Encloses { dist(t, Z) : t in v }; always inside [0, 1/2].
DyadicInterval int_dist(const DyadicInterval& v);

/// Encloses z^e for z >= 0 (lo clamped at 0) and rational e >= 0, with
/// endpoints on the 2^(-p) grid. 0^0 is taken as 1.
DyadicInterval pow_rational(const DyadicInterval& z, const Rational& e, long p);

/// Lower bound of log(1/v) / log(h) given 0 < v <= v_hi and integer h >= 2,
/// as a rational (MPFR with directed rounding). Never negative.
Rational exponent_lower_bound(const Dyadic& v_hi, const BigInt& h);
/// Upper bound of the same quantity given v >= v_lo > 0.
Rational exponent_upper_bound(const Dyadic& v_lo, const BigInt& h);

enum class Verdict { yes, no, undecided };
std::string to_string(Verdict v);

/// Decides value < threshold by querying enclosures at increasing precision.
/// `stream(p)` must return an enclosure of one fixed value of width <= 2^(-p).
Verdict decide_below(const std::function<DyadicInterval(long)>& stream,
                     const Rational& threshold, long p_max);

}  // namespace mahler
