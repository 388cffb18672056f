#include "mahler/numerics.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mahler {

std::string to_string(const BigInt& v) { return v.get_str(10); }

std::string to_string(const Rational& v) { return v.get_str(10); }

BigInt parse_bigint(std::string_view text) {
  std::string s(text);
  if (s.empty()) throw ConfigError("empty integer literal");
  std::size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) throw ConfigError("malformed integer literal '" + s + "'");
  for (std::size_t i = start; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) {
      throw ConfigError("malformed integer literal '" + s + "'");
    }
  }
  if (s[0] == '+') s.erase(0, 1);
  return BigInt(s, 10);
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  if (auto slash = s.find('/'); slash != std::string::npos) {
    BigInt num = parse_bigint(std::string_view(s).substr(0, slash));
    BigInt den = parse_bigint(std::string_view(s).substr(slash + 1));
    if (den == 0) throw ConfigError("zero denominator in '" + s + "'");
    return make_rational(num, den);
  }
  if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    bool neg = !whole.empty() && whole[0] == '-';
    if (neg || (!whole.empty() && whole[0] == '+')) whole.erase(0, 1);
    if (whole.empty()) whole = "0";
    if (frac.empty()) throw ConfigError("malformed decimal '" + s + "'");
    BigInt w = parse_bigint(whole);
    BigInt f = parse_bigint(frac);
    if (frac[0] == '-' || frac[0] == '+') throw ConfigError("malformed decimal '" + s + "'");
    BigInt scale = pow(BigInt(10), frac.size());
    Rational r = make_rational(w * scale + f, scale);
    return neg ? Rational(-r) : r;
  }
  return Rational(parse_bigint(s));
}

Rational make_rational(const BigInt& num, const BigInt& den) {
  if (den == 0) throw DomainError("zero denominator");
  Rational r(num, den);
  r.canonicalize();
  return r;
}

BigInt floor(const Rational& r) {
  BigInt out;
  mpz_fdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

BigInt ceil(const Rational& r) {
  BigInt out;
  mpz_cdiv_q(out.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return out;
}

std::string to_decimal(const Rational& v, int digits, bool round_up) {
  const BigInt scale = pow(BigInt(10), static_cast<unsigned long>(digits));
  const Rational t = v * scale;
  BigInt m = round_up ? ceil(t) : floor(t);
  std::string sign = m < 0 ? "-" : "";
  m = abs(m);
  BigInt ip, fp;
  mpz_fdiv_qr(ip.get_mpz_t(), fp.get_mpz_t(), m.get_mpz_t(), scale.get_mpz_t());
  std::string out = sign + ip.get_str();
  if (digits > 0) {
    std::string f = fp.get_str();
    out += "." + std::string(static_cast<std::size_t>(digits) - f.size(), '0') + f;
  }
  return out;
}

BigInt round_nearest(const Rational& r) { return floor(Rational(r + Rational(1, 2))); }

BigInt abs(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

Rational abs(const Rational& v) { return v < 0 ? Rational(-v) : v; }

std::size_t bit_length(const BigInt& v) {
  if (v == 0) return 0;
  return mpz_sizeinbase(v.get_mpz_t(), 2);
}

BigInt pow(const BigInt& base, unsigned long e) {
  BigInt out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), e);
  return out;
}

Rational pow(const Rational& base, unsigned long e) {
  return make_rational(pow(BigInt(base.get_num()), e), pow(BigInt(base.get_den()), e));
}

BigInt binomial(unsigned long n, unsigned long k) {
  BigInt out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

// ---------------------------------------------------------------- Dyadic

Dyadic::Dyadic(BigInt mant, long exp) : mant_(std::move(mant)), exp_(exp) { normalize(); }

void Dyadic::normalize() {
  if (mant_ == 0) {
    exp_ = 0;
    return;
  }
  auto tz = mpz_scan1(mant_.get_mpz_t(), 0);
  if (tz > 0) {
    mpz_fdiv_q_2exp(mant_.get_mpz_t(), mant_.get_mpz_t(), tz);
    exp_ += static_cast<long>(tz);
  }
}

Rational Dyadic::to_rational() const {
  if (exp_ >= 0) {
    BigInt v;
    mpz_mul_2exp(v.get_mpz_t(), mant_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
    return Rational(v);
  }
  BigInt den;
  mpz_setbit(den.get_mpz_t(), static_cast<mp_bitcnt_t>(-exp_));
  return make_rational(mant_, den);
}

long double Dyadic::to_long_double() const {
  if (mant_ == 0) return 0.0L;
  BigInt a = mahler::abs(mant_);
  long e = exp_;
  auto bl = static_cast<long>(bit_length(a));
  if (bl > 64) {
    mpz_fdiv_q_2exp(a.get_mpz_t(), a.get_mpz_t(), static_cast<mp_bitcnt_t>(bl - 64));
    e += bl - 64;
  }
  // a now fits in 64 bits
  unsigned long long hi = 0;
  mpz_export(&hi, nullptr, -1, sizeof(hi), 0, 0, a.get_mpz_t());
  long double v = std::ldexp(static_cast<long double>(hi), static_cast<int>(std::clamp(e, -100000L, 100000L)));
  return mant_ < 0 ? -v : v;
}

double Dyadic::to_double() const { return static_cast<double>(to_long_double()); }

Dyadic Dyadic::floor_at(long p) const {
  if (exp_ >= -p) return *this;
  BigInt m;
  mpz_fdiv_q_2exp(m.get_mpz_t(), mant_.get_mpz_t(), static_cast<mp_bitcnt_t>(-p - exp_));
  return Dyadic(m, -p);
}

Dyadic Dyadic::ceil_at(long p) const {
  if (exp_ >= -p) return *this;
  BigInt m;
  mpz_cdiv_q_2exp(m.get_mpz_t(), mant_.get_mpz_t(), static_cast<mp_bitcnt_t>(-p - exp_));
  return Dyadic(m, -p);
}

BigInt Dyadic::floor_int() const {
  BigInt m;
  if (exp_ >= 0) {
    mpz_mul_2exp(m.get_mpz_t(), mant_.get_mpz_t(), static_cast<mp_bitcnt_t>(exp_));
  } else {
    mpz_fdiv_q_2exp(m.get_mpz_t(), mant_.get_mpz_t(), static_cast<mp_bitcnt_t>(-exp_));
  }
  return m;
}

namespace {

// Both mantissas expressed at the smaller exponent.
std::pair<BigInt, BigInt> aligned(const Dyadic& a, const Dyadic& b, long& e) {
  e = std::min(a.exp(), b.exp());
  BigInt x, y;
  mpz_mul_2exp(x.get_mpz_t(), a.mant().get_mpz_t(), static_cast<mp_bitcnt_t>(a.exp() - e));
  mpz_mul_2exp(y.get_mpz_t(), b.mant().get_mpz_t(), static_cast<mp_bitcnt_t>(b.exp() - e));
  return {x, y};
}

}  // namespace

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  if (a.mant_ == 0) return b;
  if (b.mant_ == 0) return a;
  long e = 0;
  auto [x, y] = aligned(a, b, e);
  return Dyadic(BigInt(x + y), e);
}

Dyadic operator-(const Dyadic& a) { return Dyadic(BigInt(-a.mant_), a.exp_); }

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  return Dyadic(BigInt(a.mant_ * b.mant_), a.exp_ + b.exp_);
}

std::strong_ordering operator<=>(const Dyadic& a, const Dyadic& b) {
  int sa = a.sign(), sb = b.sign();
  if (sa != sb) return sa <=> sb;
  if (sa == 0) return std::strong_ordering::equal;
  long e = 0;
  auto [x, y] = aligned(a, b, e);
  int c = cmp(x, y);
  return c <=> 0;
}

std::strong_ordering compare(const Dyadic& a, const Rational& b) {
  int c = cmp(a.to_rational(), b);
  return c <=> 0;
}

Dyadic floor_dyadic(const Rational& r, long p) {
  BigInt num = r.get_num();
  BigInt out;
  if (p >= 0) {
    mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), static_cast<mp_bitcnt_t>(p));
    mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), r.get_den_mpz_t());
  } else {
    BigInt den = r.get_den();
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), static_cast<mp_bitcnt_t>(-p));
    mpz_fdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  }
  return Dyadic(out, -p);
}

Dyadic ceil_dyadic(const Rational& r, long p) {
  return -floor_dyadic(Rational(-r), p);
}

// ------------------------------------------------------- DyadicInterval

DyadicInterval::DyadicInterval(Dyadic lo, Dyadic hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (hi_ < lo_) throw DomainError("DyadicInterval with lo > hi");
}

DyadicInterval DyadicInterval::from_rational(const Rational& r, long p) {
  const BigInt& den = r.get_den();
  if (mpz_popcount(den.get_mpz_t()) == 1) {
    long shift = static_cast<long>(mpz_scan1(den.get_mpz_t(), 0));
    return point(Dyadic(BigInt(r.get_num()), -shift));
  }
  return {floor_dyadic(r, p), ceil_dyadic(r, p)};
}

Dyadic DyadicInterval::mid_floor(long p) const { return (lo_ + hi_).scaled(-1).floor_at(p); }

bool DyadicInterval::contains(const Rational& r) const {
  return compare(lo_, r) <= 0 && compare(hi_, r) >= 0;
}

bool DyadicInterval::width_at_most(long p) const { return width() <= Dyadic(BigInt(1), -p); }

std::optional<DyadicInterval> DyadicInterval::intersect(const DyadicInterval& o) const {
  Dyadic lo = std::max(lo_, o.lo_);
  Dyadic hi = std::min(hi_, o.hi_);
  if (hi < lo) return std::nullopt;
  return DyadicInterval(lo, hi);
}

DyadicInterval DyadicInterval::round_out(long p) const { return {lo_.floor_at(p), hi_.ceil_at(p)}; }

DyadicInterval DyadicInterval::abs() const {
  if (lo_.sign() >= 0) return *this;
  if (hi_.sign() <= 0) return -*this;
  return {Dyadic(), std::max(-lo_, hi_)};
}

DyadicInterval operator+(const DyadicInterval& a, const DyadicInterval& b) {
  return {a.lo_ + b.lo_, a.hi_ + b.hi_};
}

DyadicInterval operator-(const DyadicInterval& a) { return {-a.hi_, -a.lo_}; }

DyadicInterval operator-(const DyadicInterval& a, const DyadicInterval& b) { return a + (-b); }

DyadicInterval operator*(const DyadicInterval& a, const DyadicInterval& b) {
  if (a.is_point() && b.is_point()) return DyadicInterval::point(a.lo_ * b.lo_);
  Dyadic p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_, p3 = a.hi_ * b.lo_, p4 = a.hi_ * b.hi_;
  return {std::min({p1, p2, p3, p4}), std::max({p1, p2, p3, p4})};
}

DyadicInterval hull(const DyadicInterval& a, const DyadicInterval& b) {
  return {std::min(a.lo_, b.lo_), std::max(a.hi_, b.hi_)};
}

DyadicInterval max(const DyadicInterval& a, const DyadicInterval& b) {
  return {std::max(a.lo_, b.lo_), std::max(a.hi_, b.hi_)};
}

DyadicInterval min(const DyadicInterval& a, const DyadicInterval& b) {
  return {std::min(a.lo_, b.lo_), std::min(a.hi_, b.hi_)};
}

namespace {

Dyadic dist_to_int(const Dyadic& t) {
  Dyadic half(BigInt(1), -1);
  Dyadic r(BigInt((t + half).floor_int()), 0);
  Dyadic d = t - r;
  return d.sign() < 0 ? -d : d;
}

}  // namespace

DyadicInterval int_dist(const DyadicInterval& v) {
  const Dyadic half(BigInt(1), -1);
  if (Dyadic(BigInt(1), 0) <= v.width()) return {Dyadic(), half};
  Dyadic dlo = dist_to_int(v.lo()), dhi = dist_to_int(v.hi());
  // smallest integer >= lo
  BigInt c = -(-v.lo()).floor_int();
  bool has_int = Dyadic(c, 0) <= v.hi();
  // smallest half-integer >= lo
  BigInt ch = -(-(v.lo() - half)).floor_int();
  bool has_half = Dyadic(ch, 0) + half <= v.hi();
  Dyadic lo = has_int ? Dyadic() : std::min(dlo, dhi);
  Dyadic hi = has_half ? half : std::max(dlo, dhi);
  return {lo, hi};
}

namespace {

Dyadic pow_dyadic(const Dyadic& d, unsigned long a) {
  BigInt m = pow(d.mant(), a);
  return Dyadic(m, d.exp() * static_cast<long>(a));
}

// floor or ceil of (m * 2^e) as integer
BigInt scaled_int(const Dyadic& d, long shift, bool up) {
  long e = d.exp() + shift;
  BigInt out;
  if (e >= 0) {
    mpz_mul_2exp(out.get_mpz_t(), d.mant().get_mpz_t(), static_cast<mp_bitcnt_t>(e));
  } else if (up) {
    mpz_cdiv_q_2exp(out.get_mpz_t(), d.mant().get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  } else {
    mpz_fdiv_q_2exp(out.get_mpz_t(), d.mant().get_mpz_t(), static_cast<mp_bitcnt_t>(-e));
  }
  return out;
}

Dyadic root_bound(const Dyadic& x, unsigned long b, long p, bool up) {
  BigInt n = scaled_int(x, p * static_cast<long>(b), up);
  BigInt r;
  int exact = mpz_root(r.get_mpz_t(), n.get_mpz_t(), b);
  if (up && !exact) r += 1;
  return Dyadic(r, -p);
}

}  // namespace

DyadicInterval pow_rational(const DyadicInterval& z, const Rational& e, long p) {
  if (e < 0) throw DomainError("pow_rational: negative exponent");
  if (e == 0) return DyadicInterval::from_int(BigInt(1));
  Dyadic lo = z.lo().sign() < 0 ? Dyadic() : z.lo();
  Dyadic hi = z.hi().sign() < 0 ? Dyadic() : z.hi();
  if (!e.get_num().fits_ulong_p() || !e.get_den().fits_ulong_p()) {
    throw ResourceCapError("pow_rational: exponent too large");
  }
  unsigned long a = e.get_num().get_ui();
  unsigned long b = e.get_den().get_ui();
  // keep mantissas bounded before exponentiating
  long guard = p + 64;
  lo = lo.floor_at(guard);
  hi = hi.ceil_at(guard);
  Dyadic lo_a = pow_dyadic(lo, a), hi_a = pow_dyadic(hi, a);
  if (b == 1) return DyadicInterval(lo_a.floor_at(p), hi_a.ceil_at(p));
  return DyadicInterval(root_bound(lo_a, b, p, false), root_bound(hi_a, b, p, true));
}

namespace {

struct Mpfr {
  mpfr_t v;
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v, prec); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
};

void set_dyadic(Mpfr& out, const Dyadic& d) {
  mpfr_set_prec(out.v, static_cast<mpfr_prec_t>(std::max<std::size_t>(bit_length(d.mant()), 2)));
  mpfr_set_z_2exp(out.v, d.mant().get_mpz_t(), d.exp(), MPFR_RNDN);  // exact
}

Rational to_rational(const Mpfr& x) {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), x.v);
  return q;
}

constexpr mpfr_prec_t kLogPrec = 160;

}  // namespace

Rational exponent_lower_bound(const Dyadic& v_hi, const BigInt& h) {
  if (v_hi.sign() <= 0) throw DomainError("exponent_lower_bound: nonpositive value");
  if (h < 2) throw DomainError("exponent_lower_bound: height below 2");
  Mpfr v(2), hv(2), lv(kLogPrec), lh(kLogPrec), q(kLogPrec);
  set_dyadic(v, v_hi);
  mpfr_set_prec(hv.v, static_cast<mpfr_prec_t>(std::max<std::size_t>(bit_length(h), 2)));
  mpfr_set_z(hv.v, h.get_mpz_t(), MPFR_RNDN);
  mpfr_log(lv.v, v.v, MPFR_RNDU);  // log(v) rounded up
  mpfr_neg(lv.v, lv.v, MPFR_RNDN);  // -log(v) rounded down (exact negation)
  if (mpfr_sgn(lv.v) <= 0) return Rational(0);
  mpfr_log(lh.v, hv.v, MPFR_RNDU);
  mpfr_div(q.v, lv.v, lh.v, MPFR_RNDD);
  return to_rational(q);
}

Rational exponent_upper_bound(const Dyadic& v_lo, const BigInt& h) {
  if (v_lo.sign() <= 0) throw DomainError("exponent_upper_bound: nonpositive value");
  if (h < 2) throw DomainError("exponent_upper_bound: height below 2");
  Mpfr v(2), hv(2), lv(kLogPrec), lh(kLogPrec), q(kLogPrec);
  set_dyadic(v, v_lo);
  mpfr_set_prec(hv.v, static_cast<mpfr_prec_t>(std::max<std::size_t>(bit_length(h), 2)));
  mpfr_set_z(hv.v, h.get_mpz_t(), MPFR_RNDN);
  mpfr_log(lv.v, v.v, MPFR_RNDD);
  mpfr_neg(lv.v, lv.v, MPFR_RNDN);
  if (mpfr_sgn(lv.v) <= 0) return Rational(0);
  mpfr_log(lh.v, hv.v, MPFR_RNDD);
  mpfr_div(q.v, lv.v, lh.v, MPFR_RNDU);
  return to_rational(q);
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::yes: return "yes";
    case Verdict::no: return "no";
    case Verdict::undecided: return "undecided";
  }
  return "undecided";
}

Verdict decide_below(const std::function<DyadicInterval(long)>& stream, const Rational& threshold,
                     long p_max) {
  for (long p = std::min(16L, p_max);; p = std::min(2 * p, p_max)) {
    DyadicInterval v = stream(p);
    if (compare(v.hi(), threshold) < 0) return Verdict::yes;
    if (compare(v.lo(), threshold) > 0) return Verdict::no;
    if (p >= p_max) break;
  }
  return Verdict::undecided;
}

}  // namespace mahler
