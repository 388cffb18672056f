#include "mahler/oracle.hpp"

#include <mutex>

#include "mahler/upoly.hpp"

namespace mahler {

std::string to_string(RealOracle::Kind k) {
  switch (k) {
    case RealOracle::Kind::rational: return "rational";
    case RealOracle::Kind::algebraic: return "algebraic";
    case RealOracle::Kind::liouville: return "liouville";
    case RealOracle::Kind::sampled: return "sampled";
    case RealOracle::Kind::derived: return "derived";
  }
  return "derived";
}

RealOracle::RealOracle(Kind kind, Query query, std::string description)
    : state_(std::make_shared<const State>(State{kind, std::move(query), std::move(description),
                                                 std::nullopt, std::nullopt, std::nullopt})) {}

RealOracle RealOracle::from_rational(const Rational& value, Kind kind, std::string description) {
  if (description.empty()) description = to_string(value);
  auto s = std::make_shared<State>();
  s->kind = kind;
  s->description = std::move(description);
  s->exact = value;
  s->query = [value](long p) { return DyadicInterval::from_rational(value, p + 1); };
  return RealOracle(std::shared_ptr<const State>(std::move(s)));
}

RealOracle RealOracle::from_liouville(LiouvilleData data, const Rational& value) {
  auto s = std::make_shared<State>();
  s->kind = Kind::liouville;
  s->description = "liouville(" + to_string(data.base) + "," + std::to_string(data.terms) + ")";
  s->exact = value;
  s->liouville = std::move(data);
  s->query = [value](long p) { return DyadicInterval::from_rational(value, p + 1); };
  return RealOracle(std::shared_ptr<const State>(std::move(s)));
}

namespace {

// Bracket refinement for a simple root; the bracket only shrinks, so every
// answer contains the same root.
class RootRefiner {
 public:
  RootRefiner(std::vector<BigInt> poly, Rational lo, Rational hi)
      : poly_(std::move(poly)), deriv_(UPoly::from_integers(poly_).derivative()), lo_(std::move(lo)),
        hi_(std::move(hi)) {
    sign_lo_ = UPoly::from_integers(poly_).sign_at(lo_);
  }

  DyadicInterval query(long p) {
    std::lock_guard lock(mutex_);
    const long target = p + 2;
    const Rational goal(BigInt(1), pow(BigInt(2), static_cast<unsigned long>(std::max(target, 0L))));
    UPoly f = UPoly::from_integers(poly_);
    int iterations = 0;
    while (hi_ - lo_ > goal) {
      if (++iterations > 100000) throw OracleError("algebraic oracle failed to converge");
      Rational mid = (lo_ + hi_) / 2;
      if (try_newton(f, mid, target)) continue;
      const Rational& c = mid;
      int s = f.sign_at(c);
      if (s == 0) {
        lo_ = c;
        hi_ = c;
        break;
      }
      (s == sign_lo_ ? lo_ : hi_) = c;
    }
    return {floor_dyadic(lo_, target), ceil_dyadic(hi_, target)};
  }

 private:
  bool try_newton(const UPoly& f, const Rational& mid, long target) {
    Rational w = hi_ - lo_;
    if (w > Rational(1, 1 << 10)) return false;
    Rational dv = deriv_.eval(mid);
    if (dv == 0) return false;
    Rational x1 = mid - f.eval(mid) / dv;
    // expected new half-width ~ w^2, never below the target grid
    long bits = 0;
    Rational ww = w * w;
    while (bits < target + 3 && Rational(BigInt(1), pow(BigInt(2), static_cast<unsigned long>(bits + 1))) > ww) ++bits;
    Rational half(BigInt(1), pow(BigInt(2), static_cast<unsigned long>(bits)));
    Rational x1d = floor_dyadic(x1, bits + 2).to_rational();
    Rational a = x1d - half, b = x1d + half;
    if (a <= lo_ || b >= hi_) return false;
    int sa = f.sign_at(a), sb = f.sign_at(b);
    if (sa == sign_lo_ && sb == -sign_lo_) {
      lo_ = a;
      hi_ = b;
      return true;
    }
    return false;
  }

  std::mutex mutex_;
  std::vector<BigInt> poly_;
  UPoly deriv_;
  Rational lo_, hi_;
  int sign_lo_ = 0;
};

}  // namespace

RealOracle RealOracle::from_algebraic(AlgebraicData data) {
  if (!(data.iso_lo < data.iso_hi)) throw DomainError("isolating interval must satisfy lo < hi");
  UPoly f = UPoly::from_integers(data.minpoly);
  if (f.degree() < 1) throw DomainError("minimal polynomial must have degree >= 1");
  int sa = f.sign_at(data.iso_lo), sb = f.sign_at(data.iso_hi);
  if (sa == 0 || sb == 0 || sa == sb) {
    throw DomainError("polynomial does not change sign on the isolating interval");
  }
  if (f.squarefree().count_roots(data.iso_lo, data.iso_hi) != 1) {
    throw DomainError("isolating interval contains more than one root");
  }
  UPoly g = gcd(f, f.derivative());
  if (g.degree() >= 1 && g.squarefree().count_roots(data.iso_lo, data.iso_hi) > 0) {
    throw DomainError("root is not simple");
  }
  auto refiner = std::make_shared<RootRefiner>(data.minpoly, data.iso_lo, data.iso_hi);
  auto s = std::make_shared<State>();
  s->kind = Kind::algebraic;
  std::string poly;
  for (std::size_t i = 0; i < data.minpoly.size(); ++i) {
    if (i) poly += ",";
    poly += to_string(data.minpoly[i]);
  }
  s->description = "algebraic([" + poly + "]," + to_string(data.iso_lo) + "," + to_string(data.iso_hi) + ")";
  s->algebraic = std::move(data);
  s->query = [refiner](long p) { return refiner->query(p); };
  return RealOracle(std::shared_ptr<const State>(std::move(s)));
}

DyadicInterval refine(const RealOracle& o, long p, int max_attempts) {
  if (p < 0) throw DomainError("refine: negative precision");
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    DyadicInterval v = o.query(p + 8L * attempt);
    if (v.width_at_most(p)) return v;
  }
  throw OracleError("oracle '" + o.description() + "' did not reach width 2^-" + std::to_string(p));
}

}  // namespace mahler
