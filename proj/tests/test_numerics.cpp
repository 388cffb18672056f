#include <cmath>
#include <random>

#include "doctest.h"
#include "mahler/gallery.hpp"
#include "mahler/numerics.hpp"
#include "mahler/oracle.hpp"

using namespace mahler;

namespace {

Rational random_rational(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-1000000, 1000000), den(1, 1000);
  return make_rational(num(rng), den(rng));
}

DyadicInterval random_interval(std::mt19937_64& rng) {
  Rational a = random_rational(rng), b = random_rational(rng);
  if (b < a) std::swap(a, b);
  return {floor_dyadic(a, 40), ceil_dyadic(b, 40)};
}

Rational pick(std::mt19937_64& rng, const DyadicInterval& v) {
  std::uniform_int_distribution<long> t(0, 1000);
  const Rational s = make_rational(t(rng), 1000);
  return v.lo().to_rational() + s * (v.hi().to_rational() - v.lo().to_rational());
}

}  // namespace

TEST_SUITE("numerics") {
  TEST_CASE("rational parsing and formatting") {
    CHECK(parse_rational("-0.125") == Rational(-1, 8));
    CHECK(parse_rational("6/4") == Rational(3, 2));
    CHECK(to_string(parse_rational("6/4")) == "3/2");
    CHECK_THROWS_AS(parse_rational("1/0"), ConfigError);
    CHECK_THROWS_AS(parse_rational("abc"), ConfigError);
    CHECK(to_decimal(Rational(1, 3), 4) == "0.3333");
    CHECK(to_decimal(Rational(1, 3), 4, true) == "0.3334");
    CHECK(to_decimal(Rational(-5, 2), 1) == "-2.5");
    CHECK(round_nearest(Rational(5, 2)) == 3);
    CHECK(round_nearest(Rational(-5, 2)) == -2);
  }

  TEST_CASE("refinement of rational, algebraic and Liouville oracles") {
    auto h = refine(RealOracle::from_rational(Rational(1, 2)), 10);
    CHECK(h.is_point());
    CHECK(h.lo().to_rational() == Rational(1, 2));

    auto r = refine(make_algebraic({BigInt(-2), BigInt(0), BigInt(1)}, Rational(1), Rational(2)), 20);
    CHECK(r.width_at_most(20));
    CHECK(r.lo().to_double() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));

    auto l = refine(make_liouville(BigInt(10), 3), 30);
    CHECK(l.width_at_most(30));
    CHECK(l.contains(Rational(110001, 1000000)));
  }

  TEST_CASE("successive refinements share a point") {
    for (auto o : {make_algebraic({BigInt(-2), BigInt(0), BigInt(1)}, Rational(1), Rational(2)),
                   make_algebraic({BigInt(-2), BigInt(0), BigInt(0), BigInt(1)}, Rational(1), Rational(2)),
                   make_liouville(BigInt(3), 4)}) {
      DyadicInterval acc = refine(o, 1);
      for (long p = 2; p <= 21; ++p) {
        auto next = refine(o, p);
        CHECK(next.width_at_most(p));
        auto meet = acc.intersect(next);
        REQUIRE(meet);
        acc = *meet;
      }
    }
  }

  TEST_CASE("interval arithmetic contains exact results") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 500; ++i) {
      auto a = random_interval(rng), b = random_interval(rng);
      const Rational x = pick(rng, a), y = pick(rng, b);
      CHECK((a + b).contains(Rational(x + y)));
      CHECK((a - b).contains(Rational(x - y)));
      CHECK((a * b).contains(Rational(x * y)));
      CHECK(a.round_out(8).contains(a));
      auto d = int_dist(a);
      CHECK(d.lo().sign() >= 0);
      CHECK(compare(d.hi(), Rational(1, 2)) <= 0);
      const Rational f = x - Rational(floor(x));
      CHECK(d.contains(std::min(f, Rational(1 - f))));
    }
  }

  TEST_CASE("distance to the nearest integer") {
    CHECK(int_dist(DyadicInterval::from_int(BigInt(3))) == DyadicInterval::from_int(BigInt(0)));
    auto half = DyadicInterval::point(Dyadic(BigInt(1), -1));
    CHECK(int_dist(half) == half);
    auto r = refine(make_algebraic({BigInt(-2), BigInt(0), BigInt(1)}, Rational(1), Rational(2)), 60);
    auto d = int_dist(r);
    CHECK(d.lo().to_double() == doctest::Approx(std::sqrt(2.0) - 1).epsilon(1e-12));
    CHECK(d.width_at_most(59));
  }

  TEST_CASE("three-valued comparison") {
    auto stream = [](Rational v) {
      return [v](long p) { return DyadicInterval::from_rational(v, p); };
    };
    CHECK(decide_below(stream(Rational(0)), Rational(1, 4), 64) == Verdict::yes);
    CHECK(decide_below(stream(Rational(1, 2)), Rational(1, 4), 64) == Verdict::no);
    CHECK(decide_below(stream(Rational(1, 4)), Rational(1, 4), 64) == Verdict::undecided);
    CHECK(decide_below(stream(Rational(1, 3)), Rational(1, 3), 64) == Verdict::undecided);
  }

  TEST_CASE("rational powers and exponent bounds") {
    auto z = DyadicInterval::from_int(BigInt(8));
    auto c = pow_rational(z, Rational(1, 3), 64);
    CHECK(c.contains(Rational(2)));
    CHECK(c.width_at_most(63));
    auto w = pow_rational(DyadicInterval::from_rational(Rational(1, 10), 200), Rational(5, 2), 120);
    CHECK(w.lo().to_double() == doctest::Approx(std::pow(0.1, 2.5)).epsilon(1e-12));
    auto zero = pow_rational(DyadicInterval::from_int(BigInt(0)), Rational(0), 10);
    CHECK(zero.contains(Rational(1)));
    // log(1/v) / log h for v = 1/1000, h = 10 is 3
    const Dyadic v = ceil_dyadic(Rational(1, 1000), 100);
    const Rational lo = exponent_lower_bound(v, BigInt(10));
    CHECK(lo <= 3);
    CHECK(lo > Rational(2999999, 1000000));
    CHECK(exponent_upper_bound(floor_dyadic(Rational(1, 1000), 100), BigInt(10)) >= 3);
  }
}
