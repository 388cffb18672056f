#include <cmath>

#include "doctest.h"
#include "mahler/classify.hpp"
#include "mahler/gallery.hpp"

using namespace mahler;

namespace {

RealOracle golden() { return make_algebraic({BigInt(-1), BigInt(-1), BigInt(1)}, Rational(1), Rational(2)); }
RealOracle sqrt2() { return make_algebraic({BigInt(-2), BigInt(0), BigInt(1)}, Rational(1), Rational(2)); }
RealOracle sqrt3() { return make_algebraic({BigInt(-3), BigInt(0), BigInt(1)}, Rational(1), Rational(2)); }
RealOracle half() { return RealOracle::from_rational(Rational(1, 2)); }

long double dist_ld(long double t) { return std::fabs(t - std::nearbyint(t)); }

ExponentEstimate fixed(const Rational& v, ExponentKind kind) {
  ExponentEstimate e;
  e.value = v;
  e.kind = kind;
  return e;
}

}  // namespace

TEST_SUITE("classify") {
  TEST_CASE("exact zero gives an infinite exponent") {
    auto e = estimate_omega_k({half()}, 1, BigInt(10), Method::brute);
    CHECK(e.infinite());
    CHECK(e.text() == "+inf");
    CHECK(e.witness_height == 2);
  }

  TEST_CASE("Liouville point exceeds the Dirichlet exponent") {
    auto x = make_liouville(BigInt(10), 5);
    auto e = estimate_omega_k({x}, 1, BigInt(1000000), Method::brute);
    REQUIRE(e.value);
    CHECK(*e.value >= Rational(29, 10));
    CHECK(*e.value < 3);
    CHECK(e.witness_height == 1000000);
    CHECK_FALSE(e.beyond_truncation);
  }

  TEST_CASE("estimate matches a scan over all denominators") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
      auto x = realize(sample_point(SampleKind::lebesgue, seed, 1, 64));
      const Rational xr = *x[0].exact() * pow(BigInt(2), 64);
      const long double xv = std::ldexp(static_cast<long double>(BigInt(xr).get_ui()), -64);
      // sup over successive minima of ||q x||
      long double oracle = 0, running = 1;
      for (long q = 1; q <= 10000; ++q) {
        const long double v = dist_ld(q * xv);
        if (v >= running) continue;
        running = v;
        const long double H = std::max<long double>(q, std::fabs(std::nearbyint(q * xv)));
        if (H >= 2) oracle = std::max(oracle, std::log(1 / v) / std::log(H));
        if (H < 2 && 2 * v < 1) oracle = std::max(oracle, std::log(1 / (2 * v)) / std::log(2.0L));
      }
      auto e = estimate_omega_k(x, 1, BigInt(10000), Method::brute);
      REQUIRE(e.value);
      CHECK(e.value->get_d() == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-9));
      CHECK(e.value->get_d() >= 0.9);
    }
  }

  TEST_CASE("a record of height one enters through its double") {
    // only record up to 100 is x - 1, value 1/1000
    auto e = estimate_omega_k({RealOracle::from_rational(Rational(999, 1000))}, 1, BigInt(100), Method::brute);
    REQUIRE(e.value);
    CHECK(e.witness_height == 2);
    CHECK(e.value->get_d() == doctest::Approx(std::log(500.0) / std::log(2.0)).epsilon(1e-9));
  }

  TEST_CASE("estimates are monotone in the search range") {
    auto x = realize(sample_point(SampleKind::lebesgue, 9, 1, 64));
    Rational prev = 0;
    for (long Q : {10L, 100L, 1000L}) {
      auto e = estimate_omega_k(x, 2, BigInt(Q), Method::brute);
      REQUIRE(e.value);
      CHECK(*e.value >= prev);
      prev = *e.value;
    }
    CHECK(prev >= Rational(3, 2));
  }

  TEST_CASE("very well approximable witnesses") {
    auto phi = detect_k_vwa({golden()}, 1, Rational(1, 2), BigInt(2), BigInt(10000));
    CHECK(phi.witnesses.empty());
    CHECK(phi.undecided.empty());

    auto r3 = detect_k_vwa({sqrt2()}, 1, Rational(1, 2), BigInt(2), BigInt(1000));
    auto r6 = detect_k_vwa({sqrt2()}, 1, Rational(1, 2), BigInt(2), BigInt(1000000));
    REQUIRE(r3.witnesses.size() == 1);
    CHECK(r6.witnesses.size() == r3.witnesses.size());
    CHECK(r3.witnesses[0].P.q() == std::vector<BigInt>{2});
    CHECK(r3.witnesses[0].P.a0() == -3);

    auto x = make_liouville(BigInt(2), 4);
    auto lv = detect_k_vwa({x}, 1, Rational(1), BigInt(2), BigInt(100));
    REQUIRE_FALSE(lv.witnesses.empty());
    for (const auto& w : lv.witnesses) {
      const Rational v = abs(Rational(w.P.a0() + w.P.q()[0] * *x.exact()));
      CHECK(v * pow(w.heights.H, 2) <= 1);
    }
    bool at64 = false;
    for (const auto& w : lv.witnesses) at64 = at64 || w.P.q()[0] == 64;
    CHECK(at64);

    auto z = detect_k_vwa({half()}, 1, Rational(1), BigInt(1), BigInt(100));
    CHECK(z.witnesses.empty());
    REQUIRE(z.exact_zeros.size() == 1);
    CHECK(z.exact_zeros[0].q() == std::vector<BigInt>{2});
    CHECK_THROWS_AS(detect_k_vwa({half()}, 1, Rational(0), BigInt(1), BigInt(10)), ConfigError);
  }

  TEST_CASE("class labels") {
    CHECK(class_heuristic({half()}, 2, BigInt(50), Method::brute).label == ClassLabel::a_like);
    auto u = class_heuristic({make_liouville(BigInt(2), 5)}, 1, BigInt(1) << 25, Method::brute);
    CHECK(u.label == ClassLabel::u_like);
    auto s = class_heuristic({golden()}, 1, BigInt(10000), Method::brute);
    CHECK(s.label == ClassLabel::s_like);
    REQUIRE(s.normalized[0]);
    CHECK(*s.normalized[0] >= Rational(1, 2));
    CHECK(s.n == std::vector<std::size_t>{1});
  }

  TEST_CASE("simultaneous best") {
    auto a = simultaneous_best({half()}, BigInt(2));
    CHECK(a.q == 2);
    CHECK(a.value.hi().sign() == 0);
    CHECK(a.exponent.infinite());

    auto b = simultaneous_best({golden()}, BigInt(13));
    CHECK(b.q == 13);
    CHECK(b.value.hi().to_double() == doctest::Approx(0.0344418537).epsilon(1e-8));

    auto c = simultaneous_best({sqrt2(), sqrt3()}, BigInt(100));
    long best_q = 0;
    long double best = 1;
    for (long q = 1; q <= 100; ++q) {
      long double m = std::max(dist_ld(q * std::sqrt(2.0L)), dist_ld(q * std::sqrt(3.0L)));
      if (m < best) best = m, best_q = q;
    }
    CHECK(c.q == best_q);
    CHECK(c.value.lo().to_double() == doctest::Approx(static_cast<double>(best)).epsilon(1e-12));
    CHECK(c.exponent.kind == ExponentKind::simultaneous);
  }

  TEST_CASE("transference at the Dirichlet exponents") {
    for (std::size_t n = 1; n <= 6; ++n) {
      const Rational N = static_cast<unsigned long>(n);
      auto r = transference_check(fixed(N, ExponentKind::linear_form), fixed(1 / N, ExponentKind::simultaneous), n);
      REQUIRE(r.gap_lower);
      REQUIRE(r.gap_upper);
      CHECK(*r.gap_lower == 0);
      CHECK(*r.gap_upper == 0);
      CHECK(r.verdict == TransferenceVerdict::consistent_at_dirichlet);
    }
    auto bad = transference_check(fixed(Rational(1), ExponentKind::linear_form),
                                  fixed(Rational(5), ExponentKind::simultaneous), 2);
    CHECK(bad.verdict == TransferenceVerdict::inconsistent_pending);
    CHECK_THROWS_AS(transference_check(fixed(Rational(1), ExponentKind::simultaneous),
                                       fixed(Rational(1), ExponentKind::simultaneous), 1),
                    ConfigError);
  }

  TEST_CASE("transference on a Liouville point") {
    auto x = make_liouville(BigInt(10), 5);
    auto lin = estimate_omega_k({x}, 1, BigInt(1000000), Method::brute);
    auto sim = simultaneous_best({x}, BigInt(1000000));
    auto r = transference_check(lin, sim.exponent, 1);
    CHECK(r.verdict == TransferenceVerdict::consistent);
    CHECK(to_string(r.verdict) == "consistent");
  }
}
