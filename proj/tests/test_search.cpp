#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "mahler/search.hpp"

using namespace mahler;

namespace {

RealOracle golden() { return RealOracle::from_algebraic({{BigInt(-1), BigInt(-1), BigInt(1)}, Rational(1), Rational(2)}); }
RealOracle sqrt2() { return RealOracle::from_algebraic({{BigInt(-2), BigInt(0), BigInt(1)}, Rational(1), Rational(2)}); }
RealOracle rat(long a, long b) { return RealOracle::from_rational(make_rational(a, b)); }

const long double kPhi = (1.0L + std::sqrt(5.0L)) / 2;
const long double kSqrt2 = std::sqrt(2.0L);

long double dist_ld(long double t) { return std::fabs(t - std::nearbyint(t)); }

Rational frac_dist(const Rational& t) {
  Rational f = t - Rational(floor(t));
  return std::min(f, Rational(Rational(1) - f));
}

template <class F>
void each_box(const std::vector<long>& bounds, F&& f) {
  std::vector<long> cur(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) cur[i] = -bounds[i];
  for (;;) {
    auto first = std::find_if(cur.begin(), cur.end(), [](long v) { return v != 0; });
    if (first != cur.end() && *first > 0) f(cur);
    std::size_t j = cur.size();
    while (j-- > 0) {
      if (cur[j] < bounds[j]) {
        ++cur[j];
        break;
      }
      cur[j] = -bounds[j];
    }
    if (j == static_cast<std::size_t>(-1)) return;
  }
}

Rational exact_eps(const std::vector<Rational>& y, long Q) {
  const std::size_t n = y.size();
  Rational best = 1000;
  each_box(std::vector<long>(n, Q), [&](const std::vector<long>& q) {
    Rational t = 0;
    long h = 0;
    for (std::size_t i = 0; i < n; ++i) {
      t += q[i] * y[i];
      h = std::max(h, std::labs(q[i]));
    }
    Rational term = std::max(make_rational(h, Q), Rational(frac_dist(t) * pow(BigInt(Q), n)));
    best = std::min(best, term);
  });
  return best;
}

std::vector<Rational> rationals(std::mt19937_64& rng, std::size_t n, long den) {
  std::uniform_int_distribution<long> num(0, den - 1);
  std::vector<Rational> out;
  for (std::size_t i = 0; i < n; ++i) {
    Rational r(num(rng), den);
    r.canonicalize();
    out.push_back(r);
  }
  return out;
}

std::vector<RealOracle> oracles(const std::vector<Rational>& y) {
  std::vector<RealOracle> out;
  for (const auto& v : y) out.push_back(RealOracle::from_rational(v));
  return out;
}

SearchConfig threads(unsigned t) {
  SearchConfig c;
  c.threads = t;
  return c;
}

}  // namespace

TEST_SUITE("search") {
  TEST_CASE("golden ratio box minimum at Q = 13") {
    auto y = FormTarget::from_reals({golden()});
    auto b = brute_force_best(y, BigInt(13));
    CHECK(b.q == std::vector<BigInt>{13});
    CHECK(b.value.a0 == -21);
    CHECK(b.ties.empty());
    long double oracle = 1;
    for (int q = 1; q <= 13; ++q) oracle = std::min(oracle, dist_ld(q * kPhi));
    CHECK(b.value.value.lo().to_double() == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-12));
    CHECK(b.value.value.hi().to_double() == doctest::Approx(0.0344418537).epsilon(1e-8));
  }

  TEST_CASE("epsilon star of the golden ratio") {
    auto y = FormTarget::from_reals({golden()});
    for (long Q : {3L, 7L, 20L, 100L}) {
      long double oracle = 10;
      for (long q = 1; q <= Q; ++q) {
        oracle = std::min(oracle, std::max<long double>(static_cast<long double>(q) / Q, dist_ld(q * kPhi) * Q));
      }
      for (Method m : {Method::brute, Method::lattice}) {
        auto e = epsilon_star(y, BigInt(Q), std::nullopt, m);
        CHECK(e.eps.lo().to_double() <= static_cast<double>(oracle) + 1e-12);
        if (m == Method::brute) CHECK(e.eps.hi().to_double() == doctest::Approx(static_cast<double>(oracle)));
      }
    }
    CHECK(epsilon_star(y, BigInt(3), std::nullopt, Method::brute).eps.hi().to_double() ==
          doctest::Approx(0.7082039325).epsilon(1e-9));
  }

  TEST_CASE("epsilon star of one half is 2/Q") {
    auto y = FormTarget::from_reals({rat(1, 2)});
    for (long Q = 2; Q <= 40; ++Q) {
      auto e = epsilon_star(y, BigInt(Q), std::nullopt, Method::brute);
      REQUIRE(e.exact);
      CHECK(*e.exact == Rational(2) / Q);
      CHECK(e.eps.contains(Rational(2, Q)));
    }
    auto prof = dirichlet_profile(y, {BigInt(2), BigInt(4), BigInt(8), BigInt(16), BigInt(32)}, std::nullopt,
                                  Method::brute);
    CHECK(prof.singular_trend);
  }

  TEST_CASE("golden ratio profile is not singular") {
    auto y = FormTarget::from_reals({golden()});
    std::vector<BigInt> sched;
    for (long Q = 10; Q <= 10000; Q *= 2) sched.emplace_back(Q);
    auto prof = dirichlet_profile(y, sched, std::nullopt, Method::brute);
    CHECK_FALSE(prof.singular_trend);
    CHECK(prof.tail_sup.hi().to_double() > 0.6);
    for (const auto& s : prof.samples) CHECK(s.eps.hi().to_double() <= 1.0);
  }

  TEST_CASE("exact epsilon star against exhaustive rational oracle") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 12; ++trial) {
      const std::size_t n = 1 + trial % 3;
      auto yv = rationals(rng, n, 97);
      auto y = FormTarget::from_reals(oracles(yv));
      for (long Q : {1L, 2L, 5L}) {
        auto e = epsilon_star(y, BigInt(Q), std::nullopt, Method::brute);
        REQUIRE(e.exact);
        CHECK(*e.exact == exact_eps(yv, Q));
        CHECK(*e.exact <= 1);
      }
    }
  }

  TEST_CASE("both engines agree with the exhaustive minimum") {
    std::mt19937_64 rng(11);
    SearchConfig lattice_only;
    lattice_only.direct_limit = 0;
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t n = 2 + trial % 2;
      auto yv = rationals(rng, n, 1000003);
      auto y = FormTarget::from_reals(oracles(yv));
      std::vector<long> bl(n);
      std::vector<BigInt> bounds(n);
      for (std::size_t i = 0; i < n; ++i) {
        bl[i] = 1 + static_cast<long>(rng() % 9);
        bounds[i] = bl[i];
      }
      Rational oracle = 1;
      each_box(bl, [&](const std::vector<long>& q) {
        Rational t = 0;
        for (std::size_t i = 0; i < n; ++i) t += q[i] * yv[i];
        oracle = std::min(oracle, frac_dist(t));
      });
      auto a = box_minimum(y, bounds);
      auto b = box_minimum(y, bounds, lattice_only);
      REQUIRE(a.value.exact);
      REQUIRE(b.value.exact);
      CHECK(*a.value.exact == oracle);
      CHECK(*b.value.exact == oracle);
      CHECK(a.q == b.q);
    }
  }

  TEST_CASE("exact zeros are found before enumeration") {
    auto y = FormTarget::from_point({rat(1, 3)}, basis(1, 2));
    auto b = box_minimum(y, {BigInt(3), BigInt(3)});
    CHECK(b.value.exact_zero);
    CHECK(b.q == std::vector<BigInt>{1, -3});
    auto c = box_minimum(y, {BigInt(2), BigInt(2)});
    CHECK_FALSE(c.value.exact_zero);
    CHECK(*c.value.exact == Rational(1, 9));

    auto big = FormTarget::from_point({rat(3, 5), rat(4, 5)}, basis(2, 2));
    auto z = box_minimum(big, std::vector<BigInt>(5, BigInt(100000)));
    CHECK(z.value.exact_zero);
    CHECK(sup_norm(z.q) == 1);
  }

  TEST_CASE("an algebraic relation inside the basis is exact") {
    auto y = FormTarget::from_point({sqrt2()}, basis(1, 2));
    for (long Q : {3L, 50L}) {
      auto e = epsilon_star(y, BigInt(Q), std::nullopt, Method::brute);
      CHECK(e.eps.contains(Rational(1, Q)));
      CHECK(e.witness.q() == std::vector<BigInt>{0, 1});
      CHECK(e.witness.a0() == -2);
    }
  }

  TEST_CASE("records are successive minima") {
    auto y = FormTarget::from_point({sqrt2(), golden()}, basis(2, 1));
    auto t = record_scan(y, BigInt(60), Method::brute);
    REQUIRE(t.entries.size() >= 2);
    CHECK(t.entries.front().heights.Htilde == 1);
    for (std::size_t i = 1; i < t.entries.size(); ++i) {
      CHECK(t.entries[i - 1].heights.Htilde < t.entries[i].heights.Htilde);
      CHECK(t.entries[i].value.hi() < t.entries[i - 1].value.lo());
    }
    // every record beats every smaller box
    for (const auto& e : t.entries) {
      long double best = 1;
      const long h = e.heights.Htilde.get_si();
      for (long a = -h; a <= h; ++a) {
        for (long b = -h; b <= h; ++b) {
          if ((a || b) && std::max(std::labs(a), std::labs(b)) < h) best = std::min(best, dist_ld(a * kSqrt2 + b * kPhi));
        }
      }
      CHECK(e.value.hi().to_long_double() < best);
    }
    auto lat = record_scan(y, BigInt(60), Method::lattice);
    CHECK(lat.entries.back().value.lo() >= t.entries.back().value.lo());
  }

  TEST_CASE("constant of the golden ratio") {
    auto y = FormTarget::from_reals({golden()});
    auto t = record_scan(y, BigInt(1000), Method::brute);
    REQUIRE(t.c_min);
    CHECK(t.c_min->lo().to_double() == doctest::Approx(0.3819660113).epsilon(1e-9));
    CHECK_FALSE(t.exact_zero);
    for (const auto& e : t.entries) {
      if (e.heights.H >= 2) CHECK(e.ratio);
    }
  }

  TEST_CASE("Dirichlet candidates always exist") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const std::size_t n = 1 + trial % 3;
      auto y = FormTarget::from_reals(oracles(rationals(rng, n, 10007)));
      for (long Q : {2L, 4L, 9L}) {
        auto c = dirichlet_candidates(y, BigInt(Q), std::nullopt);
        CHECK_FALSE(c.accepted.empty());
        CHECK(c.undecided.empty());
      }
    }
    auto g = FormTarget::from_point({golden(), sqrt2()}, basis(2, 2));
    CHECK_FALSE(dirichlet_candidates(g, BigInt(3), std::nullopt).accepted.empty());
  }

  TEST_CASE("prefix weights reproduce the smaller basis") {
    const std::vector<RealOracle> x{golden(), rat(2, 7)};
    auto small = FormTarget::from_point(x, basis(2, 1));
    auto large = FormTarget::from_point(x, basis(2, 2));
    for (long Q = 1; Q <= 10; ++Q) {
      auto a = dirichlet_candidates(small, BigInt(Q), std::nullopt);
      auto b = dirichlet_candidates(large, BigInt(Q), WeightVector::prefix(5, 2));
      REQUIRE(a.accepted.size() == b.accepted.size());
      for (std::size_t i = 0; i < a.accepted.size(); ++i) {
        auto padded = a.accepted[i];
        padded.resize(5, BigInt(0));
        CHECK(padded == b.accepted[i]);
      }
      auto ea = epsilon_star(small, BigInt(Q), std::nullopt, Method::brute);
      auto eb = epsilon_star(large, BigInt(Q), WeightVector::prefix(5, 2), Method::brute);
      CHECK(ea.eps.hi().to_double() == doctest::Approx(eb.eps.hi().to_double()).epsilon(1e-15));
    }
  }

  TEST_CASE("weighted bounds") {
    WeightVector w{{Rational(1, 2), Rational(1, 3), Rational(1, 6)}};
    auto b = weighted_bounds(BigInt(100), w);
    CHECK(b == std::vector<BigInt>{1000, 100, 10});
    CHECK(weighted_bounds(BigInt(10), WeightVector::prefix(4, 2)) == std::vector<BigInt>{10, 10, 0, 0});
    CHECK_THROWS_AS((WeightVector{{Rational(-1), Rational(2)}}.validate(2)), ConfigError);
    CHECK_THROWS_AS((WeightVector{{Rational(0)}}.validate(1)), ConfigError);
    CHECK(WeightVector::prefix(5, 2).prefix_form());
    CHECK_FALSE((WeightVector{{Rational(0), Rational(1)}}.prefix_form()));
  }

  TEST_CASE("weighted epsilon star against exhaustive search") {
    auto y = FormTarget::from_reals({rat(3, 11), rat(5, 13)});
    WeightVector w{{Rational(2, 3), Rational(1, 3)}};
    for (long Q : {4L, 9L, 27L}) {
      auto e = epsilon_star(y, BigInt(Q), w, Method::brute);
      long double oracle = 100;
      const long double s1 = std::pow(static_cast<long double>(Q), 4.0L / 3), s2 = std::pow(static_cast<long double>(Q), 2.0L / 3);
      for (long a = -90; a <= 90; ++a) {
        for (long b = -12; b <= 12; ++b) {
          if (!a && !b) continue;
          long double d = dist_ld(a * 3.0L / 11 + b * 5.0L / 13);
          oracle = std::min(oracle, std::max({std::labs(a) / s1, std::labs(b) / s2, d * Q * Q}));
        }
      }
      CHECK(e.eps.hi().to_double() == doctest::Approx(static_cast<double>(oracle)).epsilon(1e-12));
    }
  }

  TEST_CASE("bad statistic of the golden ratio") {
    auto s = weighted_bad_statistic({golden()}, WeightVector{{Rational(1)}}, BigInt(100000));
    CHECK(s.q == 1);
    CHECK(s.value.lo().to_double() == doctest::Approx(0.3819660113).epsilon(1e-9));
    CHECK(s.ties.empty());
    auto z = weighted_bad_statistic({rat(1, 6), golden()}, WeightVector{{Rational(1), Rational(0)}}, BigInt(50));
    CHECK(z.q == 6);
    CHECK(z.value.is_point());
    CHECK(z.value.hi().sign() == 0);
    CHECK_THROWS_AS(weighted_bad_statistic({golden()}, WeightVector{{Rational(1, 2)}}, BigInt(5)), ConfigError);
  }

  TEST_CASE("bad statistic matches a direct scan") {
    const std::vector<RealOracle> y{golden(), sqrt2()};
    WeightVector w{{Rational(1, 3), Rational(2, 3)}};
    auto s = weighted_bad_statistic(y, w, BigInt(3000));
    long double best = 10;
    for (long q = 1; q <= 3000; ++q) {
      long double v = q * std::max(std::pow(dist_ld(q * kPhi), 3.0L), std::pow(dist_ld(q * kSqrt2), 1.5L));
      best = std::min(best, v);
    }
    CHECK(s.value.hi().to_double() == doctest::Approx(static_cast<double>(best)).epsilon(1e-9));
  }

  TEST_CASE("simultaneous scan") {
    auto s = simultaneous_scan({golden()}, BigInt(1000));
    CHECK(s.best.q == 987);
    CHECK_FALSE(s.exact_hit);
    CHECK(s.exponent > Rational(19, 10));
    CHECK(s.exponent < Rational(21, 10));
    CHECK(s.records == 15);
    auto r = simultaneous_scan({rat(1, 4), rat(1, 6)}, BigInt(100));
    CHECK(r.exact_hit);
    CHECK(r.best.q == 12);
  }

  TEST_CASE("thread count does not change results") {
    auto y = FormTarget::from_point({golden(), sqrt2()}, basis(2, 2));
    auto a = record_scan(y, BigInt(12), Method::brute, threads(1));
    auto b = record_scan(y, BigInt(12), Method::brute, threads(4));
    REQUIRE(a.entries.size() == b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) CHECK(a.entries[i].P == b.entries[i].P);
    const std::vector<RealOracle> x{golden(), sqrt2()};
    WeightVector w{{Rational(1, 2), Rational(1, 2)}};
    auto s1 = weighted_bad_statistic(x, w, BigInt(200000), threads(1));
    auto s4 = weighted_bad_statistic(x, w, BigInt(200000), threads(5));
    CHECK(s1.q == s4.q);
    CHECK(s1.value == s4.value);
    auto m1 = simultaneous_scan(x, BigInt(200000), threads(1));
    auto m3 = simultaneous_scan(x, BigInt(200000), threads(3));
    CHECK(m1.best.q == m3.best.q);
    CHECK(m1.exponent == m3.exponent);
    CHECK(m1.records == m3.records);
  }

  TEST_CASE("guards") {
    auto y = FormTarget::from_point({golden(), sqrt2()}, basis(2, 3));
    SearchConfig small;
    small.brute_cap = 1000;
    CHECK_THROWS_AS(brute_force_best(y, BigInt(5), small), ResourceCapError);
    CHECK_THROWS_AS(dirichlet_profile(y, {BigInt(4), BigInt(3)}, std::nullopt, Method::brute), ConfigError);
    CHECK_THROWS_AS(box_minimum(y, std::vector<BigInt>(9, BigInt(0))), ConfigError);
    CHECK_THROWS_AS(parse_method("exhaustive"), ConfigError);
  }
}
