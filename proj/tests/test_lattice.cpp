#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "mahler/lattice.hpp"

using namespace mahler;

namespace {

RealOracle sqrt2() { return RealOracle::from_algebraic({{BigInt(-2), BigInt(0), BigInt(1)}, Rational(1), Rational(2)}); }
RealOracle golden() { return RealOracle::from_algebraic({{BigInt(-1), BigInt(-1), BigInt(1)}, Rational(1), Rational(2)}); }

BigInt norm2(const std::vector<BigInt>& v) {
  BigInt s = 0;
  for (const auto& x : v) s += x * x;
  return s;
}

// Lagrange-Gauss reduction: first vector is a shortest nonzero vector.
BigInt gauss_shortest(std::vector<BigInt> a, std::vector<BigInt> b) {
  if (norm2(a) > norm2(b)) std::swap(a, b);
  for (;;) {
    BigInt dot = a[0] * b[0] + a[1] * b[1];
    BigInt m = round_nearest(Rational(dot, norm2(a)));
    b[0] -= m * a[0];
    b[1] -= m * a[1];
    if (norm2(b) >= norm2(a)) return norm2(a);
    std::swap(a, b);
  }
}

Rational frac_dist(const Rational& t) {
  Rational f = t - Rational(floor(t));
  return std::min(f, Rational(Rational(1) - f));
}

std::vector<std::vector<BigInt>> all_boxes(const std::vector<long>& bounds) {
  std::vector<std::vector<BigInt>> out;
  std::vector<long> cur(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i) cur[i] = -bounds[i];
  for (;;) {
    std::vector<BigInt> q(cur.begin(), cur.end());
    bool nonzero = std::any_of(cur.begin(), cur.end(), [](long v) { return v != 0; });
    auto first = std::find_if(cur.begin(), cur.end(), [](long v) { return v != 0; });
    if (nonzero && *first > 0) out.push_back(q);
    std::size_t j = 0;
    while (j < cur.size() && cur[j] == bounds[j]) cur[j] = -bounds[j], ++j;
    if (j == cur.size()) break;
    ++cur[j];
  }
  return out;
}

Rational form_dist(const std::vector<BigInt>& q, const std::vector<Rational>& y) {
  Rational t = 0;
  for (std::size_t i = 0; i < q.size(); ++i) t += q[i] * y[i];
  return frac_dist(t);
}

FormTarget rational_target(const std::vector<Rational>& y) {
  std::vector<RealOracle> o;
  for (const auto& v : y) o.push_back(RealOracle::from_rational(v));
  return FormTarget::from_reals(o);
}

bool has_candidate(const std::vector<FormCandidate>& cs, const std::vector<BigInt>& q, const BigInt& p) {
  return std::any_of(cs.begin(), cs.end(), [&](const FormCandidate& c) { return c.q == q && c.p == p; });
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("identity is already reduced") {
    IntMatrix id(3, std::vector<BigInt>(3, BigInt(0)));
    for (int i = 0; i < 3; ++i) id[i][i] = 1;
    LatticeBasis b(id);
    CHECK(lll_reduce(b, Rational(3, 4)) == b);
  }

  TEST_CASE("two dimensional example") {
    LatticeBasis b({{BigInt(4), BigInt(1)}, {BigInt(7), BigInt(2)}});
    auto r = lll_reduce(b);
    CHECK(norm2(r[0]) <= 2);
    CHECK(norm2(r[0]) == gauss_shortest(b[0], b[1]));
    CHECK(abs_det(r) == 1);
  }

  TEST_CASE("random 2x2 against Gauss reduction") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> dist(-1000, 1000);
    const Rational delta(99, 100);
    for (int t = 0; t < 200; ++t) {
      std::vector<BigInt> a{BigInt(dist(rng)), BigInt(dist(rng))};
      std::vector<BigInt> c{BigInt(dist(rng)), BigInt(dist(rng))};
      if (a[0] * c[1] - a[1] * c[0] == 0) continue;
      auto r = lll_reduce(LatticeBasis({a, c}), delta);
      BigInt shortest = gauss_shortest(a, c);
      CHECK(Rational(norm2(r[0])) * (delta - Rational(1, 4)) <= shortest);
      CHECK(norm2(r[0]) >= shortest);
    }
  }

  TEST_CASE("random 4x4 keeps determinant and lattice") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long> dist(-50, 50);
    for (int t = 0; t < 40; ++t) {
      IntMatrix m(4, std::vector<BigInt>(4));
      for (auto& row : m) {
        for (auto& v : row) v = dist(rng);
      }
      LatticeBasis b(m);
      BigInt det;
      try {
        det = abs_det(b);
      } catch (const DomainError&) {
        continue;
      }
      auto r = lll_reduce(b);
      CHECK(abs_det(r) == det);
      CHECK(is_lll_reduced(r, Rational(99, 100)));
      // every output row is an integer combination of the input rows
      auto g_in = gram_schmidt(b);
      for (std::size_t i = 0; i < 4; ++i) {
        std::vector<Rational> rest(r[i].begin(), r[i].end());
        std::vector<Rational> coef(4);
        // solve rest = sum coef_j b_j by back substitution on Gram-Schmidt
        std::vector<std::vector<Rational>> star(4);
        for (std::size_t j = 0; j < 4; ++j) {
          star[j].assign(b[j].begin(), b[j].end());
          for (std::size_t l = 0; l < j; ++l) {
            for (std::size_t c = 0; c < 4; ++c) star[j][c] -= g_in.mu[j][l] * star[l][c];
          }
        }
        for (std::size_t j = 4; j-- > 0;) {
          Rational s = 0;
          for (std::size_t c = 0; c < 4; ++c) s += rest[c] * star[j][c];
          coef[j] = s / g_in.norms[j];
          for (std::size_t c = 0; c < 4; ++c) rest[c] -= coef[j] * Rational(b[j][c]);
        }
        for (const auto& c : coef) CHECK(c.get_den() == 1);
      }
    }
  }

  TEST_CASE("first vector bound") {
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<long> dist(-1000, 1000);
    for (std::size_t m = 2; m <= 6; ++m) {
      for (int t = 0; t < 10; ++t) {
        IntMatrix rows(m, std::vector<BigInt>(m));
        for (auto& row : rows) {
          for (auto& v : row) v = dist(rng);
        }
        LatticeBasis b(rows);
        BigInt det = abs_det(b);
        if (det == 0) continue;
        auto r = lll_reduce(b);
        // |b1|^(2m) <= 2^(m(m-1)) det^2
        BigInt lhs = pow(norm2(r[0]), m);
        BigInt rhs = pow(BigInt(2), m * (m - 1)) * det * det;
        CHECK(lhs <= rhs);
      }
    }
  }

  TEST_CASE("dependent rows are rejected") {
    LatticeBasis b({{BigInt(1), BigInt(2)}, {BigInt(2), BigInt(4)}});
    CHECK_THROWS_AS(lll_reduce(b), DomainError);
    CHECK_THROWS_AS(lll_reduce(LatticeBasis({{BigInt(1), BigInt(0)}, {BigInt(0), BigInt(1)}}), Rational(1, 5)),
                    ConfigError);
  }

  TEST_CASE("candidates include convergents") {
    auto c1 = small_form_candidates(FormTarget::from_reals({sqrt2()}), BigInt(12));
    CHECK(has_candidate(c1, {BigInt(12)}, BigInt(-17)));
    auto c2 = small_form_candidates(FormTarget::from_reals({golden()}), BigInt(13));
    CHECK(has_candidate(c2, {BigInt(13)}, BigInt(-21)));
    auto c3 = small_form_candidates(rational_target({Rational(1, 2)}), BigInt(2));
    CHECK(has_candidate(c3, {BigInt(2)}, BigInt(-1)));
  }

  TEST_CASE("zero bound forces zero coefficient") {
    auto y = FormTarget::from_reals({golden(), sqrt2(), RealOracle::from_rational(Rational(2, 7))});
    std::vector<BigInt> bounds{BigInt(20), BigInt(0), BigInt(20)};
    auto cs = small_form_candidates(y, BigInt(20), bounds);
    REQUIRE(!cs.empty());
    for (const auto& c : cs) CHECK(c.q[1] == 0);
    for (const auto& c : box_enumerate(y, bounds, Rational(1))) CHECK(c.q[1] == 0);
  }

  TEST_CASE("box enumeration contains every exhaustive solution") {
    std::mt19937_64 rng(23);
    for (int t = 0; t < 30; ++t) {
      std::size_t n = 1 + t % 3;
      long b = n == 1 ? 60 : (n == 2 ? 14 : 5);
      std::vector<Rational> y;
      for (std::size_t i = 0; i < n; ++i) y.push_back(Rational(BigInt(rng() % 100000), BigInt(100003)));
      auto target = rational_target(y);
      std::vector<BigInt> bounds(n, BigInt(b));
      BigInt M = pow(BigInt(b), n);
      const Rational factor(1);
      auto got = box_enumerate(target, bounds, factor);
      std::set<std::vector<BigInt>> got_q;
      for (const auto& c : got) {
        got_q.insert(c.q);
        Rational t0 = c.p;
        for (std::size_t i = 0; i < n; ++i) t0 += c.q[i] * y[i];
        CHECK(abs(t0) <= Rational(1, 2));
      }
      std::size_t expected = 0;
      for (const auto& q : all_boxes(std::vector<long>(n, b))) {
        if (form_dist(q, y) <= factor / M) {
          ++expected;
          CHECK(got_q.count(q) == 1);
        }
      }
      CHECK(expected >= 1);
    }
  }

  TEST_CASE("candidates never beat the exhaustive optimum and meet the Dirichlet bound") {
    std::mt19937_64 rng(29);
    int met = 0, total = 0;
    for (int t = 0; t < 30; ++t) {
      std::size_t n = 1 + t % 3;
      long Q = 2 + static_cast<long>(rng() % (n == 3 ? 8 : 29));
      std::vector<Rational> y;
      for (std::size_t i = 0; i < n; ++i) y.push_back(Rational(BigInt(rng() % 1000003), BigInt(1000003)));
      auto target = rational_target(y);
      Rational best = 1;
      for (const auto& q : all_boxes(std::vector<long>(n, Q))) best = std::min(best, form_dist(q, y));
      auto cs = small_form_candidates(target, BigInt(Q));
      Rational lat = 1;
      for (const auto& c : cs) {
        CHECK(sup_norm(c.q) <= Q);
        lat = std::min(lat, form_dist(c.q, y));
      }
      CHECK(lat >= best);
      ++total;
      if (lat < Rational(1) / Rational(pow(BigInt(Q), n))) ++met;
    }
    CHECK(met == total);
  }

  TEST_CASE("relation lattices") {
    auto r1 = relation_lattice(rational_target({Rational(1, 3), Rational(1, 3)}));
    REQUIRE(r1);
    auto z1 = smallest_box_relations(*r1, {BigInt(3), BigInt(3)});
    REQUIRE(z1.size() == 1);
    CHECK(z1[0] == std::vector<BigInt>{BigInt(1), BigInt(-1)});

    auto circle = FormTarget::from_point({RealOracle::from_rational(Rational(3, 5)), RealOracle::from_rational(Rational(4, 5))},
                                         basis(2, 2));
    auto r2 = relation_lattice(circle);
    REQUIRE(r2);
    auto z2 = smallest_box_relations(*r2, std::vector<BigInt>(5, BigInt(10)));
    CHECK(std::find(z2.begin(), z2.end(), std::vector<BigInt>{0, 0, 1, 0, 1}) != z2.end());

    auto phi2 = FormTarget::from_point({golden()}, basis(1, 2));
    auto r3 = relation_lattice(phi2);
    REQUIRE(r3);
    CHECK(r3->size() == 1);
    auto z3 = smallest_box_relations(*r3, {BigInt(5), BigInt(5)});
    REQUIRE(z3.size() == 1);
    CHECK(z3[0] == std::vector<BigInt>{BigInt(1), BigInt(-1)});

    auto cube = FormTarget::from_point({RealOracle::from_algebraic({{BigInt(-2), 0, 0, 1}, Rational(1), Rational(2)})},
                                       basis(1, 2));
    auto r4 = relation_lattice(cube);
    REQUIRE(r4);
    CHECK(r4->size() == 0);
    CHECK(!relation_lattice(FormTarget::from_reals({sqrt2(), golden()})));
  }
}
