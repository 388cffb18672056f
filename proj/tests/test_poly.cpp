#include <random>

#include "doctest.h"
#include "mahler/gallery.hpp"
#include "mahler/poly.hpp"

using namespace mahler;

TEST_SUITE("poly") {
  TEST_CASE("heights") {
    auto b12 = basis(1, 2);
    auto h = heights(IntPolynomial(b12, BigInt(7), {3, -5}));
    CHECK(h.H == 7);
    CHECK(h.Htilde == 5);
    auto lin = heights(IntPolynomial(basis(1, 1), BigInt(-1), {2}));
    CHECK(lin.H == 2);
    CHECK(lin.Htilde == 2);
    IntPolynomial constant(b12, BigInt(4), {0, 0});
    CHECK(heights(constant).H == 4);
    CHECK(heights(constant).Htilde == 0);
    CHECK_FALSE(constant.search_admissible());
    CHECK(IntPolynomial(b12, BigInt(7), {3, -5}).to_string() == "-5*x1^2 + 3*x1 + 7");
    CHECK_THROWS_AS(IntPolynomial(b12, BigInt(1), {1}), ConfigError);
  }

  TEST_CASE("exact evaluation") {
    auto b22 = basis(2, 2);
    IntPolynomial circle(b22, BigInt(-1), {0, 0, 1, 0, 1});
    CHECK(eval_exact(circle, {Rational(3, 5), Rational(4, 5)}) == 0);
    CHECK(eval_exact(circle, {Rational(1, 2), Rational(1, 2)}) == Rational(-1, 2));
    IntPolynomial mixed(b22, BigInt(1), {2, -3, 1, 4, -1});
    // 1 + 2*2 - 3*3 + 4 + 4*6 - 9
    CHECK(eval_exact(mixed, {Rational(2), Rational(3)}) == 15);
  }

  TEST_CASE("certified evaluation") {
    auto r2 = make_algebraic({BigInt(-2), BigInt(0), BigInt(1)}, Rational(1), Rational(2));
    IntPolynomial sq(basis(1, 2), BigInt(-2), {0, 1});
    auto e = eval_enclosure(sq, {r2}, 40);
    CHECK(e.contains(Rational(0)));
    CHECK(e.width_at_most(30));

    IntPolynomial lin(basis(1, 1), BigInt(-1), {1});
    auto h = eval_enclosure(lin, {RealOracle::from_rational(Rational(1, 2))}, 20);
    CHECK(h.is_point());
    CHECK(h.lo().to_rational() == Rational(-1, 2));

    auto l = make_liouville(BigInt(10), 3);
    IntPolynomial id(basis(1, 1), BigInt(0), {1});
    auto v = eval_enclosure(id, {l}, 30);
    CHECK(v.contains(Rational(110001, 1000000)));
    CHECK(v.width_at_most(30));
  }

  TEST_CASE("enclosures contain exact values") {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<long> coef(-50, 50), num(-200, 200), den(1, 60);
    std::uniform_int_distribution<unsigned> dim(1, 3), deg(1, 3);
    for (int trial = 0; trial < 1000; ++trial) {
      auto b = basis(dim(rng), deg(rng));
      std::vector<BigInt> q(b->size());
      for (auto& c : q) c = coef(rng);
      IntPolynomial P(b, BigInt(coef(rng)), q);
      std::vector<Rational> x;
      std::vector<RealOracle> xo;
      for (unsigned i = 0; i < b->dim(); ++i) {
        x.push_back(make_rational(num(rng), den(rng)));
        xo.push_back(RealOracle::from_rational(x.back(), RealOracle::Kind::sampled));
      }
      const long p = 20 + trial % 40;
      auto e = eval_enclosure(P, xo, p);
      CHECK(e.contains(eval_exact(P, x)));
      const auto hp = heights(P);
      CHECK(hp.Htilde <= hp.H);
      BigInt sum = 0;
      for (const auto& c : q) sum += abs(c);
      CHECK(compare(e.width(), make_rational(sum, pow(BigInt(2), p))) <= 0);
    }
  }

  TEST_CASE("certified forms") {
    auto phi = make_algebraic({BigInt(-1), BigInt(-1), BigInt(1)}, Rational(1), Rational(2));
    auto t = FormTarget::from_reals({phi});
    auto c = t.certify({BigInt(13)});
    CHECK(c.a0 == -21);
    CHECK(c.value.lo().to_double() == doctest::Approx(0.0344418537).epsilon(1e-8));
    CHECK_FALSE(c.exact_zero);

    auto r = FormTarget::from_reals({RealOracle::from_rational(Rational(1, 3))});
    auto z = r.certify({BigInt(3)});
    CHECK(z.exact_zero);
    CHECK(z.exact == Rational(0));
    CHECK(r.exact_zero(BigInt(-1), {BigInt(3)}) == true);
    CHECK(r.exact_zero(BigInt(-1), {BigInt(2)}) == false);
  }
}
