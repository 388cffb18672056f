#include "doctest.h"
#include "mahler/gallery.hpp"

using namespace mahler;

namespace {

Rational value_of(const PointSpec& s, std::size_t i = 0) { return *realize(s)[i].exact(); }

}  // namespace

TEST_SUITE("gallery") {
  TEST_CASE("Liouville series") {
    CHECK(*make_liouville(BigInt(10), 3).exact() == Rational(110001, 1000000));
    CHECK(*make_liouville(BigInt(2), 2).exact() == Rational(3, 4));
    auto x = make_liouville(BigInt(10), 5);
    const auto& data = *x.liouville();
    CHECK(data.truncation_denominator == pow(BigInt(10), 120));
    CHECK(data.tail_bound == make_rational(2, pow(BigInt(10), 720)));
    const Rational t = *x.exact() * pow(BigInt(10), 24);
    const Rational f = t - Rational(floor(t));
    CHECK(std::min(f, Rational(1 - f)) <= make_rational(2, pow(BigInt(10), 96)));
    CHECK(x.kind() == RealOracle::Kind::liouville);
    CHECK_THROWS_AS(make_liouville(BigInt(10), 12), ResourceCapError);
    CHECK_THROWS_AS(make_liouville(BigInt(1), 3), ConfigError);
  }

  TEST_CASE("algebraic oracles honour the width contract") {
    auto r = make_algebraic({BigInt(-2), BigInt(0), BigInt(1)}, Rational(1), Rational(2));
    for (long p : {16L, 64L, 256L}) {
      auto e = refine(r, p);
      CHECK(e.width_at_most(p));
      CHECK(e.lo().to_rational() * e.lo().to_rational() <= 2);
      CHECK(e.hi().to_rational() * e.hi().to_rational() >= 2);
    }
    auto c = make_algebraic({BigInt(-2), BigInt(0), BigInt(0), BigInt(1)}, Rational(1), Rational(2));
    auto e = refine(c, 100);
    CHECK(pow(e.lo().to_rational(), 3) <= 2);
    CHECK(pow(e.hi().to_rational(), 3) >= 2);
    CHECK_THROWS_AS(make_algebraic({BigInt(-2), BigInt(0), BigInt(1)}, Rational(2), Rational(3)), DomainError);
    // (x-1)(x-2)(x-3) changes sign on [0, 7/2] but has three roots there
    CHECK_THROWS_AS(make_algebraic({BigInt(-6), BigInt(11), BigInt(-6), BigInt(1)}, Rational(0), Rational(7, 2)),
                    DomainError);
  }

  TEST_CASE("points on zero sets") {
    auto b22 = basis(2, 2);
    // order: x1, x2, x1^2, x1 x2, x2^2
    IntPolynomial circle(b22, BigInt(-1), {0, 0, 1, 0, 1});
    auto p = on_zero_set(circle, {Rational(3, 5)}, Rational(0), Rational(1));
    REQUIRE(std::holds_alternative<RationalSpec>(p));
    CHECK(std::get<RationalSpec>(p).values == std::vector<Rational>{Rational(3, 5), Rational(4, 5)});

    IntPolynomial hyper(b22, BigInt(-1), {0, 0, 0, 1, 0});
    auto h = on_zero_set(hyper, {Rational(2)}, Rational(0), Rational(1));
    REQUIRE(std::holds_alternative<RationalSpec>(h));
    CHECK(std::get<RationalSpec>(h).values == std::vector<Rational>{Rational(2), Rational(1, 2)});

    IntPolynomial sq(basis(1, 2), BigInt(-2), {0, 1});
    auto s = on_zero_set(sq, {}, Rational(1), Rational(2));
    REQUIRE(std::holds_alternative<AlgebraicSpec>(s));
    auto x = realize(s);
    CHECK(x[0].kind() == RealOracle::Kind::algebraic);
    CHECK(eval_enclosure(sq, x, 140).contains(Rational(0)));

    auto alg = on_zero_set(circle, {Rational(1, 2)}, Rational(0), Rational(1));
    REQUIRE(std::holds_alternative<AlgebraicSpec>(alg));
    auto pt = realize(alg);
    CHECK(pt[0].exact());
    auto enc = eval_enclosure(circle, pt, 140);
    CHECK(enc.contains(Rational(0)));
    CHECK(enc.width_at_most(128));

    CHECK_THROWS_AS(on_zero_set(circle, {Rational(2)}, Rational(0), Rational(1)), DomainError);
    CHECK_THROWS_AS(on_zero_set(circle, {Rational(3, 5)}, Rational(-1), Rational(1)), DomainError);
    CHECK_THROWS_AS(on_zero_set(circle, {}, Rational(0), Rational(1)), ConfigError);
  }

  TEST_CASE("samplers are deterministic") {
    auto a = sample_point(SampleKind::lebesgue, 7, 2, 64);
    auto b = sample_point(SampleKind::lebesgue, 7, 2, 64);
    CHECK(realize(a)[0].exact() == realize(b)[0].exact());
    CHECK(realize(a)[1].exact() == realize(b)[1].exact());
    const BigInt two64 = pow(BigInt(2), 64);
    for (std::size_t i = 0; i < 2; ++i) {
      const Rational v = value_of(a, i);
      CHECK(v >= 0);
      CHECK(v < 1);
      CHECK(two64 % BigInt(v.get_den()) == 0);
    }
    CHECK(value_of(a) != value_of(sample_point(SampleKind::lebesgue, 8, 2, 64)));
    CHECK(value_of(sample_point(SampleKind::cantor, 3, 1, 20)) == value_of(sample_point(SampleKind::cantor, 3, 1, 20)));
  }

  TEST_CASE("Cantor samples avoid the middle digit") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const Rational v = value_of(sample_point(SampleKind::cantor, seed, 1, 4));
      CHECK(v >= 0);
      CHECK(v <= Rational(80, 81));
      BigInt num = BigInt(v * 81);
      CHECK(make_rational(num, 81) == v);
      for (int i = 0; i < 4; ++i) {
        CHECK(num % 3 != 1);
        num /= 3;
      }
    }
    const Rational w = value_of(sample_point(SampleKind::cantor, 11, 1, 40));
    BigInt num = BigInt(w * pow(BigInt(3), 40));
    for (int i = 0; i < 40; ++i) {
      CHECK(num % 3 != 1);
      num /= 3;
    }
    CHECK_THROWS_AS(sample_point(SampleKind::cantor, 1, 1, kMaxCantorDigits + 1), ConfigError);
  }

  TEST_CASE("point specs round-trip") {
    const std::vector<std::string> texts{
        "rational:1/2,-3/7",
        "algebraic:-2,0,1@1:2;-1,-1,1@1:2",
        "liouville:10,5",
        "zero_set:2,2|-1|0,0,1,0,1|3/5|0:1",
        "lebesgue:7,2,64",
        "cantor:5,3,16",
    };
    for (const auto& t : texts) {
      auto spec = parse_point(t);
      auto back = point_from_json(nlohmann::json::parse(to_json(spec).dump()));
      CHECK(to_json(back) == to_json(spec));
      CHECK(parse_point(describe(spec)).index() == spec.index());
      CHECK(realize(spec).size() == dimension(spec));
    }
    CHECK(value_of(parse_point("zero_set:2,2|-1|0,0,1,0,1|3/5|0:1"), 1) == Rational(4, 5));
    CHECK(to_json(parse_point("algebraic:-2,0,1@1:2"))["coordinates"][0]["minpoly"][2] == "1");
    CHECK_THROWS_AS(parse_point("circle:1"), ConfigError);
    CHECK_THROWS_AS(parse_point("rational:1/0"), ConfigError);
    CHECK_THROWS_AS(parse_point("{\"kind\": 3}"), ConfigError);
  }
}
