#include "mahler/gallery.hpp"

#include <numeric>

#include "mahler/upoly.hpp"

namespace mahler {

using nlohmann::json;

RealOracle make_liouville(const BigInt& b, unsigned m, std::size_t budget_bits) {
  if (b < 2) throw ConfigError("Liouville base must be at least 2");
  if (m < 1) throw ConfigError("Liouville term count must be at least 1");
  const std::size_t bits = bit_length(b);
  unsigned long fact = 1;
  for (unsigned j = 1; j <= m + 1; ++j) {
    if (fact > budget_bits / j / bits) {
      throw ResourceCapError("Liouville series with " + std::to_string(m) + " terms exceeds the " +
                             std::to_string(budget_bits) + "-bit budget");
    }
    fact *= j;
  }
  const unsigned long top = fact / (m + 1);  // m!
  LiouvilleData data;
  data.base = b;
  data.terms = m;
  data.truncation_denominator = pow(b, top);
  data.tail_bound = make_rational(2, pow(b, fact));
  BigInt num = 0;
  unsigned long jf = 1;
  for (unsigned j = 1; j <= m; ++j) {
    jf *= j;
    num += pow(b, top - jf);
  }
  return RealOracle::from_liouville(std::move(data), make_rational(num, pow(b, top)));
}

RealOracle make_algebraic(const std::vector<BigInt>& minpoly, const Rational& lo, const Rational& hi) {
  return RealOracle::from_algebraic({minpoly, lo, hi});
}

namespace {

// Integer coefficients proportional to f.
std::vector<BigInt> integer_coeffs(const UPoly& f) {
  BigInt l = 1;
  for (const auto& c : f.coeffs()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), c.get_den_mpz_t());
  std::vector<BigInt> out;
  BigInt g = 0;
  for (const auto& c : f.coeffs()) {
    out.push_back(BigInt(c * l));
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), out.back().get_mpz_t());
  }
  for (auto& c : out) c /= g;
  return out;
}

AlgebraicData linear(const Rational& v) {
  return {{BigInt(-v.get_num()), BigInt(v.get_den())}, Rational(v - 1), Rational(v + 1)};
}

}  // namespace

PointSpec on_zero_set(const IntPolynomial& P, const std::vector<Rational>& free, const Rational& lo,
                      const Rational& hi) {
  const MonomialBasis& b = P.basis();
  const unsigned d = b.dim();
  if (free.size() + 1 != d) {
    throw ConfigError("zero set point needs " + std::to_string(d - 1) + " free coordinates");
  }
  if (!(lo < hi)) throw ConfigError("root interval must satisfy lo < hi");
  std::vector<Rational> c(b.degree() + 1, Rational(0));
  c[0] = P.a0();
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (P.q()[i] == 0) continue;
    Rational t = P.q()[i];
    for (unsigned j = 0; j + 1 < d; ++j) t *= pow(free[j], b[i][j]);
    c[b[i][d - 1]] += t;
  }
  const UPoly slice(c);
  if (slice.is_zero()) throw DomainError("the slice vanishes identically");
  if (slice.degree() < 1) throw DomainError("the slice is a nonzero constant and has no root");
  const UPoly f = slice.squarefree();
  const int roots = f.count_roots(lo, hi) + (f.sign_at(lo) == 0 ? 1 : 0);
  if (roots != 1) {
    throw DomainError("the slice has " + std::to_string(roots) + " roots in [" + to_string(lo) + ", " +
                      to_string(hi) + "], expected exactly one");
  }

  auto done = [&](const Rational& root) -> PointSpec {
    RationalSpec r{free};
    r.values.push_back(root);
    return r;
  };
  if (f.sign_at(lo) == 0) return done(lo);
  if (f.sign_at(hi) == 0) return done(hi);

  const auto ints = integer_coeffs(f);
  const BigInt L = abs(ints.back());
  const Rational width(1, 2 * L * L + 1);
  Rational a = lo, z = hi;
  const int sa = f.sign_at(a);
  while (z - a >= width) {
    Rational m = (a + z) / 2;
    const int sm = f.sign_at(m);
    if (sm == 0) return done(m);
    (sm == sa ? a : z) = m;
  }
  const Rational cand = make_rational(round_nearest(Rational((a + z) / 2 * L)), L);
  if (f.sign_at(cand) == 0) return done(cand);

  AlgebraicSpec s;
  for (const auto& v : free) s.coords.push_back(linear(v));
  s.coords.push_back({ints, a, z});
  return s;
}

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed ^ (index * 0xd1b54a32d192ed03ull));
  g.next();
  return g.next();
}

PointSpec sample_point(SampleKind kind, std::uint64_t seed, unsigned d, unsigned resolution) {
  if (d == 0) throw ConfigError("dimension must be at least 1");
  if (kind == SampleKind::lebesgue) {
    if (resolution == 0 || resolution > kMaxSampleBits) {
      throw ConfigError("sample resolution must lie in [1, " + std::to_string(kMaxSampleBits) + "] bits");
    }
    return LebesgueSpec{seed, d, resolution};
  }
  if (resolution == 0 || resolution > kMaxCantorDigits) {
    throw ConfigError("Cantor digit count must lie in [1, " + std::to_string(kMaxCantorDigits) + "]");
  }
  return CantorSpec{seed, d, resolution};
}

namespace {

std::vector<Rational> lebesgue_values(const LebesgueSpec& s) {
  SplitMix64 g(s.seed);
  std::vector<Rational> out;
  for (unsigned i = 0; i < s.d; ++i) {
    BigInt v = 0;
    unsigned left = s.bits;
    while (left > 0) {
      const unsigned take = std::min(left, 64u);
      BigInt w = static_cast<unsigned long>(g.next() >> (64 - take));
      mpz_mul_2exp(v.get_mpz_t(), v.get_mpz_t(), take);
      v += w;
      left -= take;
    }
    BigInt den = 1;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), s.bits);
    out.push_back(make_rational(v, den));
  }
  return out;
}

std::vector<Rational> cantor_values(const CantorSpec& s) {
  SplitMix64 g(s.seed);
  std::vector<Rational> out;
  for (unsigned i = 0; i < s.d; ++i) {
    BigInt num = 0;
    for (unsigned j = 0; j < s.digits; ++j) num = 3 * num + 2 * static_cast<unsigned long>(g.next() >> 63);
    out.push_back(make_rational(num, pow(BigInt(3), s.digits)));
  }
  return out;
}

std::vector<RealOracle> rationals(const std::vector<Rational>& v, RealOracle::Kind kind) {
  std::vector<RealOracle> out;
  for (const auto& r : v) out.push_back(RealOracle::from_rational(r, kind));
  return out;
}

IntPolynomial zero_set_poly(const ZeroSetSpec& z) {
  if (z.d == 0 || z.k == 0) throw ConfigError("zero set needs d >= 1 and k >= 1");
  auto b = basis(z.d, z.k);
  if (z.q.size() != b->size()) {
    throw ConfigError("zero set polynomial needs " + std::to_string(b->size()) + " coefficients");
  }
  return IntPolynomial(b, z.a0, z.q);
}

template <class... F>
struct overloaded : F... {
  using F::operator()...;
};

}  // namespace

std::vector<RealOracle> realize(const PointSpec& spec) {
  return std::visit(
      overloaded{
          [](const RationalSpec& s) {
            if (s.values.empty()) throw ConfigError("rational point needs a coordinate");
            return rationals(s.values, RealOracle::Kind::rational);
          },
          [](const AlgebraicSpec& s) {
            if (s.coords.empty()) throw ConfigError("algebraic point needs a coordinate");
            std::vector<RealOracle> out;
            for (const auto& c : s.coords) {
              if (c.minpoly.size() == 2 && c.minpoly[1] != 0) {
                const Rational v = make_rational(-c.minpoly[0], c.minpoly[1]);
                if (!(c.iso_lo <= v && v <= c.iso_hi)) throw DomainError("linear root outside its interval");
                out.push_back(RealOracle::from_rational(v));
              } else {
                out.push_back(RealOracle::from_algebraic(c));
              }
            }
            return out;
          },
          [](const LiouvilleSpec& s) { return std::vector<RealOracle>{make_liouville(s.base, s.terms)}; },
          [](const ZeroSetSpec& s) { return realize(on_zero_set(zero_set_poly(s), s.free, s.lo, s.hi)); },
          [](const LebesgueSpec& s) { return rationals(lebesgue_values(s), RealOracle::Kind::sampled); },
          [](const CantorSpec& s) { return rationals(cantor_values(s), RealOracle::Kind::sampled); },
      },
      spec);
}

unsigned dimension(const PointSpec& spec) {
  return std::visit(overloaded{
                        [](const RationalSpec& s) { return static_cast<unsigned>(s.values.size()); },
                        [](const AlgebraicSpec& s) { return static_cast<unsigned>(s.coords.size()); },
                        [](const LiouvilleSpec&) { return 1u; },
                        [](const ZeroSetSpec& s) { return s.d; },
                        [](const LebesgueSpec& s) { return s.d; },
                        [](const CantorSpec& s) { return s.d; },
                    },
                    spec);
}

std::string describe(const PointSpec& spec) { return to_json(spec).dump(); }

// ------------------------------------------------------------ serialization

namespace {

json strings(const std::vector<BigInt>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

json strings(const std::vector<Rational>& v) {
  json a = json::array();
  for (const auto& x : v) a.push_back(to_string(x));
  return a;
}

std::string text_of(const json& j) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw ConfigError("expected a number or numeric string, got " + j.dump());
}

std::vector<BigInt> ints_of(const json& j) {
  std::vector<BigInt> out;
  for (const auto& x : j) out.push_back(parse_bigint(text_of(x)));
  return out;
}

std::vector<Rational> rats_of(const json& j) {
  std::vector<Rational> out;
  for (const auto& x : j) out.push_back(parse_rational(text_of(x)));
  return out;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    auto pos = s.find(sep, start);
    out.emplace_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

std::uint64_t parse_u64(const std::string& s) {
  const BigInt v = parse_bigint(s);
  if (v < 0 || !v.fits_ulong_p()) throw ConfigError("expected a nonnegative 64-bit integer, got '" + s + "'");
  return v.get_ui();
}

unsigned parse_small(const std::string& s) {
  const auto v = parse_u64(s);
  if (v > 1'000'000) throw ConfigError("value too large: " + s);
  return static_cast<unsigned>(v);
}

std::pair<Rational, Rational> parse_range(const std::string& s) {
  auto p = split(s, ':');
  if (p.size() != 2) throw ConfigError("expected lo:hi, got '" + s + "'");
  return {parse_rational(p[0]), parse_rational(p[1])};
}

template <class T, class F>
std::vector<T> map_list(const std::string& s, F&& f) {
  std::vector<T> out;
  for (const auto& part : split(s, ',')) out.push_back(f(part));
  return out;
}

}  // namespace

json to_json(const PointSpec& spec) {
  return std::visit(
      overloaded{
          [](const RationalSpec& s) { return json{{"kind", "rational"}, {"values", strings(s.values)}}; },
          [](const AlgebraicSpec& s) {
            json coords = json::array();
            for (const auto& c : s.coords) {
              coords.push_back({{"minpoly", strings(c.minpoly)}, {"lo", to_string(c.iso_lo)}, {"hi", to_string(c.iso_hi)}});
            }
            return json{{"kind", "algebraic"}, {"coordinates", coords}};
          },
          [](const LiouvilleSpec& s) {
            return json{{"kind", "liouville"}, {"base", to_string(s.base)}, {"terms", s.terms}};
          },
          [](const ZeroSetSpec& s) {
            return json{{"kind", "zero_set"}, {"d", s.d}, {"k", s.k}, {"a0", to_string(s.a0)}, {"q", strings(s.q)},
                        {"free", strings(s.free)}, {"lo", to_string(s.lo)}, {"hi", to_string(s.hi)}};
          },
          [](const LebesgueSpec& s) { return json{{"kind", "lebesgue"}, {"seed", s.seed}, {"d", s.d}, {"bits", s.bits}}; },
          [](const CantorSpec& s) {
            return json{{"kind", "cantor"}, {"seed", s.seed}, {"d", s.d}, {"digits", s.digits}};
          },
      },
      spec);
}

PointSpec point_from_json(const json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rational") return RationalSpec{rats_of(j.at("values"))};
    if (kind == "algebraic") {
      AlgebraicSpec s;
      for (const auto& c : j.at("coordinates")) {
        s.coords.push_back({ints_of(c.at("minpoly")), parse_rational(text_of(c.at("lo"))),
                            parse_rational(text_of(c.at("hi")))});
      }
      return s;
    }
    if (kind == "liouville") {
      return LiouvilleSpec{parse_bigint(text_of(j.at("base"))), j.at("terms").get<unsigned>()};
    }
    if (kind == "zero_set") {
      return ZeroSetSpec{j.at("d").get<unsigned>(), j.at("k").get<unsigned>(), parse_bigint(text_of(j.at("a0"))),
                         ints_of(j.at("q")), rats_of(j.at("free")), parse_rational(text_of(j.at("lo"))),
                         parse_rational(text_of(j.at("hi")))};
    }
    if (kind == "lebesgue") {
      return sample_point(SampleKind::lebesgue, j.at("seed").get<std::uint64_t>(), j.at("d").get<unsigned>(),
                          j.value("bits", 64u));
    }
    if (kind == "cantor") {
      return sample_point(SampleKind::cantor, j.at("seed").get<std::uint64_t>(), j.at("d").get<unsigned>(),
                          j.value("digits", 32u));
    }
    throw ConfigError("unknown point kind '" + kind + "'");
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed point JSON: ") + e.what());
  }
}

PointSpec parse_point(std::string_view text) {
  if (!text.empty() && text.front() == '{') {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("malformed point JSON");
    return point_from_json(j);
  }
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("point must look like kind:arguments");
  const std::string kind(text.substr(0, colon));
  const std::string rest(text.substr(colon + 1));
  if (kind == "rational") return RationalSpec{map_list<Rational>(rest, parse_rational)};
  if (kind == "algebraic") {
    AlgebraicSpec s;
    for (const auto& coord : split(rest, ';')) {
      auto parts = split(coord, '@');
      if (parts.size() != 2) throw ConfigError("algebraic coordinate must look like c0,c1,...@lo:hi");
      auto [lo, hi] = parse_range(parts[1]);
      s.coords.push_back({map_list<BigInt>(parts[0], parse_bigint), lo, hi});
    }
    return s;
  }
  if (kind == "liouville") {
    auto p = split(rest, ',');
    if (p.size() != 2) throw ConfigError("liouville point must look like liouville:base,terms");
    return LiouvilleSpec{parse_bigint(p[0]), parse_small(p[1])};
  }
  if (kind == "zero_set") {
    auto p = split(rest, '|');
    if (p.size() != 5) throw ConfigError("zero_set point must look like zero_set:d,k|a0|q1,...|free,...|lo:hi");
    auto dk = split(p[0], ',');
    if (dk.size() != 2) throw ConfigError("zero_set needs d,k");
    auto [lo, hi] = parse_range(p[4]);
    std::vector<Rational> free;
    if (!p[3].empty()) free = map_list<Rational>(p[3], parse_rational);
    return ZeroSetSpec{parse_small(dk[0]), parse_small(dk[1]), parse_bigint(p[1]),
                       map_list<BigInt>(p[2], parse_bigint), free, lo, hi};
  }
  if (kind == "lebesgue" || kind == "cantor") {
    auto p = split(rest, ',');
    if (p.size() != 3) throw ConfigError(kind + " point must look like " + kind + ":seed,d,resolution");
    return sample_point(kind == "lebesgue" ? SampleKind::lebesgue : SampleKind::cantor, parse_u64(p[0]),
                        parse_small(p[1]), parse_small(p[2]));
  }
  throw ConfigError("unknown point kind '" + kind + "'");
}

}  // namespace mahler
