#include "mahler/monomial.hpp"

#include <algorithm>
#include <functional>

namespace mahler {

namespace {

void block(unsigned d, unsigned total, ExponentVector& cur, std::vector<ExponentVector>& out) {
  const std::size_t pos = cur.size();
  if (pos + 1 == d) {
    cur.push_back(total);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (unsigned e = total + 1; e-- > 0;) {
    cur.push_back(e);
    block(d, total - e, cur, out);
    cur.pop_back();
  }
}

}  // namespace

MonomialBasis::MonomialBasis(unsigned d, unsigned k, std::size_t cap) : d_(d), k_(k) {
  if (d < 1 || k < 1) throw ConfigError("basis requires d >= 1 and k >= 1");
  BigInt n = binomial(k + d, d) - 1;
  if (n > BigInt(static_cast<unsigned long>(cap))) {
    throw ResourceCapError("basis(d=" + std::to_string(d) + ", k=" + std::to_string(k) + ") has " +
                           to_string(n) + " monomials, above the cap " + std::to_string(cap));
  }
  order_.reserve(n.get_ui());
  ExponentVector cur;
  cur.reserve(d);
  for (unsigned t = 1; t <= k; ++t) block(d, t, cur, order_);
}

std::size_t MonomialBasis::prefix_size(unsigned j) const {
  if (j >= k_) return order_.size();
  return binomial(j + d_, d_).get_ui() - 1;
}

BasisPtr basis(unsigned d, unsigned k, std::size_t cap) { return std::make_shared<const MonomialBasis>(d, k, cap); }

std::string to_string(const ExponentVector& e) {
  std::string s = "[";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(e[i]);
  }
  return s + "]";
}

std::string monomial_name(const ExponentVector& e) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (e[i] == 0) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (e[i] > 1) s += "^" + std::to_string(e[i]);
  }
  return s.empty() ? "1" : s;
}

std::vector<Rational> veronese_eval(const MonomialBasis& b, const std::vector<Rational>& x) {
  if (x.size() != b.dim()) throw ConfigError("veronese_eval: point has wrong dimension");
  // powers[j][e] = x_j^e
  std::vector<std::vector<Rational>> powers(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    powers[j].resize(b.degree() + 1);
    powers[j][0] = 1;
    for (unsigned e = 1; e <= b.degree(); ++e) powers[j][e] = powers[j][e - 1] * x[j];
  }
  std::vector<Rational> out;
  out.reserve(b.size());
  for (const auto& ev : b.order()) {
    Rational v = 1;
    for (std::size_t j = 0; j < ev.size(); ++j) {
      if (ev[j]) v *= powers[j][ev[j]];
    }
    out.push_back(v);
  }
  return out;
}

namespace {

long magnitude_bits(const DyadicInterval& v) {
  Dyadic m = std::max(-v.lo(), v.hi());
  BigInt c = m.floor_int() + 1;
  return static_cast<long>(bit_length(c));
}

std::vector<DyadicInterval> enclose_monomials(const std::vector<ExponentVector>& monomials, unsigned k,
                                              const std::vector<RealOracle>& x, long p) {
  std::vector<DyadicInterval> coarse;
  coarse.reserve(x.size());
  long mag = 0;
  for (const auto& o : x) {
    coarse.push_back(refine(o, 8));
    mag = std::max(mag, magnitude_bits(coarse.back()));
  }
  long guard = static_cast<long>(k) * (mag + 1) + static_cast<long>(bit_length(BigInt(k))) + 4;
  for (int attempt = 0; attempt < 8; ++attempt, guard += 32) {
    const long wp = p + guard;
    std::vector<std::vector<DyadicInterval>> powers(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
      const DyadicInterval xj = x[j].exact() ? DyadicInterval::from_rational(*x[j].exact(), wp)
                                             : refine(x[j], wp);
      powers[j].reserve(k + 1);
      powers[j].push_back(DyadicInterval::from_int(BigInt(1)));
      for (unsigned e = 1; e <= k; ++e) powers[j].push_back((powers[j].back() * xj).round_out(wp));
    }
    std::vector<DyadicInterval> out;
    out.reserve(monomials.size());
    bool ok = true;
    for (const auto& ev : monomials) {
      DyadicInterval v = DyadicInterval::from_int(BigInt(1));
      for (std::size_t j = 0; j < ev.size(); ++j) {
        if (ev[j]) v = (v * powers[j][ev[j]]).round_out(wp);
      }
      v = v.round_out(p + 2);
      if (!v.width_at_most(p)) {
        ok = false;
        break;
      }
      out.push_back(std::move(v));
    }
    if (ok) return out;
  }
  throw OracleError("monomial enclosure did not reach width 2^-" + std::to_string(p));
}

}  // namespace

std::vector<DyadicInterval> veronese_enclosures(const MonomialBasis& b, const std::vector<RealOracle>& x,
                                                long p) {
  if (x.size() != b.dim()) throw ConfigError("veronese_enclosures: point has wrong dimension");
  return enclose_monomials(b.order(), b.degree(), x, p);
}

std::vector<RealOracle> veronese_eval(const MonomialBasis& b, const std::vector<RealOracle>& x) {
  if (x.size() != b.dim()) throw ConfigError("veronese_eval: point has wrong dimension");
  bool all_exact = std::all_of(x.begin(), x.end(), [](const RealOracle& o) { return o.exact().has_value(); });
  std::vector<RealOracle> out;
  out.reserve(b.size());
  if (all_exact) {
    std::vector<Rational> xr;
    for (const auto& o : x) xr.push_back(*o.exact());
    auto vals = veronese_eval(b, xr);
    for (std::size_t i = 0; i < vals.size(); ++i) {
      out.push_back(RealOracle::from_rational(vals[i], RealOracle::Kind::derived, monomial_name(b[i])));
    }
    return out;
  }
  for (const auto& ev : b.order()) {
    std::vector<ExponentVector> single{ev};
    unsigned k = b.degree();
    out.emplace_back(RealOracle::Kind::derived,
                     [single, k, x](long p) { return enclose_monomials(single, k, x, p).front(); },
                     monomial_name(ev));
  }
  return out;
}

}  // namespace mahler
