#include "mahler/poly.hpp"

#include <algorithm>
#include <map>
#include <mutex>

#include "mahler/upoly.hpp"

namespace mahler {

IntPolynomial::IntPolynomial(BasisPtr b, BigInt a0, std::vector<BigInt> q)
    : basis_(std::move(b)), a0_(std::move(a0)), q_(std::move(q)) {
  if (!basis_) throw ConfigError("IntPolynomial requires a basis");
  if (q_.size() != basis_->size()) {
    throw ConfigError("IntPolynomial: expected " + std::to_string(basis_->size()) + " coefficients, got " +
                      std::to_string(q_.size()));
  }
}

bool IntPolynomial::is_zero() const { return a0_ == 0 && !search_admissible(); }

bool IntPolynomial::search_admissible() const {
  return std::any_of(q_.begin(), q_.end(), [](const BigInt& v) { return v != 0; });
}

std::string IntPolynomial::to_string() const {
  std::string s;
  auto term = [&s](const BigInt& c, const std::string& mono) {
    if (c == 0) return;
    BigInt a = mahler::abs(c);
    if (s.empty()) {
      s += c < 0 ? "-" : "";
    } else {
      s += c < 0 ? " - " : " + ";
    }
    if (mono.empty()) {
      s += mahler::to_string(a);
    } else {
      if (a != 1) s += mahler::to_string(a) + "*";
      s += mono;
    }
  };
  for (std::size_t i = q_.size(); i-- > 0;) term(q_[i], monomial_name((*basis_)[i]));
  term(a0_, "");
  return s.empty() ? "0" : s;
}

BigInt sup_norm(const std::vector<BigInt>& q) {
  BigInt m = 0;
  for (const auto& v : q) {
    if (mahler::abs(v) > m) m = mahler::abs(v);
  }
  return m;
}

HeightPair heights(const IntPolynomial& P) {
  BigInt ht = sup_norm(P.q());
  BigInt h = std::max(ht, BigInt(mahler::abs(P.a0())));
  return {h, ht};
}

Rational eval_exact(const IntPolynomial& P, const std::vector<Rational>& x) {
  auto f = veronese_eval(P.basis(), x);
  Rational v = P.a0();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (P.q()[i] != 0) v += P.q()[i] * f[i];
  }
  return v;
}

DyadicInterval eval_enclosure(const IntPolynomial& P, const std::vector<RealOracle>& x, long p) {
  auto f = veronese_enclosures(P.basis(), x, p);
  DyadicInterval acc = DyadicInterval::from_int(P.a0());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (P.q()[i] != 0) acc = acc + DyadicInterval::from_int(P.q()[i]) * f[i];
  }
  return acc;
}

DyadicInterval enclose_relative(const Rational& v, long rel_bits) {
  if (v == 0) return DyadicInterval::from_int(BigInt(0));
  long p = rel_bits + static_cast<long>(bit_length(BigInt(v.get_den()))) -
           static_cast<long>(bit_length(BigInt(abs(BigInt(v.get_num()))))) + 2;
  return DyadicInterval::from_rational(v, std::max(p, rel_bits));
}

// ------------------------------------------------------------ FormTarget

struct FormTarget::State {
  std::vector<RealOracle> x;
  BasisPtr basis;
  std::optional<std::vector<Rational>> exact;
  std::vector<unsigned __int128> fractions;
  int algebraic_index = -1;
  std::mutex mutex;
  std::map<long, std::vector<DyadicInterval>> cache;
};

namespace {

unsigned __int128 low128(const BigInt& v) {
  BigInt r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), v.get_mpz_t(), 128);
  unsigned long long words[2] = {0, 0};
  std::size_t count = 0;
  mpz_export(words, &count, -1, sizeof(unsigned long long), 0, 0, r.get_mpz_t());
  return (static_cast<unsigned __int128>(words[1]) << 64) | words[0];
}

}  // namespace

FormTarget FormTarget::from_point(const std::vector<RealOracle>& x, BasisPtr b) {
  if (!b) throw ConfigError("FormTarget requires a basis");
  if (x.size() != b->dim()) throw ConfigError("point dimension does not match basis");
  auto s = std::make_shared<State>();
  s->x = x;
  s->basis = std::move(b);
  bool all_exact = std::all_of(x.begin(), x.end(), [](const RealOracle& o) { return o.exact().has_value(); });
  if (all_exact) {
    std::vector<Rational> xr;
    for (const auto& o : x) xr.push_back(*o.exact());
    s->exact = veronese_eval(*s->basis, xr);
  } else {
    int irrational = 0;
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (!x[j].exact()) {
        ++irrational;
        if (x[j].algebraic()) s->algebraic_index = static_cast<int>(j);
      }
    }
    if (irrational != 1) s->algebraic_index = -1;
  }
  FormTarget t(std::move(s));
  // screening fractions
  auto& st = *t.state_;
  st.fractions.reserve(st.basis->size());
  if (st.exact) {
    for (const auto& y : *st.exact) {
      BigInt num = y.get_num();
      mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), 128);
      BigInt fl;
      mpz_fdiv_q(fl.get_mpz_t(), num.get_mpz_t(), y.get_den_mpz_t());
      st.fractions.push_back(low128(fl));
    }
  } else {
    for (const auto& e : t.enclosures(160)) st.fractions.push_back(low128(e.lo().scaled(128).floor_int()));
  }
  return t;
}

FormTarget FormTarget::from_reals(const std::vector<RealOracle>& y) {
  if (y.empty()) throw ConfigError("FormTarget requires at least one coordinate");
  return from_point(y, mahler::basis(static_cast<unsigned>(y.size()), 1));
}

std::size_t FormTarget::size() const { return state_->basis->size(); }
const MonomialBasis& FormTarget::basis() const { return *state_->basis; }
const BasisPtr& FormTarget::basis_ptr() const { return state_->basis; }
const std::vector<RealOracle>& FormTarget::coordinates() const { return state_->x; }
bool FormTarget::is_exact() const { return state_->exact.has_value(); }
const std::vector<Rational>& FormTarget::exact_values() const { return *state_->exact; }
const std::vector<unsigned __int128>& FormTarget::fractions() const { return state_->fractions; }

std::vector<DyadicInterval> FormTarget::enclosures(long p) const {
  auto& st = *state_;
  if (st.exact) {
    std::vector<DyadicInterval> out;
    out.reserve(st.exact->size());
    for (const auto& y : *st.exact) out.push_back(DyadicInterval::from_rational(y, p));
    return out;
  }
  {
    std::lock_guard lock(st.mutex);
    auto it = st.cache.lower_bound(p);
    if (it != st.cache.end()) return it->second;
  }
  auto enc = veronese_enclosures(*st.basis, st.x, p);
  std::lock_guard lock(st.mutex);
  if (st.cache.size() > 32) st.cache.erase(st.cache.begin());
  st.cache.emplace(p, enc);
  return enc;
}

DyadicInterval FormTarget::dot(const std::vector<BigInt>& q, long p) const {
  BigInt l1 = 0;
  for (const auto& v : q) l1 += mahler::abs(v);
  long guard = static_cast<long>(bit_length(l1)) + 1;
  auto enc = enclosures(p + guard);
  DyadicInterval acc = DyadicInterval::from_int(BigInt(0));
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] != 0) acc = acc + DyadicInterval::from_int(q[i]) * enc[i];
  }
  return acc;
}

std::optional<bool> FormTarget::exact_zero(const BigInt& a0, const std::vector<BigInt>& q) const {
  const auto& st = *state_;
  if (st.exact) {
    Rational v = a0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] != 0) v += q[i] * (*st.exact)[i];
    }
    return v == 0;
  }
  if (st.algebraic_index < 0) return std::nullopt;
  const auto j0 = static_cast<std::size_t>(st.algebraic_index);
  const auto& alg = *st.x[j0].algebraic();
  std::vector<Rational> c(st.basis->degree() + 1);
  c[0] += a0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0) continue;
    const auto& ev = (*st.basis)[i];
    Rational coef = q[i];
    for (std::size_t j = 0; j < ev.size(); ++j) {
      if (j != j0 && ev[j]) coef *= pow(*st.x[j].exact(), ev[j]);
    }
    c[ev[j0]] += coef;
  }
  UPoly slice(std::move(c));
  UPoly g = gcd(slice, UPoly::from_integers(alg.minpoly));
  if (g.degree() < 1) return false;
  return g.sign_at(alg.iso_lo) * g.sign_at(alg.iso_hi) < 0;
}

namespace {

bool relative_ok(const DyadicInterval& v, long rel_bits) {
  if (v.lo().sign() <= 0) return false;
  return v.width().scaled(rel_bits) <= v.lo();
}

}  // namespace

CertifiedValue FormTarget::certify_with(const BigInt& a0, const std::vector<BigInt>& q,
                                        const PrecisionPolicy& policy) const {
  const auto& st = *state_;
  if (st.exact) {
    Rational v = a0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] != 0) v += q[i] * (*st.exact)[i];
    }
    v = abs(v);
    CertifiedValue out{a0, enclose_relative(v, policy.rel_bits), v, v == 0, false};
    return out;
  }
  bool zero_checked = false;
  const DyadicInterval a0i = DyadicInterval::from_int(a0);
  for (long p = policy.p_start;; p = std::min(2 * p, policy.p_max)) {
    DyadicInterval v = (dot(q, p) + a0i).abs();
    if (relative_ok(v, policy.rel_bits)) return {a0, v, std::nullopt, false, false};
    if (v.contains_zero() && !zero_checked) {
      zero_checked = true;
      if (auto z = exact_zero(a0, q); z && *z) {
        return {a0, DyadicInterval::from_int(BigInt(0)), std::nullopt, true, false};
      }
    }
    if (p >= policy.p_max) return {a0, v, std::nullopt, false, v.contains_zero()};
  }
}

CertifiedValue FormTarget::certify(const std::vector<BigInt>& q, const PrecisionPolicy& policy) const {
  const auto& st = *state_;
  if (st.exact) {
    Rational t = 0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (q[i] != 0) t += q[i] * (*st.exact)[i];
    }
    return certify_with(BigInt(-round_nearest(t)), q, policy);
  }
  const Dyadic half(BigInt(1), -1);
  for (long p = policy.p_start;; p = std::min(2 * p, policy.p_max)) {
    DyadicInterval t = dot(q, p);
    BigInt r1 = (t.lo() + half).floor_int();
    BigInt r2 = (t.hi() + half).floor_int();
    if (r1 == r2 || p >= policy.p_max) return certify_with(BigInt(-r1), q, policy);
  }
}

}  // namespace mahler
