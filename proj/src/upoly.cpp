#include "mahler/upoly.hpp"

#include <algorithm>

namespace mahler {

UPoly::UPoly(std::vector<Rational> c) : c_(std::move(c)) { trim(); }

UPoly UPoly::from_integers(const std::vector<BigInt>& c) {
  std::vector<Rational> r;
  r.reserve(c.size());
  for (const auto& v : c) r.emplace_back(v);
  return UPoly(std::move(r));
}

void UPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational UPoly::eval(const Rational& x) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

int UPoly::sign_at(const Rational& x) const { return sgn(eval(x)); }

UPoly UPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
  return UPoly(std::move(d));
}

UPoly UPoly::monic() const {
  if (is_zero()) return {};
  Rational lc = leading();
  std::vector<Rational> c(c_);
  for (auto& v : c) v /= lc;
  return UPoly(std::move(c));
}

UPoly operator+(const UPoly& a, const UPoly& b) {
  std::vector<Rational> c(std::max(a.c_.size(), b.c_.size()));
  for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
  for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
  return UPoly(std::move(c));
}

UPoly operator*(const Rational& s, const UPoly& a) {
  std::vector<Rational> c(a.c_);
  for (auto& v : c) v *= s;
  return UPoly(std::move(c));
}

UPoly operator-(const UPoly& a, const UPoly& b) { return a + Rational(-1) * b; }

UPoly operator*(const UPoly& a, const UPoly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<Rational> c(a.c_.size() + b.c_.size() - 1);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
  }
  return UPoly(std::move(c));
}

std::pair<UPoly, UPoly> UPoly::divmod(const UPoly& a, const UPoly& b) {
  if (b.is_zero()) throw DomainError("UPoly division by zero polynomial");
  std::vector<Rational> r = a.c_;
  int db = b.degree();
  if (a.degree() < db) return {UPoly(), a};
  std::vector<Rational> q(static_cast<std::size_t>(a.degree() - db + 1));
  for (int i = a.degree(); i >= db; --i) {
    Rational coef = r[static_cast<std::size_t>(i)] / b.leading();
    q[static_cast<std::size_t>(i - db)] = coef;
    if (coef == 0) continue;
    for (int j = 0; j <= db; ++j) r[static_cast<std::size_t>(i - db + j)] -= coef * b.c_[static_cast<std::size_t>(j)];
  }
  return {UPoly(std::move(q)), UPoly(std::move(r))};
}

UPoly gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    UPoly r = UPoly::divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return a.monic();
}

UPoly UPoly::squarefree() const {
  if (degree() <= 0) return monic();
  UPoly g = gcd(*this, derivative());
  return divmod(*this, g).first.monic();
}

std::vector<UPoly> UPoly::sturm_chain() const {
  std::vector<UPoly> chain{*this, derivative()};
  while (!chain.back().is_zero()) {
    UPoly r = divmod(chain[chain.size() - 2], chain.back()).second;
    if (r.is_zero()) break;
    chain.push_back(Rational(-1) * r);
  }
  if (chain.back().is_zero()) chain.pop_back();
  return chain;
}

namespace {

int variations(const std::vector<UPoly>& chain, const Rational& x) {
  int count = 0, prev = 0;
  for (const auto& p : chain) {
    int s = p.sign_at(x);
    if (s == 0) continue;
    if (prev != 0 && s != prev) ++count;
    prev = s;
  }
  return count;
}

}  // namespace

int UPoly::count_roots(const Rational& a, const Rational& b) const {
  if (is_zero()) throw DomainError("count_roots of zero polynomial");
  if (b < a) return 0;
  auto chain = sturm_chain();
  return variations(chain, a) - variations(chain, b);
}

Rational UPoly::root_bound() const {
  if (degree() <= 0) return Rational(1);
  Rational m = 0;
  for (int i = 0; i < degree(); ++i) m = std::max(m, abs(Rational(c_[static_cast<std::size_t>(i)] / leading())));
  return m + 1;
}

int sign_at(const std::vector<BigInt>& c, const Dyadic& x) {
  std::size_t deg = c.size();
  while (deg > 0 && c[deg - 1] == 0) --deg;
  if (deg == 0) return 0;
  --deg;
  if (x.exp() >= 0) {
    BigInt xv = x.floor_int();
    BigInt acc = c[deg];
    for (std::size_t i = deg; i-- > 0;) acc = acc * xv + c[i];
    return sgn(acc);
  }
  // P(m / 2^s) * 2^(s * deg) via scaled Horner
  const BigInt& m = x.mant();
  auto s = static_cast<mp_bitcnt_t>(-x.exp());
  BigInt acc = c[deg];
  for (std::size_t i = deg; i-- > 0;) {
    BigInt term;
    mpz_mul_2exp(term.get_mpz_t(), c[i].get_mpz_t(), s * (deg - i));
    acc = acc * m + term;
  }
  return sgn(acc);
}

}  // namespace mahler
