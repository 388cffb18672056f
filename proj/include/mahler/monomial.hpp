#pragma once

// Nonconstant monomials of bounded total degree and the Veronese-type map.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "mahler/numerics.hpp"
#include "mahler/oracle.hpp"

namespace mahler {

using ExponentVector = std::vector<unsigned>;

inline constexpr std::size_t kDefaultBasisCap = 1'000'000;

/// The n = C(k+d, d) - 1 nonconstant monomials in d variables of total degree
/// <= k. Order: blocks of increasing total degree; inside a block, exponent
/// vectors in decreasing lexicographic order (x1 highest). Every prefix of
/// total degree <= j is basis(d, j).
class MonomialBasis {
 public:
  MonomialBasis(unsigned d, unsigned k, std::size_t cap = kDefaultBasisCap);

  unsigned dim() const { return d_; }
  unsigned degree() const { return k_; }
  std::size_t size() const { return order_.size(); }
  const std::vector<ExponentVector>& order() const { return order_; }
  const ExponentVector& operator[](std::size_t i) const { return order_[i]; }
  /// Number of monomials of total degree <= j (n_j).
  std::size_t prefix_size(unsigned j) const;

  friend bool operator==(const MonomialBasis& a, const MonomialBasis& b) {
    return a.d_ == b.d_ && a.k_ == b.k_;
  }

 private:
  unsigned d_, k_;
  std::vector<ExponentVector> order_;
};

using BasisPtr = std::shared_ptr<const MonomialBasis>;

BasisPtr basis(unsigned d, unsigned k, std::size_t cap = kDefaultBasisCap);

/// "[1,1]" style exponent tuple.
std::string to_string(const ExponentVector& e);
/// Human-readable monomial such as "x1*x2^2".
std::string monomial_name(const ExponentVector& e);

std::vector<Rational> veronese_eval(const MonomialBasis& b, const std::vector<Rational>& x);
/// One oracle per monomial; each delivers certified products of coordinate
/// enclosures.
std::vector<RealOracle> veronese_eval(const MonomialBasis& b, const std::vector<RealOracle>& x);

/// Enclosures of all monomials at once with width <= 2^(-p) each.
std::vector<DyadicInterval> veronese_enclosures(const MonomialBasis& b, const std::vector<RealOracle>& x,
                                                long p);

}  // namespace mahler
