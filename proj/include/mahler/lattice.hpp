#pragma once

// Exact integer LLL and linear-form lattices for small |q.y + p|.

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "mahler/numerics.hpp"
#include "mahler/poly.hpp"

namespace mahler {

using IntMatrix = std::vector<std::vector<BigInt>>;

class LatticeBasis {
 public:
  LatticeBasis() = default;
  /// Rows are basis vectors; all rows share one length >= row count.
  explicit LatticeBasis(IntMatrix rows);

  std::size_t size() const { return rows_.size(); }
  std::size_t dim() const { return rows_.empty() ? 0 : rows_.front().size(); }
  const std::vector<BigInt>& operator[](std::size_t i) const { return rows_[i]; }
  const IntMatrix& rows() const { return rows_; }

  friend bool operator==(const LatticeBasis&, const LatticeBasis&) = default;

 private:
  IntMatrix rows_;
};

struct GramSchmidt {
  std::vector<std::vector<Rational>> mu;  // mu[i][j], j < i
  std::vector<Rational> norms;            // |b*_i|^2
};

/// Exact rational Gram-Schmidt; throws DomainError on dependent rows.
GramSchmidt gram_schmidt(const LatticeBasis& b);
/// Absolute determinant of a square basis (sqrt of the Gram determinant).
BigInt abs_det(const LatticeBasis& b);
/// Size-reduced (|mu| <= 1/2) and Lovasz condition with delta.
bool is_lll_reduced(const LatticeBasis& b, const Rational& delta);

/// Integral LLL with exact subdeterminants. Requires 1/4 < delta < 1 and
/// independent rows.
LatticeBasis lll_reduce(const LatticeBasis& b, const Rational& delta = Rational(99, 100));

/// Lattice of integer vectors (p, q) encoded as
///   (p C + sum q_i Y_i, q_1 W_1, ..., q_m W_m),  Y_i = round(C y_i),
/// over the active coordinates (bound > 0). With equal bounds Q the scales are
/// C = Q^(n+1) 2^prec and W_i = 2^prec.
struct LinearFormLattice {
  std::size_t full_size = 0;        // length of y
  std::vector<std::size_t> active;  // indices into y with bound > 0
  std::vector<BigInt> bounds;       // per active coordinate
  std::vector<Rational> y_approx;   // per active coordinate
  std::vector<BigInt> rounded;      // Y_i
  std::vector<BigInt> weights;      // W_i
  BigInt scale;                     // C
  BigInt unit;                      // common target size T = C / prod(bounds) = B_i W_i
  long precision = 0;
  LatticeBasis basis;
};

/// Builds the lattice for per-coordinate bounds (0 forces q_i = 0). Each Y_i
/// is within 1/2 + 2^-7 of C y_i. precision 0 picks 64 + m bitlen(max bound).
LinearFormLattice build_form_lattice(const FormTarget& y, const std::vector<BigInt>& bounds, long precision = 0);

/// Recovers (q, p) from a lattice vector; q has full length with zeros at
/// inactive coordinates.
std::pair<std::vector<BigInt>, BigInt> decode(const LinearFormLattice& L, const std::vector<BigInt>& v);

struct FormCandidate {
  std::vector<BigInt> q;  // full length n, leading nonzero entry positive
  BigInt p;               // q.y + p is small
};

/// LLL proposals: reduced rows and their combinations with coefficients in
/// {-2..2} over the first four rows, filtered to the box. Always nonempty.
std::vector<FormCandidate> small_form_candidates(const FormTarget& y, const BigInt& Q,
                                                 const std::optional<std::vector<BigInt>>& bounds = std::nullopt);

inline constexpr std::size_t kDefaultNodeCap = 50'000'000;

/// Visits every nonzero vector v of the lattice spanned by `reduced` with
/// |v|^2 <= radius2 * unit^2, one of each pair +-v. `reduced` should be LLL
/// reduced. Throws ResourceCapError past node_cap search nodes.
void enumerate_ball(const LatticeBasis& reduced, const BigInt& unit, long double radius2, std::size_t node_cap,
                    const std::function<void(const std::vector<BigInt>&)>& visit);

/// Integer q with q.y an integer (relations p + q.y = 0), as an LLL-reduced
/// basis of length-n rows; empty when there are none. nullopt when equality
/// is not decidable for y (see FormTarget::exact_zero).
std::optional<LatticeBasis> relation_lattice(const FormTarget& y);

/// Relations q in the box with the smallest sup norm (all of them, sign
/// normalised); empty if the box holds none.
std::vector<std::vector<BigInt>> smallest_box_relations(const LatticeBasis& relations,
                                                        const std::vector<BigInt>& bounds,
                                                        std::size_t node_cap = kDefaultNodeCap);

/// Every (q, p) with q != 0 in the box and |q.y + p| <= factor / prod(bounds)
/// (plus possible extras within rounding margin; callers certify). Complete
/// enumeration of the lattice ball that contains the box-slab region.
std::vector<FormCandidate> box_enumerate(const FormTarget& y, const std::vector<BigInt>& bounds,
                                         const Rational& factor, std::size_t node_cap = kDefaultNodeCap);

}  // namespace mahler
