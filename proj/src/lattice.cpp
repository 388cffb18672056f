#include "mahler/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "mahler/upoly.hpp"

namespace mahler {

LatticeBasis::LatticeBasis(IntMatrix rows) : rows_(std::move(rows)) {
  if (rows_.empty()) return;
  const std::size_t n = rows_.front().size();
  for (const auto& r : rows_) {
    if (r.size() != n) throw ConfigError("lattice rows must have equal length");
  }
  if (rows_.size() > n) throw DomainError("more lattice rows than columns");
}

namespace {

BigInt dot(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
  BigInt s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

BigInt divexact(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_divexact(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

// nearest integer to a / b for b > 0
BigInt round_div(const BigInt& a, const BigInt& b) {
  BigInt num = 2 * a + b;
  BigInt den = 2 * b;
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  return r;
}

}  // namespace

GramSchmidt gram_schmidt(const LatticeBasis& b) {
  const std::size_t m = b.size();
  GramSchmidt g;
  g.mu.assign(m, std::vector<Rational>(m));
  g.norms.assign(m, Rational(0));
  std::vector<std::vector<Rational>> star(m);
  for (std::size_t i = 0; i < m; ++i) {
    star[i].assign(b[i].begin(), b[i].end());
    for (std::size_t j = 0; j < i; ++j) {
      Rational s = 0;
      for (std::size_t t = 0; t < b.dim(); ++t) s += Rational(b[i][t]) * star[j][t];
      g.mu[i][j] = s / g.norms[j];
      for (std::size_t t = 0; t < b.dim(); ++t) star[i][t] -= g.mu[i][j] * star[j][t];
    }
    for (const auto& v : star[i]) g.norms[i] += v * v;
    if (g.norms[i] == 0) throw DomainError("lattice rows are linearly dependent");
  }
  return g;
}

BigInt abs_det(const LatticeBasis& b) {
  if (b.size() != b.dim()) throw DomainError("determinant needs a square basis");
  auto g = gram_schmidt(b);
  Rational prod = 1;
  for (const auto& v : g.norms) prod *= v;
  BigInt sq = prod.get_num();
  BigInt r;
  mpz_sqrt(r.get_mpz_t(), sq.get_mpz_t());
  return r;
}

bool is_lll_reduced(const LatticeBasis& b, const Rational& delta) {
  auto g = gram_schmidt(b);
  const Rational half(1, 2);
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (abs(g.mu[i][j]) > half) return false;
    }
    if (i > 0) {
      const Rational& mu = g.mu[i][i - 1];
      if (g.norms[i] < (delta - mu * mu) * g.norms[i - 1]) return false;
    }
  }
  return true;
}

LatticeBasis lll_reduce(const LatticeBasis& input, const Rational& delta) {
  if (delta <= Rational(1, 4) || delta >= 1) throw ConfigError("LLL parameter must lie in (1/4, 1)");
  IntMatrix b = input.rows();
  const std::size_t m = b.size();
  if (m <= 1) {
    if (m == 1 && dot(b[0], b[0]) == 0) throw DomainError("lattice rows are linearly dependent");
    return input;
  }
  const BigInt da = delta.get_num();
  const BigInt db = delta.get_den();

  // d[i + 1] is the Gram determinant of rows 0..i; lam[k][j] = d[j + 1] mu[k][j].
  std::vector<BigInt> d(m + 1, BigInt(0));
  std::vector<std::vector<BigInt>> lam(m, std::vector<BigInt>(m, BigInt(0)));
  d[0] = 1;

  auto red = [&](std::size_t k, std::size_t l) {
    if (2 * abs(lam[k][l]) <= d[l + 1]) return;
    BigInt q = round_div(lam[k][l], d[l + 1]);
    for (std::size_t t = 0; t < b[k].size(); ++t) b[k][t] -= q * b[l][t];
    lam[k][l] -= q * d[l + 1];
    for (std::size_t i = 0; i < l; ++i) lam[k][i] -= q * lam[l][i];
  };

  std::size_t kmax = 0;
  d[1] = dot(b[0], b[0]);
  if (d[1] == 0) throw DomainError("lattice rows are linearly dependent");

  auto swap_rows = [&](std::size_t k) {
    std::swap(b[k], b[k - 1]);
    for (std::size_t j = 0; j + 1 < k; ++j) std::swap(lam[k][j], lam[k - 1][j]);
    const BigInt l = lam[k][k - 1];
    const BigInt B = divexact(d[k - 1] * d[k + 1] + l * l, d[k]);
    for (std::size_t i = k + 1; i <= kmax; ++i) {
      const BigInt t = lam[i][k];
      lam[i][k] = divexact(d[k + 1] * lam[i][k - 1] - l * t, d[k]);
      lam[i][k - 1] = divexact(B * t + l * lam[i][k], d[k + 1]);
    }
    d[k] = B;
  };

  std::size_t k = 1;
  while (k < m) {
    if (k > kmax) {
      kmax = k;
      for (std::size_t j = 0; j <= k; ++j) {
        BigInt u = dot(b[k], b[j]);
        for (std::size_t i = 0; i < j; ++i) u = divexact(d[i + 1] * u - lam[k][i] * lam[j][i], d[i]);
        if (j < k) {
          lam[k][j] = u;
        } else {
          d[k + 1] = u;
        }
      }
      if (d[k + 1] == 0) throw DomainError("lattice rows are linearly dependent");
    }
    red(k, k - 1);
    if (db * d[k + 1] * d[k - 1] < da * d[k] * d[k] - db * lam[k][k - 1] * lam[k][k - 1]) {
      swap_rows(k);
      if (k > 1) --k;
      continue;
    }
    for (std::size_t l = k - 1; l-- > 0;) red(k, l);
    ++k;
  }
  return LatticeBasis(std::move(b));
}

// ------------------------------------------------------------ form lattices

LinearFormLattice build_form_lattice(const FormTarget& y, const std::vector<BigInt>& bounds, long precision) {
  const std::size_t n = y.size();
  if (bounds.size() != n) throw ConfigError("bounds must have one entry per coordinate");
  LinearFormLattice L;
  L.full_size = n;
  BigInt bmax = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (bounds[i] < 0) throw ConfigError("coordinate bounds must be nonnegative");
    if (bounds[i] > 0) {
      L.active.push_back(i);
      L.bounds.push_back(bounds[i]);
      bmax = std::max(bmax, bounds[i]);
    }
  }
  if (L.active.empty()) throw ConfigError("at least one coordinate bound must be positive");
  const std::size_t m = L.active.size();

  BigInt M = 1;
  for (const auto& b : L.bounds) M *= b;
  BigInt g = M * M;
  std::vector<BigInt> cof;
  for (const auto& b : L.bounds) {
    cof.push_back(M / b);
    g = gcd(g, cof.back());
  }
  L.precision = precision > 0 ? precision : 64 + static_cast<long>(m * bit_length(bmax));
  BigInt S = 1;
  mpz_mul_2exp(S.get_mpz_t(), S.get_mpz_t(), static_cast<mp_bitcnt_t>(L.precision));
  L.scale = S * (M * M / g);
  L.unit = S * (M / g);
  for (const auto& c : cof) L.weights.push_back(S * (c / g));

  if (y.is_exact()) {
    for (auto i : L.active) {
      L.y_approx.push_back(y.exact_values()[i]);
      L.rounded.push_back(round_nearest(L.scale * y.exact_values()[i]));
    }
  } else {
    auto enc = y.enclosures(static_cast<long>(bit_length(L.scale)) + 8);
    for (auto i : L.active) {
      Rational mid = (enc[i].lo().to_rational() + enc[i].hi().to_rational()) / 2;
      L.y_approx.push_back(mid);
      L.rounded.push_back(round_nearest(L.scale * mid));
    }
  }

  IntMatrix rows(m + 1, std::vector<BigInt>(m + 1, BigInt(0)));
  rows[0][0] = L.scale;
  for (std::size_t i = 0; i < m; ++i) {
    rows[i + 1][0] = L.rounded[i];
    rows[i + 1][i + 1] = L.weights[i];
  }
  L.basis = LatticeBasis(std::move(rows));
  return L;
}

std::pair<std::vector<BigInt>, BigInt> decode(const LinearFormLattice& L, const std::vector<BigInt>& v) {
  std::vector<BigInt> q(L.full_size, BigInt(0));
  BigInt rest = v[0];
  for (std::size_t i = 0; i < L.active.size(); ++i) {
    BigInt qi = divexact(v[i + 1], L.weights[i]);
    rest -= qi * L.rounded[i];
    q[L.active[i]] = std::move(qi);
  }
  return {std::move(q), divexact(rest, L.scale)};
}

namespace {

struct Ranked {
  FormCandidate c;
  BigInt screen;  // |v_0|
};

void normalize_sign(FormCandidate& c) {
  for (const auto& v : c.q) {
    if (v == 0) continue;
    if (v < 0) {
      for (auto& t : c.q) t = -t;
      c.p = -c.p;
    }
    return;
  }
}

bool in_box(const std::vector<BigInt>& q, const std::vector<BigInt>& bounds) {
  bool nonzero = false;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (abs(q[i]) > bounds[i]) return false;
    nonzero = nonzero || q[i] != 0;
  }
  return nonzero;
}

std::vector<FormCandidate> finish(std::vector<Ranked> pool) {
  std::sort(pool.begin(), pool.end(), [](const Ranked& a, const Ranked& b) {
    if (a.screen != b.screen) return a.screen < b.screen;
    BigInt ha = sup_norm(a.c.q), hb = sup_norm(b.c.q);
    if (ha != hb) return ha < hb;
    return a.c.q < b.c.q;
  });
  std::set<std::vector<BigInt>> seen;
  std::vector<FormCandidate> out;
  for (auto& r : pool) {
    if (seen.insert(r.c.q).second) out.push_back(std::move(r.c));
  }
  return out;
}

void consider(const LinearFormLattice& L, const std::vector<BigInt>& v, const std::vector<BigInt>& bounds,
              std::vector<Ranked>& pool) {
  auto [q, p] = decode(L, v);
  FormCandidate c{std::move(q), std::move(p)};
  if (!in_box(c.q, bounds)) return;
  normalize_sign(c);
  pool.push_back({std::move(c), abs(v[0])});
}

}  // namespace

std::vector<FormCandidate> small_form_candidates(const FormTarget& y, const BigInt& Q,
                                                 const std::optional<std::vector<BigInt>>& bounds) {
  if (Q < 1) throw ConfigError("Q must be at least 1");
  const std::vector<BigInt> box = bounds ? *bounds : std::vector<BigInt>(y.size(), Q);
  LinearFormLattice L = build_form_lattice(y, box);
  LatticeBasis red = lll_reduce(L.basis);
  const std::size_t dim = red.dim();
  const std::size_t t = std::min<std::size_t>(red.size(), 4);

  std::vector<Ranked> pool;
  std::vector<int> coef(t, -2);
  for (;;) {
    if (std::any_of(coef.begin(), coef.end(), [](int c) { return c != 0; })) {
      std::vector<BigInt> v(dim, BigInt(0));
      for (std::size_t j = 0; j < t; ++j) {
        if (coef[j] == 0) continue;
        for (std::size_t c = 0; c < dim; ++c) v[c] += coef[j] * red[j][c];
      }
      consider(L, v, box, pool);
    }
    std::size_t j = 0;
    while (j < t && coef[j] == 2) coef[j++] = -2;
    if (j == t) break;
    ++coef[j];
  }
  for (std::size_t j = t; j < red.size(); ++j) consider(L, red[j], box, pool);

  if (pool.empty()) {
    const std::size_t i0 = L.active.front();
    FormCandidate c{std::vector<BigInt>(y.size(), BigInt(0)), BigInt(0)};
    c.q[i0] = 1;
    c.p = -round_nearest(L.y_approx.front());
    pool.push_back({std::move(c), BigInt(0)});
  }
  return finish(std::move(pool));
}

void enumerate_ball(const LatticeBasis& reduced, const BigInt& unit, long double radius2, std::size_t node_cap,
                    const std::function<void(const std::vector<BigInt>&)>& visit) {
  const std::size_t m = reduced.size();
  if (m == 0) return;
  const std::size_t dim = reduced.dim();
  std::vector<std::vector<long double>> rows(m, std::vector<long double>(dim));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < dim; ++c) rows[i][c] = Rational(reduced[i][c], unit).get_d();
  }
  // floating Gram-Schmidt of the scaled rows
  std::vector<std::vector<long double>> mu(m, std::vector<long double>(m, 0.0L));
  std::vector<long double> bn(m, 0.0L);
  {
    std::vector<std::vector<long double>> star = rows;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        long double s = 0;
        for (std::size_t c = 0; c < dim; ++c) s += rows[i][c] * star[j][c];
        mu[i][j] = s / bn[j];
        for (std::size_t c = 0; c < dim; ++c) star[i][c] -= mu[i][j] * star[j][c];
      }
      for (std::size_t c = 0; c < dim; ++c) bn[i] += star[i][c] * star[i][c];
    }
  }
  const long double r2 = radius2 * (1.0L + std::ldexp(1.0L, -20));

  std::vector<long> x(m, 0);
  std::size_t nodes = 0;
  std::function<void(std::size_t, long double, bool)> walk = [&](std::size_t k, long double partial,
                                                                 bool zero_above) {
    long double center = 0;
    for (std::size_t j = k + 1; j < m; ++j) center -= static_cast<long double>(x[j]) * mu[j][k];
    const long double room = r2 - partial;
    if (room < 0) return;
    const long double span = std::sqrt(room / bn[k]);
    long lo = static_cast<long>(std::ceil(center - span));
    const long hi = static_cast<long>(std::floor(center + span));
    if (zero_above) lo = std::max(lo, 0L);
    for (long v = lo; v <= hi; ++v) {
      if (++nodes > node_cap) {
        throw ResourceCapError("lattice enumeration exceeded " + std::to_string(node_cap) + " nodes");
      }
      const long double diff = static_cast<long double>(v) - center;
      const long double next = partial + diff * diff * bn[k];
      if (next > r2) continue;
      x[k] = v;
      if (k == 0) {
        if (zero_above && v == 0) continue;
        std::vector<BigInt> vec(dim, BigInt(0));
        for (std::size_t j = 0; j < m; ++j) {
          if (x[j] == 0) continue;
          for (std::size_t c = 0; c < dim; ++c) vec[c] += x[j] * reduced[j][c];
        }
        visit(vec);
      } else {
        walk(k - 1, next, zero_above && v == 0);
      }
    }
    x[k] = 0;
  };
  walk(m - 1, 0.0L, true);
}

std::vector<FormCandidate> box_enumerate(const FormTarget& y, const std::vector<BigInt>& bounds,
                                         const Rational& factor, std::size_t node_cap) {
  if (factor <= 0) throw ConfigError("threshold factor must be positive");
  LinearFormLattice L = build_form_lattice(y, bounds);
  LatticeBasis red = lll_reduce(L.basis);

  // |v_0| <= factor T + sum B_i and |v_i| <= B_i W_i = T for every target.
  BigInt bsum = 0;
  for (const auto& b : L.bounds) bsum += b;
  const Rational slab = factor + make_rational(bsum, L.unit);
  const long double r2 = static_cast<long double>(L.active.size()) +
                         static_cast<long double>(Rational(slab * slab).get_d());
  const BigInt v0_cap = ceil(slab * L.unit);

  std::vector<Ranked> pool;
  enumerate_ball(red, L.unit, r2, node_cap, [&](const std::vector<BigInt>& v) {
    if (abs(v[0]) <= v0_cap) consider(L, v, bounds, pool);
  });
  return finish(std::move(pool));
}

// ------------------------------------------------------------ relations

namespace {

// Integer kernel of the rows of A (rows x cols) via unimodular row reduction.
IntMatrix integer_kernel(IntMatrix a) {
  const std::size_t rows = a.size();
  const std::size_t cols = rows ? a.front().size() : 0;
  IntMatrix u(rows, std::vector<BigInt>(rows, BigInt(0)));
  for (std::size_t i = 0; i < rows; ++i) u[i][i] = 1;
  auto axpy = [&](std::size_t dst, const BigInt& f, std::size_t src) {
    for (std::size_t c = 0; c < cols; ++c) a[dst][c] -= f * a[src][c];
    for (std::size_t c = 0; c < rows; ++c) u[dst][c] -= f * u[src][c];
  };
  std::size_t pivot = 0;
  for (std::size_t c = 0; c < cols && pivot < rows; ++c) {
    for (;;) {
      std::size_t best = rows;
      for (std::size_t r = pivot; r < rows; ++r) {
        if (a[r][c] != 0 && (best == rows || abs(a[r][c]) < abs(a[best][c]))) best = r;
      }
      if (best == rows) break;
      std::swap(a[pivot], a[best]);
      std::swap(u[pivot], u[best]);
      bool done = true;
      for (std::size_t r = pivot + 1; r < rows; ++r) {
        if (a[r][c] == 0) continue;
        BigInt f;
        mpz_fdiv_q(f.get_mpz_t(), a[r][c].get_mpz_t(), a[pivot][c].get_mpz_t());
        axpy(r, f, pivot);
        if (a[r][c] != 0) done = false;
      }
      if (done) {
        ++pivot;
        break;
      }
    }
  }
  return IntMatrix(u.begin() + static_cast<std::ptrdiff_t>(pivot), u.end());
}

}  // namespace

std::optional<LatticeBasis> relation_lattice(const FormTarget& y) {
  const std::size_t n = y.size();
  std::vector<std::vector<Rational>> image;  // row i: image of e_i; last row: constant 1
  if (y.is_exact()) {
    for (const auto& v : y.exact_values()) image.push_back({v});
    image.push_back({Rational(1)});
  } else {
    const auto& x = y.coordinates();
    std::size_t j0 = x.size();
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (x[j].exact()) continue;
      if (j0 != x.size() || !x[j].algebraic()) return std::nullopt;
      j0 = j;
    }
    if (j0 == x.size()) return std::nullopt;
    const UPoly f = UPoly::from_integers(x[j0].algebraic()->minpoly);
    const std::size_t deg = static_cast<std::size_t>(f.degree());
    auto reduced_power = [&](unsigned e, const Rational& c) {
      std::vector<Rational> coeffs(e + 1, Rational(0));
      coeffs[e] = 1;
      UPoly r = UPoly::divmod(UPoly(std::move(coeffs)), f).second;
      std::vector<Rational> out(deg, Rational(0));
      for (int i = 0; i <= r.degree(); ++i) out[static_cast<std::size_t>(i)] = c * r.coeffs()[static_cast<std::size_t>(i)];
      return out;
    };
    const auto& b = y.basis();
    for (std::size_t i = 0; i < n; ++i) {
      Rational c = 1;
      for (std::size_t j = 0; j < b[i].size(); ++j) {
        if (j != j0 && b[i][j]) c *= pow(*x[j].exact(), b[i][j]);
      }
      image.push_back(reduced_power(b[i][j0], c));
    }
    image.push_back(reduced_power(0, Rational(1)));
  }
  const std::size_t cols = image.front().size();
  IntMatrix a(n + 1, std::vector<BigInt>(cols, BigInt(0)));
  for (std::size_t c = 0; c < cols; ++c) {
    BigInt l = 1;
    for (const auto& row : image) l = lcm(l, BigInt(row[c].get_den()));
    for (std::size_t r = 0; r <= n; ++r) a[r][c] = BigInt(image[r][c] * l);
  }
  IntMatrix kernel = integer_kernel(std::move(a));
  if (kernel.empty()) return LatticeBasis();
  for (auto& row : kernel) row.pop_back();  // drop p; the projection is injective
  return lll_reduce(LatticeBasis(std::move(kernel)));
}

std::vector<std::vector<BigInt>> smallest_box_relations(const LatticeBasis& relations,
                                                        const std::vector<BigInt>& bounds,
                                                        std::size_t node_cap) {
  if (relations.size() == 0) return {};
  if (relations.dim() != bounds.size()) throw ConfigError("bounds must have one entry per coordinate");
  BigInt bmax = 0;
  for (const auto& b : bounds) bmax = std::max(bmax, b);
  if (bmax == 0) return {};

  // No relation fits when every Gram-Schmidt length exceeds the box diagonal.
  {
    BigInt diag2 = 0;
    for (const auto& b : bounds) diag2 += b * b;
    GramSchmidt g = gram_schmidt(relations);
    if (std::all_of(g.norms.begin(), g.norms.end(), [&](const Rational& v) { return v > diag2; })) return {};
  }

  for (BigInt h = 1;; h = std::min(BigInt(2 * h), bmax)) {
    std::vector<BigInt> box;
    BigInt r2 = 0;
    for (const auto& b : bounds) {
      box.push_back(std::min(b, h));
      r2 += box.back() * box.back();
    }
    std::vector<std::vector<BigInt>> found;
    BigInt best = -1;
    enumerate_ball(relations, BigInt(1), static_cast<long double>(r2.get_d()), node_cap,
                   [&](const std::vector<BigInt>& v) {
                     for (std::size_t i = 0; i < v.size(); ++i) {
                       if (abs(v[i]) > box[i]) return;
                     }
                     BigInt hv = sup_norm(v);
                     if (best >= 0 && hv > best) return;
                     if (best < 0 || hv < best) {
                       best = hv;
                       found.clear();
                     }
                     FormCandidate c{v, BigInt(0)};
                     normalize_sign(c);
                     found.push_back(std::move(c.q));
                   });
    if (!found.empty()) {
      std::sort(found.begin(), found.end());
      return found;
    }
    if (h == bmax) return {};
  }
}

}  // namespace mahler
