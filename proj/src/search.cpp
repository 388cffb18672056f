#include "mahler/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <set>
#include <thread>

namespace mahler {

std::string to_string(Method m) { return m == Method::brute ? "brute" : "lattice"; }

Method parse_method(std::string_view s) {
  if (s == "brute") return Method::brute;
  if (s == "lattice") return Method::lattice;
  throw ConfigError("unknown method '" + std::string(s) + "' (expected brute or lattice)");
}

unsigned worker_count(const SearchConfig& cfg) {
  if (cfg.threads > 0) return cfg.threads;
  if (const char* env = std::getenv("MAHLER_LAB_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// ------------------------------------------------------------ weights

std::size_t WeightVector::support() const {
  return static_cast<std::size_t>(std::count_if(r.begin(), r.end(), [](const Rational& v) { return v != 0; }));
}

bool WeightVector::normalized() const {
  Rational s = 0;
  for (const auto& v : r) s += v;
  return s == 1;
}

bool WeightVector::prefix_form() const {
  bool seen_zero = false;
  for (const auto& v : r) {
    if (v == 0) {
      seen_zero = true;
    } else if (seen_zero) {
      return false;
    }
  }
  return true;
}

void WeightVector::validate(std::size_t n) const {
  if (r.size() != n) {
    throw ConfigError("weight vector has " + std::to_string(r.size()) + " entries, expected " + std::to_string(n));
  }
  for (const auto& v : r) {
    if (v < 0) throw ConfigError("weights must be nonnegative");
  }
  if (support() == 0) throw ConfigError("weight vector must have a nonzero entry");
}

WeightVector WeightVector::uniform(std::size_t n) { return {std::vector<Rational>(n, make_rational(1, n))}; }

WeightVector WeightVector::prefix(std::size_t n, std::size_t n_k) {
  if (n_k == 0 || n_k > n) throw ConfigError("prefix length must lie in [1, n]");
  WeightVector w{std::vector<Rational>(n, Rational(0))};
  for (std::size_t i = 0; i < n_k; ++i) w.r[i] = make_rational(1, n_k);
  return w;
}

namespace {

WeightVector normalize(const WeightVector& w) {
  Rational s = 0;
  for (const auto& v : w.r) s += v;
  WeightVector out = w;
  for (auto& v : out.r) v /= s;
  return out;
}

BigInt floor_power(const BigInt& Q, const Rational& e) {
  BigInt base = pow(Q, BigInt(e.get_num()).get_ui());
  BigInt r;
  mpz_root(r.get_mpz_t(), base.get_mpz_t(), BigInt(e.get_den()).get_ui());
  return r;
}

bool is_uniform(const WeightVector& w) {
  return std::all_of(w.r.begin(), w.r.end(), [&](const Rational& v) { return v == w.r.front(); });
}

}  // namespace

std::vector<BigInt> weighted_bounds(const BigInt& Q, const WeightVector& w) {
  if (Q < 1) throw ConfigError("Q must be at least 1");
  const WeightVector u = normalize(w);
  const Rational s = static_cast<unsigned long>(u.support());
  std::vector<BigInt> out;
  for (const auto& v : u.r) out.push_back(v == 0 ? BigInt(0) : floor_power(Q, s * v));
  return out;
}

// ------------------------------------------------------------ screening

namespace {

using u128 = unsigned __int128;

u128 low128(const BigInt& v) {
  BigInt r;
  mpz_fdiv_r_2exp(r.get_mpz_t(), v.get_mpz_t(), 128);
  unsigned long long words[2] = {0, 0};
  std::size_t count = 0;
  mpz_export(words, &count, -1, sizeof(unsigned long long), 0, 0, r.get_mpz_t());
  return (static_cast<u128>(words[1]) << 64) | words[0];
}

u128 dist128(u128 s) {
  const u128 neg = u128(0) - s;
  return s < neg ? s : neg;
}

u128 screen(const std::vector<BigInt>& q, const std::vector<u128>& frac) {
  u128 s = 0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] != 0) s += low128(q[i]) * frac[i];
  }
  return dist128(s);
}

u128 saturating_add(u128 a, u128 b) {
  const u128 top = ~u128(0);
  return a > top - b ? top : a + b;
}

u128 to_u128_capped(const Rational& r) {
  // floor(r * 2^128), capped at 2^127
  BigInt num = r.get_num();
  mpz_mul_2exp(num.get_mpz_t(), num.get_mpz_t(), 128);
  BigInt f;
  mpz_fdiv_q(f.get_mpz_t(), num.get_mpz_t(), r.get_den_mpz_t());
  BigInt cap = 1;
  mpz_mul_2exp(cap.get_mpz_t(), cap.get_mpz_t(), 127);
  if (f >= cap) return low128(cap);
  return low128(f);
}

template <class Job>
void run_parallel(std::size_t jobs, unsigned workers, Job&& job) {
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(jobs, 1)));
  if (workers <= 1) {
    for (std::size_t j = 0; j < jobs; ++j) job(0u, j);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t j; (j = next.fetch_add(1)) < jobs;) job(w, j);
      } catch (...) {
        errors[w] = std::current_exception();
        next.store(jobs);
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

// Coefficient-space enumeration over the half box (first nonzero active
// coordinate positive). Each worker owns one visitor.
struct Chunk {
  std::size_t lead;  // index into active
  std::uint64_t start, length;
};

template <class Visitor>
void direct_scan(const std::vector<u128>& frac, const std::vector<BigInt>& bounds, std::vector<Visitor>& visitors) {
  std::vector<std::size_t> active;
  std::vector<long> B;
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (bounds[i] > 0) {
      active.push_back(i);
      B.push_back(bounds[i].get_si());
    }
  }
  const std::size_t m = active.size();
  const unsigned workers = static_cast<unsigned>(visitors.size());
  std::vector<Chunk> chunks;
  for (std::size_t l = 0; l < m; ++l) {
    std::uint64_t count = static_cast<std::uint64_t>(B[l]);
    for (std::size_t j = l + 1; j < m; ++j) count *= static_cast<std::uint64_t>(2 * B[j] + 1);
    const std::uint64_t piece = std::max<std::uint64_t>(1 << 14, count / (16ull * workers) + 1);
    for (std::uint64_t s = 0; s < count; s += piece) chunks.push_back({l, s, std::min(piece, count - s)});
  }
  run_parallel(chunks.size(), workers, [&](unsigned w, std::size_t ci) {
    const Chunk& c = chunks[ci];
    Visitor& vis = visitors[w];
    std::vector<long> q(bounds.size(), 0);
    std::uint64_t o = c.start;
    for (std::size_t j = m; j-- > c.lead + 1;) {
      const auto radix = static_cast<std::uint64_t>(2 * B[j] + 1);
      q[active[j]] = static_cast<long>(o % radix) - B[j];
      o /= radix;
    }
    q[active[c.lead]] = static_cast<long>(o) + 1;
    u128 s = 0;
    for (std::size_t j = c.lead; j < m; ++j) {
      const std::size_t i = active[j];
      s += static_cast<u128>(static_cast<__int128>(q[i])) * frac[i];
    }
    for (std::uint64_t step = 0;;) {
      vis.visit(q, s);
      if (++step == c.length) break;
      for (std::size_t j = m - 1;; --j) {
        const std::size_t i = active[j];
        if (j == c.lead || q[i] < B[j]) {
          ++q[i];
          s += frac[i];
          break;
        }
        q[i] = -B[j];
        s -= static_cast<u128>(2 * B[j]) * frac[i];
      }
    }
  });
}

struct MinPool {
  u128 best = ~u128(0);
  u128 margin = 0;
  std::size_t cap = 0;
  std::vector<std::pair<u128, std::vector<long>>> items;
  std::size_t prune_at = 64;

  void visit(const std::vector<long>& q, u128 s) {
    const u128 d = dist128(s);
    if (d > saturating_add(best, margin)) return;
    if (d < best) best = d;
    items.emplace_back(d, q);
    if (items.size() >= prune_at) {
      prune();
      prune_at = std::max<std::size_t>(64, 2 * items.size());
      if (items.size() > cap) throw ResourceCapError("near-tie pool exceeded " + std::to_string(cap) + " entries");
    }
  }
  void prune() {
    const u128 lim = saturating_add(best, margin);
    std::erase_if(items, [&](const auto& it) { return it.first > lim; });
  }
};

struct ThresholdPool {
  u128 threshold = 0;
  std::size_t cap = 0;
  std::vector<std::vector<long>> items;

  void visit(const std::vector<long>& q, u128 s) {
    if (dist128(s) > threshold) return;
    items.push_back(q);
    if (items.size() > cap) throw ResourceCapError("candidate set exceeded " + std::to_string(cap) + " entries");
  }
};

std::vector<BigInt> to_big(const std::vector<long>& q) { return std::vector<BigInt>(q.begin(), q.end()); }

BigInt box_count(const std::vector<BigInt>& bounds) {
  BigInt c = 1;
  for (const auto& b : bounds) c *= 2 * b + 1;
  return c;
}

u128 margin_for(const std::vector<BigInt>& bounds) {
  BigInt s = 8;
  for (const auto& b : bounds) s += 4 * b;
  return low128(s);
}

void check_bounds(const FormTarget& y, const std::vector<BigInt>& bounds) {
  if (bounds.size() != y.size()) throw ConfigError("bounds must have one entry per coordinate");
  bool any = false;
  for (const auto& b : bounds) {
    if (b < 0) throw ConfigError("bounds must be nonnegative");
    any = any || b > 0;
  }
  if (!any) throw ConfigError("at least one bound must be positive");
}

std::vector<std::vector<BigInt>> direct_min_pool(const FormTarget& y, const std::vector<BigInt>& bounds,
                                                 const SearchConfig& cfg) {
  std::vector<MinPool> vis(worker_count(cfg));
  for (auto& v : vis) {
    v.margin = margin_for(bounds);
    v.cap = cfg.pool_cap;
  }
  direct_scan(y.fractions(), bounds, vis);
  u128 best = ~u128(0);
  for (const auto& v : vis) best = std::min(best, v.best);
  const u128 lim = saturating_add(best, margin_for(bounds));
  std::vector<std::vector<BigInt>> out;
  for (const auto& v : vis) {
    for (const auto& [d, q] : v.items) {
      if (d <= lim) out.push_back(to_big(q));
    }
  }
  return out;
}

std::vector<std::vector<BigInt>> lattice_min_pool(const FormTarget& y, const std::vector<BigInt>& bounds,
                                                  const SearchConfig& cfg) {
  BigInt M = 1;
  for (const auto& b : bounds) {
    if (b > 0) M *= b;
  }
  Rational factor = M >= 2 ? Rational(1) : Rational(1, 2);
  for (int attempt = 0; attempt < 4; ++attempt, factor *= 2) {
    auto cs = box_enumerate(y, bounds, factor, cfg.node_cap);
    if (cs.empty()) continue;
    std::vector<u128> d;
    u128 best = ~u128(0);
    for (const auto& c : cs) {
      d.push_back(screen(c.q, y.fractions()));
      best = std::min(best, d.back());
    }
    const u128 lim = saturating_add(best, margin_for(bounds));
    std::vector<std::vector<BigInt>> out;
    for (std::size_t i = 0; i < cs.size(); ++i) {
      if (d[i] <= lim) out.push_back(cs[i].q);
    }
    return out;
  }
  throw DomainError("lattice enumeration found no point in the box");
}

// ------------------------------------------------------------ certified selection

struct Scored {
  std::vector<BigInt> q;
  CertifiedValue cv;
  BigInt height;
};

std::optional<int> separate(const DyadicInterval& a, const DyadicInterval& b) {
  if (a.hi() < b.lo()) return -1;
  if (b.hi() < a.lo()) return 1;
  return std::nullopt;
}

std::optional<int> compare_abs(const FormTarget& y, const Scored& a, const Scored& b, const PrecisionPolicy& pol) {
  if (a.cv.exact && b.cv.exact) {
    int c = cmp(*a.cv.exact, *b.cv.exact);
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  if (a.cv.exact_zero && b.cv.exact_zero) return 0;
  if (auto s = separate(a.cv.value, b.cv.value)) return s;
  std::vector<BigInt> diff(a.q.size()), sum(a.q.size());
  for (std::size_t i = 0; i < a.q.size(); ++i) {
    diff[i] = a.q[i] - b.q[i];
    sum[i] = a.q[i] + b.q[i];
  }
  auto e1 = y.exact_zero(BigInt(a.cv.a0 - b.cv.a0), diff);
  auto e2 = y.exact_zero(BigInt(a.cv.a0 + b.cv.a0), sum);
  if ((e1 && *e1) || (e2 && *e2)) return 0;
  for (long p = 2 * pol.p_start;; p = std::min(2 * p, pol.p_max)) {
    auto va = (y.dot(a.q, p) + DyadicInterval::from_int(a.cv.a0)).abs();
    auto vb = (y.dot(b.q, p) + DyadicInterval::from_int(b.cv.a0)).abs();
    if (auto s = separate(va, vb)) return s;
    if (p >= pol.p_max) return std::nullopt;
  }
}

bool height_lex_less(const std::vector<BigInt>& a, const std::vector<BigInt>& b) {
  BigInt ha = sup_norm(a), hb = sup_norm(b);
  if (ha != hb) return ha < hb;
  return a < b;
}

void sort_unique(std::vector<std::vector<BigInt>>& pool) {
  std::sort(pool.begin(), pool.end(), height_lex_less);
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
}

std::vector<Scored> certify_all(const FormTarget& y, const std::vector<std::vector<BigInt>>& pool,
                                const PrecisionPolicy& pol) {
  std::vector<Scored> out;
  out.reserve(pool.size());
  for (const auto& q : pool) out.push_back({q, y.certify(q, pol), sup_norm(q)});
  return out;
}

BestForm select_best(const FormTarget& y, std::vector<std::vector<BigInt>> pool, const PrecisionPolicy& pol) {
  if (pool.empty()) throw DomainError("empty candidate pool");
  sort_unique(pool);
  auto scored = certify_all(y, pool, pol);
  std::size_t best = 0;
  for (std::size_t i = 1; i < scored.size(); ++i) {
    auto c = compare_abs(y, scored[i], scored[best], pol);
    if (c ? *c < 0 : scored[i].cv.value.lo() < scored[best].cv.value.lo()) best = i;
  }
  BestForm out{scored[best].q, scored[best].cv, {}};
  for (std::size_t i = 0; i < scored.size(); ++i) {
    if (i != best && !compare_abs(y, scored[i], scored[best], pol)) out.ties.push_back(scored[i].q);
  }
  return out;
}

struct Context {
  Context(const FormTarget& t, const SearchConfig& c) : y(t), cfg(c) {}

  const FormTarget& y;
  const SearchConfig& cfg;
  bool relations_done = false;
  std::optional<LatticeBasis> relations;

  const std::optional<LatticeBasis>& rel() {
    if (!relations_done) {
      relations = relation_lattice(y);
      relations_done = true;
    }
    return relations;
  }
};

BestForm box_minimum_in(Context& ctx, const std::vector<BigInt>& bounds, bool force_direct) {
  check_bounds(ctx.y, bounds);
  const BigInt count = box_count(bounds);
  if (force_direct && count > BigInt(static_cast<unsigned long>(ctx.cfg.brute_cap))) {
    throw ResourceCapError("exhaustive search needs " + to_string(count) + " evaluations, above the cap " +
                           std::to_string(ctx.cfg.brute_cap) + "; use the lattice method");
  }
  if (const auto& rel = ctx.rel(); rel && rel->size() > 0) {
    auto zeros = smallest_box_relations(*rel, bounds, ctx.cfg.node_cap);
    if (!zeros.empty()) return select_best(ctx.y, {zeros.front()}, ctx.cfg.precision);
  }
  std::vector<std::vector<BigInt>> pool;
  if (force_direct || count / 2 <= BigInt(static_cast<unsigned long>(ctx.cfg.direct_limit))) {
    pool = direct_min_pool(ctx.y, bounds, ctx.cfg);
  } else {
    pool = lattice_min_pool(ctx.y, bounds, ctx.cfg);
  }
  return select_best(ctx.y, std::move(pool), ctx.cfg.precision);
}

std::vector<BigInt> uniform_bounds(std::size_t n, const BigInt& h) { return std::vector<BigInt>(n, h); }

}  // namespace

BestForm brute_force_best(const FormTarget& y, const BigInt& Q, const SearchConfig& cfg) {
  if (Q < 1) throw ConfigError("Q must be at least 1");
  Context ctx{y, cfg};
  return box_minimum_in(ctx, uniform_bounds(y.size(), Q), true);
}

BestForm box_minimum(const FormTarget& y, const std::vector<BigInt>& bounds, const SearchConfig& cfg) {
  Context ctx{y, cfg};
  return box_minimum_in(ctx, bounds, false);
}

// ------------------------------------------------------------ records

ApproximationRecord make_record(const FormTarget& y, const std::vector<BigInt>& q, const CertifiedValue& v) {
  IntPolynomial P(y.basis_ptr(), v.a0, q);
  ApproximationRecord r{P, heights(P), v.value, v.exact_zero, v.undecided, std::nullopt};
  if (r.heights.H >= 2 && !v.exact_zero && v.value.lo().sign() > 0) {
    r.ratio = exponent_lower_bound(v.value.hi(), r.heights.H);
  }
  return r;
}

namespace {

void finish_table(const FormTarget& y, RecordTable& t) {
  const unsigned long n = y.size();
  for (const auto& e : t.entries) {
    t.exact_zero = t.exact_zero || e.exact_zero;
    t.undecided = t.undecided || e.undecided;
    const DyadicInterval c = e.exact_zero ? DyadicInterval::from_int(BigInt(0))
                                          : e.value * DyadicInterval::from_int(pow(e.heights.Htilde, n));
    t.c_min = t.c_min ? min(*t.c_min, c) : c;
  }
}

RecordTable brute_table(Context& ctx, const BigInt& Q_max) {
  RecordTable t;
  t.d = ctx.y.basis().dim();
  t.k = ctx.y.basis().degree();
  t.method = Method::brute;
  t.Q_max = Q_max;
  std::vector<ApproximationRecord> rev;
  for (BigInt h = Q_max; h >= 1;) {
    BestForm b = box_minimum_in(ctx, uniform_bounds(ctx.y.size(), h), false);
    auto rec = make_record(ctx.y, b.q, b.value);
    rec.undecided = rec.undecided || !b.ties.empty();
    h = rec.heights.Htilde - 1;
    rev.push_back(std::move(rec));
  }
  t.entries.assign(rev.rbegin(), rev.rend());
  finish_table(ctx.y, t);
  return t;
}

RecordTable lattice_table(Context& ctx, const BigInt& Q_max, const std::vector<BigInt>& extra_scales) {
  RecordTable t;
  t.d = ctx.y.basis().dim();
  t.k = ctx.y.basis().degree();
  t.method = Method::lattice;
  t.Q_max = Q_max;
  std::set<BigInt> scales(extra_scales.begin(), extra_scales.end());
  for (BigInt s = 1; s < Q_max; s *= 2) scales.insert(s);
  scales.insert(Q_max);
  std::vector<std::vector<BigInt>> pool;
  for (const auto& s : scales) {
    if (s < 1 || s > Q_max) continue;
    for (auto& c : small_form_candidates(ctx.y, s)) pool.push_back(std::move(c.q));
  }
  if (const auto& rel = ctx.rel(); rel && rel->size() > 0) {
    auto zeros = smallest_box_relations(*rel, uniform_bounds(ctx.y.size(), Q_max), ctx.cfg.node_cap);
    if (!zeros.empty()) pool.push_back(zeros.front());
  }
  sort_unique(pool);
  auto scored = certify_all(ctx.y, pool, ctx.cfg.precision);
  std::optional<std::size_t> running;
  for (std::size_t i = 0; i < scored.size();) {
    std::size_t j = i, best = i;
    bool undecided = false;
    for (; j < scored.size() && scored[j].height == scored[i].height; ++j) {
      if (j == i) continue;
      auto c = compare_abs(ctx.y, scored[j], scored[best], ctx.cfg.precision);
      if (!c) undecided = true;
      if (c ? *c < 0 : scored[j].cv.value.lo() < scored[best].cv.value.lo()) best = j;
    }
    std::optional<int> c = running ? compare_abs(ctx.y, scored[best], scored[*running], ctx.cfg.precision)
                                   : std::optional<int>(-1);
    if (!c || *c < 0) {
      auto rec = make_record(ctx.y, scored[best].q, scored[best].cv);
      rec.undecided = rec.undecided || undecided || !c;
      t.entries.push_back(std::move(rec));
      running = best;
    }
    i = j;
  }
  finish_table(ctx.y, t);
  return t;
}

}  // namespace

RecordTable record_scan(const FormTarget& y, const BigInt& Q_max, Method method, const SearchConfig& cfg) {
  if (Q_max < 1) throw ConfigError("Q_max must be at least 1");
  Context ctx{y, cfg};
  return method == Method::brute ? brute_table(ctx, Q_max) : lattice_table(ctx, Q_max, {});
}

// ------------------------------------------------------------ Dirichlet profiles

namespace {

constexpr long kTermBits = 128;

Rational exact_form(const FormTarget& y, const BigInt& a0, const std::vector<BigInt>& q) {
  Rational v = a0;
  const auto& ys = y.exact_values();
  for (std::size_t i = 0; i < q.size(); ++i) v += q[i] * ys[i];
  return v;
}

struct Term {
  DyadicInterval value;
  std::optional<Rational> exact;
};

Term unweighted_term(const ApproximationRecord& e, const BigInt& Q, unsigned long n) {
  const Rational h(e.heights.Htilde, Q);
  const BigInt qn = pow(Q, n);
  Term t;
  t.value = max(DyadicInterval::from_rational(h, kTermBits), e.value * DyadicInterval::from_int(qn));
  return t;
}

EpsilonSample best_term(const BigInt& Q, const std::vector<Term>& terms, const std::vector<IntPolynomial>& polys) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < terms.size(); ++i) {
    if (terms[i].exact && terms[best].exact) {
      if (*terms[i].exact < *terms[best].exact) best = i;
    } else if (terms[i].value.hi() < terms[best].value.hi()) {
      best = i;
    }
  }
  Dyadic lo = terms[best].value.lo();
  for (const auto& t : terms) lo = std::min(lo, t.value.lo());
  EpsilonSample s{Q, DyadicInterval(lo, terms[best].value.hi()), polys[best], std::nullopt};
  if (std::all_of(terms.begin(), terms.end(), [](const Term& t) { return t.exact.has_value(); })) {
    s.exact = terms[best].exact;
    s.eps = DyadicInterval::from_rational(*s.exact, kTermBits);
  }
  return s;
}

EpsilonSample from_records(const FormTarget& y, const RecordTable& table, const BigInt& Q) {
  const unsigned long n = y.size();
  std::vector<Term> terms;
  std::vector<IntPolynomial> polys;
  for (const auto& e : table.entries) {
    if (e.heights.Htilde > Q) continue;
    Term t = unweighted_term(e, Q, n);
    if (y.is_exact()) {
      Rational v = abs(exact_form(y, e.P.a0(), e.P.q()));
      t.exact = std::max(make_rational(e.heights.Htilde, Q), Rational(v * pow(Q, n)));
    }
    terms.push_back(std::move(t));
    polys.push_back(e.P);
  }
  if (terms.empty()) throw DomainError("no record at or below Q = " + to_string(Q));
  return best_term(Q, terms, polys);
}

}  // namespace

EpsilonSample epsilon_from_records(const FormTarget& y, const RecordTable& table, const BigInt& Q) {
  if (Q < 1 || Q > table.Q_max) throw ConfigError("Q must lie in [1, Q_max] of the record table");
  return from_records(y, table, Q);
}

namespace {

struct WeightedFrame {
  WeightVector w;
  unsigned long s = 0;
  std::vector<BigInt> bounds;
  std::vector<DyadicInterval> inv_scale;  // Q^(-s r_i)
  std::vector<DyadicInterval> scale;      // Q^(s r_i)
  BigInt Qs;
  bool integral = true;  // every Q^(s r_i) is an integer
};

WeightedFrame make_frame(const BigInt& Q, const WeightVector& w) {
  WeightedFrame f;
  f.w = normalize(w);
  f.s = f.w.support();
  f.bounds = weighted_bounds(Q, f.w);
  f.Qs = pow(Q, f.s);
  const auto inv = DyadicInterval::from_rational(make_rational(1, Q), 2 * kTermBits);
  for (std::size_t i = 0; i < f.w.r.size(); ++i) {
    const Rational e = f.w.r[i] * f.s;
    f.inv_scale.push_back(pow_rational(inv, e, 2 * kTermBits));
    f.scale.push_back(pow_rational(DyadicInterval::from_int(Q), e, kTermBits));
    if (e != 0 && pow(f.bounds[i], BigInt(e.get_den()).get_ui()) != pow(Q, BigInt(e.get_num()).get_ui())) {
      f.integral = false;
    }
  }
  return f;
}

Term weighted_term(const FormTarget& y, const WeightedFrame& f, const std::vector<BigInt>& q,
                   const CertifiedValue& cv) {
  DyadicInterval h = DyadicInterval::from_int(BigInt(0));
  std::optional<Rational> hx = Rational(0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] == 0) continue;
    h = max(h, DyadicInterval::from_int(abs(q[i])) * f.inv_scale[i]);
    if (f.integral) hx = std::max(*hx, make_rational(abs(q[i]), f.bounds[i]));
  }
  Term t;
  t.value = max(h, cv.value * DyadicInterval::from_int(f.Qs));
  if (f.integral && y.is_exact() && cv.exact) t.exact = std::max(*hx, Rational(*cv.exact * f.Qs));
  return t;
}

bool is_plain(const std::optional<WeightVector>& w, std::size_t n) {
  if (!w) return true;
  w->validate(n);
  return w->support() == n && is_uniform(*w);
}

EpsilonSample weighted_epsilon(const FormTarget& y, const BigInt& Q, const WeightVector& w, Method method,
                               const SearchConfig& cfg) {
  const WeightedFrame f = make_frame(Q, w);
  std::vector<std::vector<BigInt>> pool;
  if (method == Method::lattice) {
    for (auto& c : small_form_candidates(y, Q, f.bounds)) pool.push_back(std::move(c.q));
  } else {
    BestForm b0 = box_minimum(y, f.bounds, cfg);
    const Rational eps0 = weighted_term(y, f, b0.q, b0.value).value.hi().to_rational();
    std::vector<BigInt> inner(f.bounds.size(), BigInt(0));
    bool any = false;
    for (std::size_t i = 0; i < inner.size(); ++i) {
      if (f.w.r[i] == 0) continue;
      inner[i] = floor(eps0 * f.scale[i].hi().to_rational());
      any = any || inner[i] > 0;
    }
    if (any) pool = threshold_candidates(y, inner, eps0 / f.Qs, cfg);
    pool.push_back(b0.q);
  }
  sort_unique(pool);
  std::vector<Term> terms;
  std::vector<IntPolynomial> polys;
  for (const auto& q : pool) {
    auto cv = y.certify(q, cfg.precision);
    terms.push_back(weighted_term(y, f, q, cv));
    polys.emplace_back(y.basis_ptr(), cv.a0, q);
  }
  return best_term(Q, terms, polys);
}

void check_schedule(const std::vector<BigInt>& schedule) {
  if (schedule.empty()) throw ConfigError("Q schedule is empty");
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    if (schedule[i] < 1) throw ConfigError("Q values must be at least 1");
    if (i > 0 && schedule[i] <= schedule[i - 1]) throw ConfigError("Q schedule must be strictly increasing");
  }
}

}  // namespace

EpsilonSample epsilon_star(const FormTarget& y, const BigInt& Q, const std::optional<WeightVector>& w,
                           Method method, const SearchConfig& cfg) {
  if (Q < 1) throw ConfigError("Q must be at least 1");
  if (!is_plain(w, y.size())) return weighted_epsilon(y, Q, *w, method, cfg);
  Context ctx{y, cfg};
  RecordTable t = method == Method::brute ? brute_table(ctx, Q) : lattice_table(ctx, Q, {});
  return from_records(y, t, Q);
}

DirichletProfile dirichlet_profile(const FormTarget& y, const std::vector<BigInt>& schedule,
                                   const std::optional<WeightVector>& w, Method method, const SearchConfig& cfg) {
  check_schedule(schedule);
  DirichletProfile prof;
  prof.weights = w;
  prof.method = method;
  if (is_plain(w, y.size())) {
    Context ctx{y, cfg};
    RecordTable t = method == Method::brute ? brute_table(ctx, schedule.back())
                                            : lattice_table(ctx, schedule.back(), schedule);
    for (const auto& Q : schedule) prof.samples.push_back(from_records(y, t, Q));
  } else {
    for (const auto& Q : schedule) prof.samples.push_back(weighted_epsilon(y, Q, *w, method, cfg));
  }
  const std::size_t N = prof.samples.size();
  const std::size_t third = std::max<std::size_t>(1, N / 3);
  Dyadic first_lo = prof.samples.front().eps.lo();
  for (std::size_t i = 0; i < third; ++i) first_lo = std::max(first_lo, prof.samples[i].eps.lo());
  Dyadic tail_lo = prof.samples.back().eps.lo(), tail_hi = prof.samples.back().eps.hi();
  for (std::size_t i = N - third; i < N; ++i) {
    tail_lo = std::max(tail_lo, prof.samples[i].eps.lo());
    tail_hi = std::max(tail_hi, prof.samples[i].eps.hi());
  }
  prof.tail_sup = DyadicInterval(tail_lo, tail_hi);
  prof.singular_trend = tail_hi.scaled(1) < first_lo;
  return prof;
}

std::vector<std::vector<BigInt>> threshold_candidates(const FormTarget& y, const std::vector<BigInt>& bounds,
                                                      const Rational& threshold, const SearchConfig& cfg) {
  check_bounds(y, bounds);
  if (threshold < 0) throw ConfigError("threshold must be nonnegative");
  std::vector<std::vector<BigInt>> out;
  const BigInt count = box_count(bounds);
  if (count / 2 <= BigInt(static_cast<unsigned long>(cfg.direct_limit))) {
    std::vector<ThresholdPool> vis(worker_count(cfg));
    for (auto& v : vis) {
      v.threshold = saturating_add(to_u128_capped(threshold), margin_for(bounds));
      v.cap = cfg.pool_cap;
    }
    direct_scan(y.fractions(), bounds, vis);
    for (const auto& v : vis) {
      for (const auto& q : v.items) out.push_back(to_big(q));
    }
  } else {
    BigInt M = 1;
    for (const auto& b : bounds) {
      if (b > 0) M *= b;
    }
    for (auto& c : box_enumerate(y, bounds, threshold * M, cfg.node_cap)) out.push_back(std::move(c.q));
  }
  sort_unique(out);
  return out;
}

CandidateSet dirichlet_candidates(const FormTarget& y, const BigInt& Q, const std::optional<WeightVector>& w,
                                  const Rational& factor, const SearchConfig& cfg) {
  if (factor < 0) throw ConfigError("factor must be nonnegative");
  const WeightVector wv = w ? *w : WeightVector::uniform(y.size());
  wv.validate(y.size());
  const WeightedFrame f = make_frame(Q, wv);
  const Rational thr = factor / f.Qs;
  CandidateSet out;
  const auto& pol = cfg.precision;
  for (auto& q : threshold_candidates(y, f.bounds, thr, cfg)) {
    const auto cv = y.certify(q, pol);
    Verdict v = Verdict::undecided;
    if (cv.exact) {
      v = *cv.exact <= thr ? Verdict::yes : Verdict::no;
    } else if (cv.exact_zero) {
      v = Verdict::yes;
    } else {
      DyadicInterval val = cv.value;
      for (long p = 2 * pol.p_start;; p = std::min(2 * p, pol.p_max)) {
        if (compare(val.hi(), thr) <= 0) {
          v = Verdict::yes;
          break;
        }
        if (compare(val.lo(), thr) > 0) {
          v = Verdict::no;
          break;
        }
        if (p >= pol.p_max) break;
        val = (y.dot(q, p) + DyadicInterval::from_int(cv.a0)).abs();
      }
    }
    if (v == Verdict::yes) out.accepted.push_back(std::move(q));
    if (v == Verdict::undecided) out.undecided.push_back(std::move(q));
  }
  return out;
}

// ------------------------------------------------------------ scalar scans over q

DyadicInterval int_dist_at(const RealOracle& y, const BigInt& q, long p) {
  if (y.exact()) {
    const Rational t = q * *y.exact();
    const Rational f = t - floor(t);
    return DyadicInterval::from_rational(std::min(f, Rational(1 - f)), p);
  }
  const auto e = refine(y, p + static_cast<long>(bit_length(q)) + 2);
  return int_dist(e * DyadicInterval::from_int(q)).round_out(p);
}

namespace {

constexpr double kLn2p128 = 128 * 0.69314718055994530942;

template <class Visitor>
void scalar_scan(const std::vector<u128>& frac, std::uint64_t q_max, std::vector<Visitor>& visitors) {
  const unsigned workers = static_cast<unsigned>(visitors.size());
  const std::uint64_t piece = std::max<std::uint64_t>(1 << 14, q_max / (16ull * workers) + 1);
  const std::size_t jobs = static_cast<std::size_t>((q_max + piece - 1) / piece);
  run_parallel(jobs, workers, [&](unsigned w, std::size_t j) {
    const std::uint64_t lo = 1 + j * piece, hi = std::min(q_max, lo + piece - 1);
    std::vector<u128> s(frac.size());
    for (std::size_t i = 0; i < frac.size(); ++i) s[i] = static_cast<u128>(lo) * frac[i];
    for (std::uint64_t q = lo;; ++q) {
      visitors[w].visit(q, s);
      if (q == hi) break;
      for (std::size_t i = 0; i < frac.size(); ++i) s[i] += frac[i];
    }
  });
}

std::uint64_t to_u64(const BigInt& v, const char* what) {
  if (v < 1 || !v.fits_ulong_p()) throw ConfigError(std::string(what) + " must lie in [1, 2^64)");
  return v.get_ui();
}

struct BadPool {
  std::vector<std::size_t> active;
  std::vector<double> inv_r;
  double best_hi = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, std::uint64_t>> items;  // (lower log estimate, q)
  std::size_t prune_at = 64;
  std::size_t cap = 0;

  void visit(std::uint64_t q, const std::vector<u128>& s) {
    const double err = 2.0 * static_cast<double>(q) + 4.0;
    double lo = -std::numeric_limits<double>::infinity(), hi = lo;
    const double lq = std::log(static_cast<double>(q));
    for (std::size_t k = 0; k < active.size(); ++k) {
      const double d = static_cast<double>(dist128(s[active[k]]));
      const double l = d > err ? (std::log(d - err) - kLn2p128) * inv_r[k] : -std::numeric_limits<double>::infinity();
      const double h = (std::log(d + err) - kLn2p128) * inv_r[k];
      lo = std::max(lo, l);
      hi = std::max(hi, h);
    }
    lo += lq;
    hi += lq;
    if (lo > best_hi) return;
    best_hi = std::min(best_hi, hi);
    items.emplace_back(lo, q);
    if (items.size() >= prune_at) {
      std::erase_if(items, [&](const auto& it) { return it.first > best_hi; });
      prune_at = std::max<std::size_t>(64, 2 * items.size());
      if (items.size() > cap) throw ResourceCapError("near-tie pool exceeded " + std::to_string(cap) + " entries");
    }
  }
};

template <class Eval>
ScalarBest pick_scalar(std::vector<std::uint64_t> qs, Eval&& eval) {
  std::sort(qs.begin(), qs.end());
  qs.erase(std::unique(qs.begin(), qs.end()), qs.end());
  std::vector<DyadicInterval> vals;
  for (auto q : qs) vals.push_back(eval(BigInt(static_cast<unsigned long>(q))));
  std::size_t best = 0;
  for (std::size_t i = 1; i < qs.size(); ++i) {
    if (vals[i].hi() < vals[best].hi()) best = i;
  }
  ScalarBest out{BigInt(static_cast<unsigned long>(qs[best])), vals[best], {}};
  Dyadic lo = vals[best].lo();
  for (std::size_t i = 0; i < qs.size(); ++i) {
    if (i == best || vals[best].hi() < vals[i].lo()) continue;
    if (vals[i].is_point() && vals[best].is_point()) continue;
    out.ties.emplace_back(static_cast<unsigned long>(qs[i]));
    lo = std::min(lo, vals[i].lo());
  }
  out.value = DyadicInterval(lo, vals[best].hi());
  return out;
}

bool tight(const DyadicInterval& v) { return v.is_point() || v.width().scaled(40) <= v.hi(); }

}  // namespace

ScalarBest weighted_bad_statistic(const std::vector<RealOracle>& y, const WeightVector& r, const BigInt& Q_max,
                                  const SearchConfig& cfg) {
  r.validate(y.size());
  if (!r.normalized()) throw ConfigError("weights must sum to 1");
  const std::uint64_t qm = to_u64(Q_max, "Q_max");
  const FormTarget target = FormTarget::from_reals(y);
  const auto& frac = target.fractions();
  std::vector<BadPool> vis(worker_count(cfg));
  for (auto& v : vis) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (r.r[i] == 0) continue;
      v.active.push_back(i);
      v.inv_r.push_back(1.0 / r.r[i].get_d());
    }
    v.cap = cfg.pool_cap;
  }
  scalar_scan(frac, qm, vis);
  double best_hi = std::numeric_limits<double>::infinity();
  for (const auto& v : vis) best_hi = std::min(best_hi, v.best_hi);
  std::vector<std::uint64_t> qs;
  for (const auto& v : vis) {
    for (const auto& [lo, q] : v.items) {
      if (lo <= best_hi) qs.push_back(q);
    }
  }
  const long p_max = cfg.precision.p_max;
  return pick_scalar(std::move(qs), [&](const BigInt& q) {
    DyadicInterval v;
    for (long p = 128;; p = std::min(2 * p, p_max)) {
      v = DyadicInterval::from_int(BigInt(0));
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (r.r[i] == 0) continue;
        v = max(v, pow_rational(int_dist_at(y[i], q, p), 1 / r.r[i], p));
      }
      v = v * DyadicInterval::from_int(q);
      if (tight(v) || p >= p_max) return v;
    }
  });
}

namespace {

struct SimulPool {
  u128 best = ~u128(0);
  u128 margin = 0;
  double best_ratio_lo = -1;
  std::vector<std::pair<u128, std::uint64_t>> items;
  std::vector<std::pair<double, std::uint64_t>> ratio_items;  // (upper ratio estimate, q)
  std::vector<std::pair<std::uint64_t, u128>> records;
  std::optional<std::uint64_t> first_hit;
  std::size_t prune_at = 64, ratio_prune_at = 64;
  std::size_t cap = 0;

  void visit(std::uint64_t q, const std::vector<u128>& s) {
    u128 m = 0;
    for (auto v : s) m = std::max(m, dist128(v));
    if (records.empty() || m < records.back().second) records.emplace_back(q, m);
    const double err = 2.0 * static_cast<double>(q) + 4.0;
    const double md = static_cast<double>(m);
    if (md <= err) {
      if (!first_hit) first_hit = q;
    } else if (q >= 2) {
      const double lq = std::log(static_cast<double>(q));
      const double hi = (kLn2p128 - std::log(md - err)) / lq;
      const double lo = (kLn2p128 - std::log(md + err)) / lq;
      if (hi >= best_ratio_lo) {
        best_ratio_lo = std::max(best_ratio_lo, lo);
        ratio_items.emplace_back(hi, q);
        if (ratio_items.size() >= ratio_prune_at) {
          std::erase_if(ratio_items, [&](const auto& it) { return it.first < best_ratio_lo; });
          ratio_prune_at = std::max<std::size_t>(64, 2 * ratio_items.size());
          if (ratio_items.size() > cap) throw ResourceCapError("exponent pool exceeded " + std::to_string(cap));
        }
      }
    }
    if (m > saturating_add(best, margin)) return;
    best = std::min(best, m);
    items.emplace_back(m, q);
    if (items.size() >= prune_at) {
      const u128 lim = saturating_add(best, margin);
      std::erase_if(items, [&](const auto& it) { return it.first > lim; });
      prune_at = std::max<std::size_t>(64, 2 * items.size());
      if (items.size() > cap) throw ResourceCapError("near-tie pool exceeded " + std::to_string(cap));
    }
  }
};

}  // namespace

SimultaneousScan simultaneous_scan(const std::vector<RealOracle>& y, const BigInt& q_max, const SearchConfig& cfg) {
  if (y.empty()) throw ConfigError("simultaneous scan needs at least one coordinate");
  const std::uint64_t qm = to_u64(q_max, "q_max");
  const FormTarget target = FormTarget::from_reals(y);
  const auto& frac = target.fractions();
  const u128 margin = 4 * static_cast<u128>(qm) + 8;
  std::vector<SimulPool> vis(worker_count(cfg));
  for (auto& v : vis) {
    v.margin = margin;
    v.cap = cfg.pool_cap;
  }
  scalar_scan(frac, qm, vis);

  auto value_at = [&](const BigInt& q, long p) {
    DyadicInterval v = DyadicInterval::from_int(BigInt(0));
    for (const auto& yi : y) v = max(v, int_dist_at(yi, q, p));
    return v;
  };
  const long p_max = cfg.precision.p_max;
  auto certified = [&](const BigInt& q) {
    for (long p = 128;; p = std::min(2 * p, p_max)) {
      auto v = value_at(q, p);
      if (tight(v) || p >= p_max) return v;
    }
  };

  SimultaneousScan out;
  u128 best = ~u128(0);
  double ratio_lo = -1;
  for (const auto& v : vis) {
    best = std::min(best, v.best);
    ratio_lo = std::max(ratio_lo, v.best_ratio_lo);
  }
  std::vector<std::uint64_t> qs;
  for (const auto& v : vis) {
    for (const auto& [m, q] : v.items) {
      if (m <= saturating_add(best, margin)) qs.push_back(q);
    }
    if (v.first_hit) qs.push_back(*v.first_hit);
  }
  out.best = pick_scalar(std::move(qs), certified);
  out.exact_hit = out.best.value.is_point() && out.best.value.hi().sign() == 0;

  std::vector<std::uint64_t> rq;
  for (const auto& v : vis) {
    for (const auto& [hi, q] : v.ratio_items) {
      if (hi >= ratio_lo) rq.push_back(q);
    }
  }
  std::sort(rq.begin(), rq.end());
  rq.erase(std::unique(rq.begin(), rq.end()), rq.end());
  for (auto q64 : rq) {
    const BigInt q(static_cast<unsigned long>(q64));
    const auto v = certified(q);
    if (v.lo().sign() <= 0) continue;
    const Rational e = exponent_lower_bound(v.hi(), q);
    if (e > out.exponent) {
      out.exponent = e;
      out.exponent_q = q;
    }
  }

  std::vector<std::pair<std::uint64_t, u128>> recs;
  for (const auto& v : vis) recs.insert(recs.end(), v.records.begin(), v.records.end());
  std::sort(recs.begin(), recs.end());
  u128 running = ~u128(0);
  for (const auto& [q, m] : recs) {
    if (m < running) {
      running = m;
      ++out.records;
    }
  }
  return out;
}

}  // namespace mahler
