#include "mahler/acceptance.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "mahler/classify.hpp"
#include "mahler/gallery.hpp"

namespace mahler {

namespace {

using Clock = std::chrono::steady_clock;

void parallel_for(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!failure) failure = std::current_exception();
        next = count;
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < std::max(1u, workers); ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

SearchConfig single_thread() {
  SearchConfig c;
  c.threads = 1;
  return c;
}

std::string num(double v, int prec = 6) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

std::string num(const Rational& v) { return num(v.get_d()); }

RealOracle golden() { return make_algebraic({BigInt(-1), BigInt(-1), BigInt(1)}, Rational(1), Rational(2)); }
RealOracle sqrt2() { return make_algebraic({BigInt(-2), BigInt(0), BigInt(1)}, Rational(1), Rational(2)); }

std::vector<RealOracle> lebesgue(const AcceptanceOptions& opt, std::size_t i, unsigned d) {
  return realize(sample_point(SampleKind::lebesgue, derive_seed(opt.seed, i), d, 64));
}

struct Shape {
  unsigned d, k;
};

const std::vector<Shape> kShapes{{1, 1}, {1, 2}, {1, 3}, {2, 1}, {2, 2}};

std::vector<BigInt> range_schedule(long a, long b) {
  std::vector<BigInt> s;
  for (long Q = a; Q <= b; ++Q) s.emplace_back(Q);
  return s;
}

std::vector<BigInt> geometric_schedule(long a, long b, long ratio) {
  std::vector<BigInt> s;
  for (BigInt Q = a; Q <= b; Q *= ratio) s.push_back(Q);
  return s;
}

long double dist_ld(long double t) { return std::fabs(t - std::nearbyint(t)); }

// ------------------------------------------------------------------ checks

CriterionResult dirichlet_bound(const AcceptanceOptions& opt, unsigned workers) {
  CriterionResult r{1, "Dirichlet bound eps*(Q) <= 1", false, "", 0};
  std::atomic<long> violations{0}, checked{0};
  const auto schedule = range_schedule(2, 40);
  for (const auto& s : kShapes) {
    parallel_for(100, workers, [&](std::size_t i) {
      auto y = FormTarget::from_point(lebesgue(opt, i, s.d), basis(s.d, s.k));
      auto prof = dirichlet_profile(y, schedule, std::nullopt, Method::brute, single_thread());
      for (const auto& e : prof.samples) {
        ++checked;
        const bool ok = e.exact ? *e.exact <= 1 : compare(e.eps.hi(), Rational(1)) <= 0;
        if (!ok) ++violations;
      }
    });
  }
  r.pass = violations == 0;
  r.detail = std::to_string(checked.load()) + " values, " + std::to_string(violations.load()) + " violations";
  return r;
}

CriterionResult exponent_floor(const AcceptanceOptions& opt, unsigned workers) {
  CriterionResult r{2, "exponent floor omega_k >= n", false, "", 0};
  std::atomic<long> failures{0}, skipped{0}, checked{0};
  std::mutex m;
  Rational worst_brute = 1000, worst_lattice = 1000;
  auto run = [&](const Shape& s, const BigInt& Q, Method method, const Rational& slack, Rational& worst) {
    const Rational n = static_cast<unsigned long>(binomial(s.k + s.d, s.d).get_ui() - 1);
    parallel_for(100, workers, [&](std::size_t i) {
      auto e = estimate_omega_k(lebesgue(opt, i, s.d), s.k, Q, method, single_thread());
      if (e.infinite()) {
        ++skipped;
        return;
      }
      ++checked;
      const Rational margin = *e.value - n;
      if (margin < -slack) ++failures;
      std::lock_guard lock(m);
      worst = std::min(worst, margin);
    });
  };
  for (const auto& s : kShapes) run(s, BigInt(1000), Method::brute, Rational(1, 2), worst_brute);
  for (unsigned k = 1; k <= 3; ++k) run({1, k}, BigInt(100000), Method::lattice, Rational(1, 4), worst_lattice);
  r.pass = failures == 0;
  r.detail = std::to_string(checked.load()) + " estimates, " + std::to_string(failures.load()) + " below floor, " +
             std::to_string(skipped.load()) + " exact zeros; min omega-n brute " + num(worst_brute) +
             ", lattice " + num(worst_lattice);
  return r;
}

// min over 1 <= q <= Q of q ||q a||, in long double
long double badness_oracle(long double a, long Q) {
  long double best = 1e30L;
  for (long q = 1; q <= Q; ++q) best = std::min(best, q * dist_ld(q * a));
  return best;
}

CriterionResult badness_constant(const AcceptanceOptions&, unsigned) {
  CriterionResult r{3, "badness constants of golden ratio and sqrt 2", false, "", 0};
  const long double s5 = std::sqrt(5.0L), s2 = std::sqrt(2.0L);
  struct Case {
    RealOracle x;
    long double closed, value;
  };
  std::vector<Case> cases{{golden(), (3 - s5) / 2, (1 + s5) / 2}, {sqrt2(), 2 * (3 - 2 * s2), s2}};
  bool ok = true;
  std::string detail;
  for (auto& c : cases) {
    auto t = record_scan(FormTarget::from_point({c.x}, basis(1, 1)), BigInt(10000), Method::brute);
    const long double oracle = badness_oracle(c.value, 10000);
    if (!t.c_min) {
      ok = false;
      detail += "no c_min; ";
      continue;
    }
    const long double lo = t.c_min->lo().to_long_double(), hi = t.c_min->hi().to_long_double();
    ok = ok && std::fabs(lo - c.closed) <= 1e-5L && std::fabs(hi - c.closed) <= 1e-5L &&
         std::fabs(hi - oracle) <= 1e-12L;
    detail += "c_min [" + num(static_cast<double>(lo), 10) + ", " + num(static_cast<double>(hi), 10) +
              "] closed form " + num(static_cast<double>(c.closed), 10) + " scan " +
              num(static_cast<double>(oracle), 10) + "; ";
  }
  r.pass = ok;
  r.detail = detail.substr(0, detail.size() - 2);
  return r;
}

CriterionResult singularity(const AcceptanceOptions&, unsigned) {
  CriterionResult r{4, "singular trend of 1/2, none for golden ratio", false, "", 0};
  auto half = FormTarget::from_point({RealOracle::from_rational(Rational(1, 2))}, basis(1, 1));
  auto hp = dirichlet_profile(half, range_schedule(2, 64), std::nullopt, Method::brute);
  bool exact_two = true;
  for (const auto& e : hp.samples) exact_two = exact_two && e.exact && *e.exact * e.Q == 2;

  auto phi = FormTarget::from_point({golden()}, basis(1, 1));
  auto pp = dirichlet_profile(phi, geometric_schedule(2, 10000, 2), std::nullopt, Method::brute);
  const bool in_window =
      compare(pp.tail_sup.lo(), Rational(3, 5)) >= 0 && compare(pp.tail_sup.hi(), Rational(3, 4)) <= 0;
  Dyadic lowest = pp.samples.back().eps.lo();
  for (std::size_t i = pp.samples.size() - std::max<std::size_t>(1, pp.samples.size() / 3); i < pp.samples.size();
       ++i)
    lowest = std::min(lowest, pp.samples[i].eps.lo());
  r.pass = exact_two && hp.singular_trend && in_window && !pp.singular_trend;
  r.detail = std::string("1/2: Q eps*(Q) = 2 ") + (exact_two ? "for all Q" : "FAILS") +
             ", singular " + (hp.singular_trend ? "yes" : "no") + "; golden: tail sup [" +
             num(pp.tail_sup.lo().to_double()) + ", " + num(pp.tail_sup.hi().to_double()) + "], tail inf " +
             num(lowest.to_double()) + ", singular " + (pp.singular_trend ? "yes" : "no");
  return r;
}

CriterionResult algebraic_singular(const AcceptanceOptions&, unsigned) {
  CriterionResult r{5, "point on the unit circle is singular", false, "", 0};
  auto b = basis(2, 2);
  auto y = FormTarget::from_point(realize(RationalSpec{{Rational(3, 5), Rational(4, 5)}}), b);
  const auto schedule = geometric_schedule(2, 1024, 2);
  auto prof = dirichlet_profile(y, schedule, std::nullopt, Method::brute);
  bool decreasing = true;
  for (std::size_t i = 1; i < prof.samples.size(); ++i)
    decreasing = decreasing && prof.samples[i].exact && *prof.samples[i].exact < *prof.samples[i - 1].exact;
  const Rational last = prof.samples.back().exact.value_or(Rational(1));
  auto t = record_scan(y, BigInt(16), Method::brute);
  const IntPolynomial circle(b, BigInt(-1), {0, 0, 1, 0, 1});
  const IntPolynomial neg(b, BigInt(1), {0, 0, -1, 0, -1});
  bool circle_zero = false;
  for (const auto& e : t.entries) circle_zero = circle_zero || (e.exact_zero && (e.P == circle || e.P == neg));
  r.pass = decreasing && last <= make_rational(1, 1024) && t.exact_zero && circle_zero && prof.singular_trend;
  r.detail = "eps*(1024) = " + to_string(last) + ", strictly decreasing " + (decreasing ? "yes" : "no") +
             ", exact-zero record " + (circle_zero ? circle.to_string() : std::string("missing"));
  return r;
}

CriterionResult liouville_witness(const AcceptanceOptions&, unsigned) {
  CriterionResult r{6, "VWA witness on Liouville(10,5)", false, "", 0};
  auto x = make_liouville(BigInt(10), 5);
  auto rep = detect_k_vwa({x}, 1, Rational(1), BigInt(1), BigInt(1000000));
  const Rational tail = x.liouville()->tail_bound;
  std::size_t verified = 0;
  for (const auto& w : rep.witnesses) {
    // against the full series, not only its truncation
    const Rational v = abs(Rational(w.P.a0() + w.P.q()[0] * *x.exact()));
    if (v + abs(w.P.q()[0]) * tail <= make_rational(1, pow(w.heights.H, 2))) ++verified;
  }
  auto est = estimate_omega_k({x}, 1, BigInt(1000000), Method::brute);
  const bool floor = est.value && *est.value >= Rational(29, 10);
  r.pass = !rep.witnesses.empty() && verified == rep.witnesses.size() && floor;
  r.detail = std::to_string(rep.witnesses.size()) + " witnesses (" + std::to_string(verified) +
             " verified against the series), omega_1 >= " + est.text() + " at H = " + to_string(est.witness_height);
  return r;
}

// witnesses of |q x + a0| <= H^-(3/2) for x = sqrt 2, q > 0, H = max(q, |a0|) <= H_max
std::size_t sqrt2_oracle(long H_max) {
  const long double s = std::sqrt(2.0L);
  std::size_t count = 0;
  for (long q = 1; q <= H_max; ++q) {
    const long double t = q * s;
    for (long a = -static_cast<long>(std::ceil(t)) - 1; a <= -static_cast<long>(std::floor(t)) + 1; ++a) {
      const long H = std::max(q, std::labs(a));
      if (H > H_max) continue;
      if (std::fabs(t + a) <= std::pow(static_cast<long double>(H), -1.5L)) ++count;
    }
  }
  return count;
}

CriterionResult roth_proxy(const AcceptanceOptions&, unsigned) {
  CriterionResult r{7, "witness count of sqrt 2 stabilizes", false, "", 0};
  auto small = detect_k_vwa({sqrt2()}, 1, Rational(1, 2), BigInt(1), BigInt(1000));
  auto large = detect_k_vwa({sqrt2()}, 1, Rational(1, 2), BigInt(1), BigInt(1000000));
  const std::size_t o3 = sqrt2_oracle(1000), o6 = sqrt2_oracle(1000000);
  r.pass = small.witnesses.size() == large.witnesses.size() && small.witnesses.size() == o3 &&
           large.witnesses.size() == o6 && small.undecided.empty() && large.undecided.empty();
  r.detail = "H <= 1e3: " + std::to_string(small.witnesses.size()) + " (scan " + std::to_string(o3) +
             "), H <= 1e6: " + std::to_string(large.witnesses.size()) + " (scan " + std::to_string(o6) + ")";
  return r;
}

CriterionResult metric_proxy(const AcceptanceOptions& opt, unsigned workers) {
  CriterionResult r{8, "VWA witnesses are rare for random points", false, "", 0};
  auto fraction = [&](SampleKind kind, unsigned resolution, std::uint64_t salt) {
    std::atomic<long> hits{0};
    parallel_for(1000, workers, [&](std::size_t i) {
      auto x = realize(sample_point(kind, derive_seed(opt.seed ^ salt, i), 1, resolution));
      auto rep = detect_k_vwa(x, 2, Rational(1, 2), BigInt(100), BigInt(10000), single_thread());
      if (!rep.witnesses.empty() || !rep.exact_zeros.empty()) ++hits;
    });
    return hits.load() / 1000.0;
  };
  const double leb = fraction(SampleKind::lebesgue, 64, 0);
  const double cantor = fraction(SampleKind::cantor, 40, 0x9e3779b97f4a7c15ull);
  r.pass = leb <= 0.02 && cantor <= 0.05;
  r.detail = "Lebesgue " + num(100 * leb, 4) + "% (limit 2%), Cantor " + num(100 * cantor, 4) + "% (limit 5%)";
  return r;
}

CriterionResult oracle_equivalence(const AcceptanceOptions& opt, unsigned workers) {
  CriterionResult r{9, "lattice proposals never beat the exhaustive minimum", false, "", 0};
  const std::vector<Shape> shapes{{1, 2}, {2, 1}, {1, 3}, {3, 1}};
  std::atomic<long> checked{0}, below{0}, above_one{0};
  parallel_for(50, workers, [&](std::size_t i) {
    const Shape s = shapes[i % shapes.size()];
    auto y = FormTarget::from_point(lebesgue(opt, 5000 + i, s.d), basis(s.d, s.k));
    const auto cfg = single_thread();
    for (long Q = 2; Q <= 30; ++Q) {
      auto brute = epsilon_star(y, BigInt(Q), std::nullopt, Method::brute, cfg);
      auto lat = epsilon_star(y, BigInt(Q), std::nullopt, Method::lattice, cfg);
      ++checked;
      if (*lat.exact < *brute.exact) ++below;
      if (*lat.exact > 1) ++above_one;
    }
  });
  r.pass = below == 0 && above_one == 0;
  r.detail = std::to_string(checked.load()) + " comparisons, " + std::to_string(below.load()) +
             " below the exhaustive minimum, " + std::to_string(above_one.load()) + " above 1";
  return r;
}

CriterionResult weighted_convention(const AcceptanceOptions& opt, unsigned workers) {
  CriterionResult r{10, "zero weights drop their coordinate", false, "", 0};
  std::atomic<long> equal{0};
  parallel_for(20, workers, [&](std::size_t i) {
    SplitMix64 rng(derive_seed(opt.seed ^ 0x5eedull, i));
    const unsigned m = 2 + static_cast<unsigned>(i % 2);
    auto y = lebesgue(opt, 9000 + i, m + 1);
    std::vector<BigInt> raw(m);
    BigInt sum = 0;
    for (auto& v : raw) sum += (v = 1 + rng.next() % 9);
    const std::size_t zero_at = rng.next() % (m + 1);
    WeightVector full, reduced;
    std::vector<RealOracle> y_reduced;
    for (std::size_t j = 0, t = 0; j <= m; ++j) {
      if (j == zero_at) {
        full.r.push_back(0);
        continue;
      }
      full.r.push_back(make_rational(raw[t], sum));
      reduced.r.push_back(make_rational(raw[t], sum));
      y_reduced.push_back(y[j]);
      ++t;
    }
    const auto cfg = single_thread();
    auto a = weighted_bad_statistic(y, full, BigInt(2000), cfg);
    auto b = weighted_bad_statistic(y_reduced, reduced, BigInt(2000), cfg);
    if (a.q == b.q && a.value == b.value) ++equal;
  });
  r.pass = equal == 20;
  r.detail = std::to_string(equal.load()) + " of 20 instances identical";
  return r;
}

CriterionResult transference_equality(const AcceptanceOptions&, unsigned) {
  CriterionResult r{11, "transference equality at the Dirichlet exponents", false, "", 0};
  bool ok = true;
  for (std::size_t n = 1; n <= 6; ++n) {
    const Rational N = static_cast<unsigned long>(n);
    ExponentEstimate lin, sim;
    lin.value = N;
    sim.value = 1 / N;
    sim.kind = ExponentKind::simultaneous;
    auto t = transference_check(lin, sim, n);
    ok = ok && t.gap_lower && t.gap_upper && *t.gap_lower == 0 && *t.gap_upper == 0 && t.lower_holds &&
         t.upper_holds && t.verdict == TransferenceVerdict::consistent_at_dirichlet;
  }
  r.pass = ok;
  r.detail = ok ? "both gaps exactly 0 for n = 1..6" : "nonzero gap";
  return r;
}

}  // namespace

CriterionResult run_criterion(int id, const AcceptanceOptions& opt) {
  using Check = CriterionResult (*)(const AcceptanceOptions&, unsigned);
  static const Check checks[kCriterionCount] = {
      dirichlet_bound,      exponent_floor, badness_constant,   singularity,         algebraic_singular,
      liouville_witness,    roth_proxy,     metric_proxy,       oracle_equivalence,  weighted_convention,
      transference_equality};
  if (id < 1 || id > kCriterionCount) throw ConfigError("criterion id must lie in 1.." + std::to_string(kCriterionCount));
  const unsigned workers = opt.workers ? opt.workers : worker_count(SearchConfig{});
  const auto start = Clock::now();
  CriterionResult r;
  try {
    r = checks[id - 1](opt, workers);
  } catch (const std::exception& e) {
    r.id = id;
    r.title = "criterion " + std::to_string(id);
    r.pass = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return r;
}

std::string format_result(const CriterionResult& r) {
  std::ostringstream s;
  s << (r.pass ? "PASS" : "FAIL") << "  " << (r.id < 10 ? " " : "") << r.id << "  " << r.title << "  ("
    << r.detail << ", " << num(r.seconds, 3) << "s)";
  return s.str();
}

}  // namespace mahler
