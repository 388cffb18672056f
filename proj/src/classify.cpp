#include "mahler/classify.hpp"

#include <algorithm>

namespace mahler {

std::string to_string(ExponentKind k) { return k == ExponentKind::linear_form ? "linear_form" : "simultaneous"; }

std::string ExponentEstimate::text(int digits) const { return value ? to_decimal(*value, digits) : "+inf"; }

ExponentEstimate estimate_from_records(const RecordTable& table) {
  ExponentEstimate e;
  e.Q_max = table.Q_max;
  e.value = Rational(0);
  for (const auto& r : table.entries) {
    if (r.exact_zero) {
      e.value.reset();
      e.witness_height = r.heights.H;
      ++e.witnesses;
      return e;
    }
    std::optional<Rational> ratio = r.ratio;
    BigInt height = r.heights.H;
    // 2P has height 2
    if (!ratio && height == 1 && !r.undecided && r.value.lo().sign() > 0 && table.Q_max >= 2) {
      const Dyadic doubled = r.value.hi().scaled(1);
      if (doubled < Dyadic::from_int(1)) {
        ratio = exponent_lower_bound(doubled, BigInt(2));
        height = 2;
      }
    }
    if (!ratio) continue;
    ++e.witnesses;
    if (*ratio > *e.value) {
      e.value = *ratio;
      e.witness_height = height;
    }
  }
  return e;
}

namespace {

FormTarget target(const std::vector<RealOracle>& x, unsigned k) {
  if (x.empty()) throw ConfigError("point must have at least one coordinate");
  if (k == 0) throw ConfigError("degree k must be at least 1");
  return FormTarget::from_point(x, basis(static_cast<unsigned>(x.size()), k));
}

bool past_truncation(const std::vector<RealOracle>& x, const BigInt& Q) {
  return std::any_of(x.begin(), x.end(), [&](const RealOracle& o) {
    return o.liouville() && Q >= o.liouville()->truncation_denominator;
  });
}

// H^(-e) as an enclosure.
DyadicInterval inverse_power(const BigInt& H, const Rational& e, long p) {
  const long bits = p + static_cast<long>(ceil(e).get_si()) * static_cast<long>(bit_length(H)) + 8;
  return pow_rational(DyadicInterval::from_rational(make_rational(1, H), bits), e, bits);
}

}  // namespace

ExponentEstimate estimate_omega_k(const std::vector<RealOracle>& x, unsigned k, const BigInt& Q_max, Method method,
                                  const SearchConfig& cfg) {
  auto e = estimate_from_records(record_scan(target(x, k), Q_max, method, cfg));
  e.beyond_truncation = past_truncation(x, Q_max);
  return e;
}

VwaReport detect_k_vwa(const std::vector<RealOracle>& x, unsigned k, const Rational& eps, const BigInt& H_lo,
                       const BigInt& H_hi, const SearchConfig& cfg) {
  if (eps <= 0) throw ConfigError("eps must be positive");
  if (H_lo < 1 || H_hi < H_lo) throw ConfigError("height range must satisfy 1 <= H_lo <= H_hi");
  const FormTarget y = target(x, k);
  const std::size_t n = y.size();
  const Rational e = eps + static_cast<unsigned long>(n);
  const auto& pol = cfg.precision;
  VwaReport out{eps, H_lo, H_hi, {}, {}, {}};

  if (auto rel = relation_lattice(y); rel && rel->size() > 0) {
    auto zeros = smallest_box_relations(*rel, std::vector<BigInt>(n, H_hi), cfg.node_cap);
    for (const auto& q : zeros) out.exact_zeros.emplace_back(y.basis_ptr(), y.certify(q, pol).a0, q);
    if (!zeros.empty()) return out;
  }

  for (BigInt a = 1; a <= H_hi; a *= 2) {
    const BigInt b = std::min(BigInt(2 * a - 1), H_hi);
    const BigInt base = std::max(a, H_lo);
    const Rational thr = inverse_power(base, e, 64).hi().to_rational();
    for (const auto& q : threshold_candidates(y, std::vector<BigInt>(n, b), thr, cfg)) {
      if (sup_norm(q) < a) continue;
      const auto cv = y.certify(q, pol);
      IntPolynomial P(y.basis_ptr(), cv.a0, q);
      const HeightPair h = heights(P);
      if (h.H < H_lo || h.H > H_hi) continue;
      if (cv.exact_zero) {
        out.exact_zeros.push_back(P);
        continue;
      }
      Verdict v = Verdict::undecided;
      DyadicInterval val = cv.value;
      for (long p = pol.p_start;; p = std::min(2 * p, pol.p_max)) {
        const auto t = inverse_power(h.H, e, p);
        if (val.hi() <= t.lo()) {
          v = Verdict::yes;
          break;
        }
        if (val.lo() > t.hi()) {
          v = Verdict::no;
          break;
        }
        if (p >= pol.p_max) break;
        val = cv.exact ? DyadicInterval::from_rational(*cv.exact, 2 * p)
                       : (y.dot(q, 2 * p) + DyadicInterval::from_int(cv.a0)).abs();
      }
      if (v == Verdict::yes) out.witnesses.push_back({P, h, cv.value});
      if (v == Verdict::undecided) out.undecided.push_back(P);
    }
  }
  auto by_height = [](const VwaWitness& u, const VwaWitness& w) {
    if (u.heights.H != w.heights.H) return u.heights.H < w.heights.H;
    return u.P.q() < w.P.q();
  };
  std::sort(out.witnesses.begin(), out.witnesses.end(), by_height);
  return out;
}

std::string to_string(ClassLabel l) {
  switch (l) {
    case ClassLabel::a_like: return "A-like";
    case ClassLabel::s_like: return "S-like";
    case ClassLabel::u_like: return "U-like";
    case ClassLabel::inconclusive: break;
  }
  return "inconclusive";
}

ClassReport class_heuristic(const std::vector<RealOracle>& x, unsigned k_max, const BigInt& Q_max, Method method,
                            const SearchConfig& cfg, const ClassOptions& opt) {
  if (k_max == 0) throw ConfigError("k_max must be at least 1");
  ClassReport r;
  bool zero = false, above = false, all_s = true;
  for (unsigned k = 1; k <= k_max; ++k) {
    const std::size_t n = basis(static_cast<unsigned>(x.size()), k)->size();
    auto est = estimate_omega_k(x, k, Q_max, method, cfg);
    std::optional<Rational> norm;
    if (est.value) norm = *est.value / Rational(static_cast<unsigned long>(n));
    zero = zero || est.infinite();
    if (norm) {
      above = above || *norm > opt.u_threshold;
      all_s = all_s && *norm >= 1 - opt.s_slack && *norm <= opt.u_threshold;
    }
    r.k.push_back(k);
    r.n.push_back(n);
    r.omega.push_back(std::move(est));
    r.normalized.push_back(norm);
  }
  if (zero) {
    r.label = ClassLabel::a_like;
  } else if (above) {
    r.label = ClassLabel::u_like;
  } else if (all_s) {
    r.label = ClassLabel::s_like;
  }
  return r;
}

SimultaneousBest simultaneous_best(const std::vector<RealOracle>& y, const BigInt& q_max, const SearchConfig& cfg) {
  auto s = simultaneous_scan(y, q_max, cfg);
  SimultaneousBest out{s.best.q, s.best.value, s.best.ties, {}, s.records};
  out.exponent.kind = ExponentKind::simultaneous;
  out.exponent.Q_max = q_max;
  out.exponent.beyond_truncation = past_truncation(y, q_max);
  if (s.exact_hit) {
    out.exponent.witness_height = s.best.q;
    out.exponent.witnesses = 1;
  } else {
    out.exponent.value = s.exponent;
    out.exponent.witness_height = s.exponent_q;
    out.exponent.witnesses = s.exponent_q > 0 ? 1 : 0;
  }
  return out;
}

std::string to_string(TransferenceVerdict v) {
  switch (v) {
    case TransferenceVerdict::consistent: return "consistent";
    case TransferenceVerdict::consistent_at_dirichlet: return "consistent-at-Dirichlet";
    case TransferenceVerdict::inconsistent_pending: break;
  }
  return "inconsistent-pending-more-search";
}

TransferenceReport transference_check(const ExponentEstimate& lin, const ExponentEstimate& sim, std::size_t n,
                                      const Rational& slack) {
  if (n == 0) throw ConfigError("dimension must be positive");
  if (lin.kind != ExponentKind::linear_form || sim.kind != ExponentKind::simultaneous) {
    throw ConfigError("transference needs a linear-form and a simultaneous estimate");
  }
  const Rational N = static_cast<unsigned long>(n);
  TransferenceReport r;
  bool lower_near = false, upper_near = false;

  if (lin.value && sim.value) {
    const Rational& w = *lin.value;
    const Rational& l = *sim.value;
    r.gap_lower = Rational(w - (N * l + N - 1));
    r.gap_upper = Rational(l - w / ((N - 1) * w + N));
  } else if (!lin.value && sim.value) {
    r.lower_holds = lower_near = true;
    if (n >= 2) r.gap_upper = Rational(*sim.value - 1 / (N - 1));
  } else if (lin.value && !sim.value) {
    r.upper_holds = upper_near = true;
  } else {
    r.lower_holds = r.upper_holds = lower_near = upper_near = true;
  }
  if (r.gap_lower) {
    r.lower_holds = *r.gap_lower >= 0;
    lower_near = *r.gap_lower >= -slack;
  }
  if (r.gap_upper) {
    r.upper_holds = *r.gap_upper >= 0;
    upper_near = *r.gap_upper >= -slack;
  }
  const bool dirichlet = lin.value && sim.value && *lin.value == N && *sim.value == 1 / N;
  if (dirichlet && r.lower_holds && r.upper_holds) {
    r.verdict = TransferenceVerdict::consistent_at_dirichlet;
  } else if (lower_near && upper_near) {
    r.verdict = TransferenceVerdict::consistent;
  }
  return r;
}

}  // namespace mahler
