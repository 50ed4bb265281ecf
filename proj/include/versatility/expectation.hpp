#pragma once

// Expectations E[g(W)] over the outcome space of a family.
//
// Continuous families are integrated in s = ln y over the whole real line,
// so the integrand is f(e^s) e^s g(e^s). Discrete families are summed
// directly over x = 0, 1, ... until the terms are negligible; if that has
// not happened after `direct_terms` terms, the remainder sum over x >= N is
// replaced by its Euler-Maclaurin expansion, whose integral part is again
// taken in s = ln t. Working in log-outcome space keeps heavy tails
// (Waring, Discrete Weibull with small tau) tractable: their mass can sit
// at outcomes far beyond the double range.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "versatility/distribution.hpp"
#include "versatility/errors.hpp"
#include "versatility/outcome.hpp"
#include "versatility/quadrature.hpp"

namespace versatility {

struct ExpectationOptions {
  double rel_tol = 1e-11;
  std::size_t max_intervals = 2000;
  std::size_t direct_terms = 64;
  double term_tol = 1e-14;
  double tail_tol = 1e-12;
  bool check_divergence = true;
};

struct ExpectationResult {
  std::vector<double> value;
  std::vector<double> error;
  std::size_t evaluations = 0;
  bool converged = true;
  /// First component whose integrand does not decay in some tail.
  std::optional<std::size_t> divergent_component;
};

/// g(w, ln f(w), out): writes the components of g at w. Returns false if g
/// is undefined there.
using OutcomeFunction = std::function<bool(const Outcome&, double, std::span<double>)>;

namespace detail {

inline void default_scale(std::span<const double> est, std::span<double> scale) {
  for (std::size_t i = 0; i < est.size(); ++i) scale[i] = std::max(std::abs(est[i]), 1e-300);
}

// Evaluates e^{log_f + log_jac} g into out. A zero-density point contributes 0.
inline bool weighted_term(const OutcomeFunction& g, const Outcome& w, double log_f, double log_jac,
                          std::span<double> out) {
  // Mass below the double range contributes nothing; g is not evaluated there.
  if (log_f == -std::numeric_limits<double>::infinity() || log_f + log_jac < -745.0) {
    std::fill(out.begin(), out.end(), 0.0);
    return true;
  }
  if (!std::isfinite(log_f)) return false;
  if (!g(w, log_f, out)) return false;
  const double m = std::exp(log_f + log_jac);
  for (auto& v : out) {
    v *= m;
    if (std::isnan(v)) return false;
  }
  return true;
}

struct Peak {
  double center;
  double width;
};

// Locates the bulk of f(e^s) e^s over s >= s_min (s_min may be -inf).
inline Peak locate_mass(const std::function<double(double)>& M, double s_min) {
  std::vector<double> grid;
  const double base = std::isfinite(s_min) ? s_min : -60.0;
  if (std::isfinite(s_min)) {
    for (int i = 0; i <= 60; ++i) grid.push_back(s_min + i);
  } else {
    for (int i = -60; i <= 60; ++i) grid.push_back(i);
  }
  static constexpr double far[] = {100, 200, 500, 1e3, 2e3, 5e3, 1e4, 2e4, 5e4, 1e5, 2e5, 5e5, 1e6};
  for (double d : far) {
    grid.push_back(base + 60.0 + d);
    if (!std::isfinite(s_min)) grid.push_back(-60.0 - d);
  }
  std::sort(grid.begin(), grid.end());

  std::size_t best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = M(grid[i]);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  if (!std::isfinite(best_val)) return {grid[grid.size() / 2], 1.0};

  double lo = best > 0 ? grid[best - 1] : grid[best];
  double hi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
  double c = grid[best];
  if (hi > lo) {
    // Golden-section search for the maximum in [lo, hi].
    const double gr = 0.6180339887498949;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    double f1 = M(x1), f2 = M(x2);
    for (int it = 0; it < 80 && hi - lo > 1e-10 * (1.0 + std::abs(c)); ++it) {
      if (f1 < f2) {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = M(x2);
      } else {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = M(x1);
      }
    }
    c = 0.5 * (lo + hi);
    if (M(c) < best_val) c = grid[best];
  }
  if (std::isfinite(s_min) && c < s_min) c = s_min;

  // Width: distance at which M falls half a nat below the peak (one standard
  // deviation for a Gaussian bump), taken on whichever side reaches it last.
  // Local derivatives are not used: at a boundary peak the slope can be
  // nearly zero while the mass still ends within a few units.
  const double m0 = M(c);
  const double target = m0 - 0.5;
  auto drop = [&](double dir) {
    double inside = 0.0, d = 1e-8;
    for (; d <= 2e6; d *= 2.0) {
      const double s = c + dir * d;
      if (std::isfinite(s_min) && s < s_min) return std::numeric_limits<double>::quiet_NaN();
      if (M(s) <= target) break;
      inside = d;
    }
    if (d > 2e6) return std::numeric_limits<double>::infinity();
    for (int it = 0; it < 40 && d - inside > 1e-3 * d; ++it) {
      const double mid = 0.5 * (inside + d);
      (M(c + dir * mid) <= target ? d : inside) = mid;
    }
    return d;
  };
  const double right = drop(1.0), left = drop(-1.0);
  double width = std::isnan(left) ? right : std::isnan(right) ? left : std::max(left, right);
  if (std::isnan(width)) width = 1.0;
  width = std::clamp(width, 1e-8, 1e6);
  return {c, width};
}

// A component diverges if its log-integrand in s does not decrease far out.
inline std::optional<std::size_t> tail_divergence(const std::function<double(const Outcome&)>& log_f,
                                                  const OutcomeFunction& g, std::size_t dim, bool left_tail) {
  std::vector<double> b1(dim), b2(dim);
  auto probe = [&](double s1, double s2) -> std::optional<std::size_t> {
    const Outcome w1 = Outcome::from_log(s1), w2 = Outcome::from_log(s2);
    const double l1 = log_f(w1), l2 = log_f(w2);
    if (std::isnan(l1) || std::isnan(l2)) return std::nullopt;
    const bool ok1 = l1 == -std::numeric_limits<double>::infinity() || g(w1, l1, b1);
    const bool ok2 = l2 == -std::numeric_limits<double>::infinity() || g(w2, l2, b2);
    if (!ok1 || !ok2) return std::nullopt;
    for (std::size_t i = 0; i < dim; ++i) {
      // g overflowing at the probe (e.g. a difference quotient straddling
      // the underflow of f) says nothing about decay.
      if (!std::isfinite(b1[i]) || !std::isfinite(b2[i])) continue;
      const double L1 = l1 == -std::numeric_limits<double>::infinity() || b1[i] == 0.0
                            ? -std::numeric_limits<double>::infinity()
                            : l1 + s1 + std::log(std::abs(b1[i]));
      const double L2 = l2 == -std::numeric_limits<double>::infinity() || b2[i] == 0.0
                            ? -std::numeric_limits<double>::infinity()
                            : l2 + s2 + std::log(std::abs(b2[i]));
      // An exact zero at the nearer probe (a difference quotient cancelling
      // completely) carries no information about decay.
      if (!std::isfinite(L1) || !std::isfinite(L2)) continue;
      if (L2 >= L1) return i;
    }
    return std::nullopt;
  };
  if (auto r = probe(1e6, 2e6)) return r;
  if (left_tail)
    if (auto r = probe(-1e6, -2e6)) return r;
  return std::nullopt;
}

// Integral of h(e^s) e^s over s >= s_min, with h = f g.
inline quadrature::AdaptiveResult integrate_log_space(const std::function<double(const Outcome&)>& log_f,
                                                      const OutcomeFunction& g, std::size_t dim, double s_min,
                                                      const ExpectationOptions& opts,
                                                      const quadrature::ScaleFn& scale) {
  auto M = [&](double s) {
    const double v = log_f(Outcome::from_log(s));
    return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v + s;
  };
  const Peak pk = locate_mass(M, s_min);
  const double half = 12.0 * pk.width;
  std::vector<quadrature::Segment> segs;
  double lo = pk.center - half;
  const double hi = pk.center + half;
  if (!std::isfinite(s_min))
    segs.push_back(quadrature::Segment::left_tail(lo, pk.width));
  else if (lo > s_min)
    segs.push_back(quadrature::Segment::finite(s_min, lo));
  else
    lo = s_min;
  segs.push_back(quadrature::Segment::finite(lo, hi));
  segs.push_back(quadrature::Segment::right_tail(hi, pk.width));

  auto integrand = [&](double s, std::span<double> out) {
    const Outcome w = Outcome::from_log(s);
    return weighted_term(g, w, log_f(w), s, out);
  };
  quadrature::AdaptiveOptions aopt{opts.rel_tol, opts.max_intervals};
  return quadrature::integrate_segments(integrand, segs, dim, aopt, scale);
}

}  // namespace detail

/// E[g(W) | a] under the family's own distribution, together with
/// per-component error estimates. Throws DivergenceError when the integrand
/// fails to decay or becomes non-finite.
inline ExpectationResult expectation(const DistributionSpec& spec, std::span<const double> a, std::size_t dim,
                                     const OutcomeFunction& g, const quadrature::ScaleFn& scale_fn = {},
                                     const ExpectationOptions& opts = {}) {
  const quadrature::ScaleFn scale = scale_fn ? scale_fn : quadrature::ScaleFn(detail::default_scale);
  auto log_f = [&](const Outcome& w) { return spec.log_density(w, a); };

  ExpectationResult res;
  res.value.assign(dim, 0.0);
  res.error.assign(dim, 0.0);

  if (opts.check_divergence) {
    if (auto c = detail::tail_divergence(log_f, g, dim, !spec.is_discrete())) {
      res.divergent_component = c;
      res.converged = false;
      return res;
    }
  }

  if (!spec.is_discrete()) {
    auto r = detail::integrate_log_space(log_f, g, dim, -std::numeric_limits<double>::infinity(), opts, scale);
    res.value = std::move(r.value);
    res.error = std::move(r.error);
    res.evaluations = r.evaluations;
    res.converged = r.converged;
    if (r.non_finite) throw DivergenceError(spec.family_id + ": integrand is not finite");
    return res;
  }

  // Discrete: direct summation.
  std::vector<double> term(dim), prev(dim, 0.0), sc(dim);
  const std::size_t N = opts.direct_terms;
  std::vector<std::vector<double>> terms;  // h(x), kept for the Euler-Maclaurin corrections
  terms.reserve(N + 3);
  bool done = false;
  for (std::size_t x = 0; x < N + 3; ++x) {
    const Outcome w = Outcome::at(static_cast<double>(x));
    ++res.evaluations;
    if (!detail::weighted_term(g, w, log_f(w), 0.0, term))
      throw DivergenceError(spec.family_id + ": summand is not finite at x = " + std::to_string(x));
    terms.push_back(term);
    if (x >= N) continue;  // only needed for finite differences
    for (std::size_t i = 0; i < dim; ++i) res.value[i] += term[i];
    if (x < 2) {
      prev = term;
      continue;
    }
    scale(res.value, sc);
    bool small = true;
    double tail = 0.0;
    for (std::size_t i = 0; i < dim && small; ++i) {
      const double t = std::abs(term[i]), p = std::abs(prev[i]);
      if (t > opts.term_tol * sc[i]) small = false;
      if (t == 0.0) continue;
      const double r = p > 0.0 ? t / p : 1.0;
      if (r >= 1.0) {
        small = false;
        break;
      }
      const double est = t * r / (1.0 - r);
      if (est > opts.tail_tol * sc[i]) small = false;
      tail = std::max(tail, est / sc[i]);
    }
    prev = term;
    if (small) {
      for (std::size_t i = 0; i < dim; ++i) res.error[i] = tail * sc[i];
      done = true;
      break;
    }
  }
  if (done) return res;

  // Remainder sum_{x >= N} h(x) ~ int_N^inf h + h(N)/2 - h'(N)/12 + h'''(N)/720,
  // derivatives from five-point differences at unit spacing.
  auto r = detail::integrate_log_space(log_f, g, dim, std::log(static_cast<double>(N)), opts, scale);
  if (r.non_finite) throw DivergenceError(spec.family_id + ": tail integrand is not finite");
  res.evaluations += r.evaluations;
  res.converged = r.converged;
  const auto& hm2 = terms[N - 2];
  const auto& hm1 = terms[N - 1];
  const auto& h0 = terms[N];
  const auto& hp1 = terms[N + 1];
  const auto& hp2 = terms[N + 2];
  for (std::size_t i = 0; i < dim; ++i) {
    const double d1 = (hm2[i] - 8.0 * hm1[i] + 8.0 * hp1[i] - hp2[i]) / 12.0;
    const double d3 = (-hm2[i] + 2.0 * hm1[i] - 2.0 * hp1[i] + hp2[i]) / 2.0;
    const double corr = 0.5 * h0[i] - d1 / 12.0 + d3 / 720.0;
    res.value[i] += r.value[i] + corr;
    res.error[i] = r.error[i] + std::abs(d3) / 720.0;
  }
  return res;
}

struct NormalizationCheck {
  double residual;
  bool ok;
};

/// |total mass - 1| under the expectation policy.
inline NormalizationCheck check_normalization(const DistributionSpec& spec, const ParamVector& a, double tol) {
  if (!(tol > 0.0)) throw DomainError("check_normalization: tolerance must be positive");
  spec.validate(a);
  auto one = [](const Outcome&, double, std::span<double> out) {
    out[0] = 1.0;
    return true;
  };
  auto scale = [](std::span<const double>, std::span<double> s) { s[0] = 1.0; };
  ExpectationOptions opts;
  opts.rel_tol = 1e-13;
  const auto r = expectation(spec, a.values(), 1, one, scale, opts);
  if (r.divergent_component)
    throw NonNormalizableError(spec.family_id + ": total mass does not converge");
  const double residual = std::abs(r.value[0] - 1.0);
  return {residual, residual <= tol};
}

}  // namespace versatility
