#pragma once

// Numerical integration primitives.
//
//  * integrate_segments: globally adaptive, vector-valued Gauss-Kronrod
//    (7/15) over a union of finite and mapped semi-infinite segments.
//  * gauss_hermite: probabilists' Gauss-Hermite rule with weights
//    normalized to sum to one, so sum w_i g(x_i) ~ E[g(Z)], Z ~ N(0,1).
//  * sobol_normal_points: scrambled quasi-random N(0,1) points.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/random/sobol.hpp>

namespace versatility::quadrature {

/// Maps v in [0, 1] (or [lo, hi] for Finite) onto the integration variable.
struct Segment {
  enum class Kind { Finite, RightTail, LeftTail };
  Kind kind = Kind::Finite;
  double lo = 0.0;    // Finite: lower end. RightTail: anchor a.
  double hi = 0.0;    // Finite: upper end. LeftTail: anchor b.
  double scale = 1.0; // tail length scale

  static Segment finite(double a, double b) { return {Kind::Finite, a, b, 1.0}; }
  /// s = a + scale * v / (1 - v), v in [0, 1).
  static Segment right_tail(double a, double scale) { return {Kind::RightTail, a, 0.0, scale}; }
  /// s = b - scale * v / (1 - v), v in [0, 1).
  static Segment left_tail(double b, double scale) { return {Kind::LeftTail, 0.0, b, scale}; }

  double v_lo() const noexcept { return kind == Kind::Finite ? lo : 0.0; }
  double v_hi() const noexcept { return kind == Kind::Finite ? hi : 1.0; }

  /// Returns s(v) and writes ds/dv.
  double map(double v, double& jac) const noexcept {
    switch (kind) {
      case Kind::Finite:
        jac = 1.0;
        return v;
      case Kind::RightTail: {
        const double d = 1.0 - v;
        jac = scale / (d * d);
        return lo + scale * v / d;
      }
      case Kind::LeftTail: {
        const double d = 1.0 - v;
        jac = scale / (d * d);
        return hi - scale * v / d;
      }
    }
    jac = 0.0;
    return 0.0;
  }
};

struct AdaptiveOptions {
  double rel_tol = 1e-11;
  std::size_t max_intervals = 2000;
};

struct AdaptiveResult {
  std::vector<double> value;
  std::vector<double> error;
  std::size_t evaluations = 0;
  std::size_t intervals = 0;
  bool converged = false;
  bool non_finite = false;  // integrand produced inf/nan somewhere
};

/// Integrand: writes dim components at abscissa s; return false when the
/// integrand is not finite there.
using VectorIntegrand = std::function<bool(double s, std::span<double> out)>;
/// Per-component error scales given the current estimate.
using ScaleFn = std::function<void(std::span<const double> estimate, std::span<double> scale)>;

namespace detail {

struct Piece {
  std::size_t segment;
  double a, b;
  std::vector<double> value, error;
};

struct KronrodRule {
  std::array<double, 15> x;   // nodes on [-1, 1]
  std::array<double, 15> wk;  // Kronrod weights
  std::array<double, 15> wg;  // Gauss weights (0 at Kronrod-only nodes)
};

inline const KronrodRule& kronrod15() {
  static const KronrodRule rule = [] {
    using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
    using G = boost::math::quadrature::gauss<double, 7>;
    const auto& ax = GK::abscissa();  // non-negative half, ax[0] = 0
    const auto& w = GK::weights();
    const auto& gw = G::weights();
    KronrodRule r{};
    std::size_t n = 0;
    for (std::size_t i = 0; i < ax.size(); ++i) {
      // Gauss nodes are the even-indexed Kronrod abscissae.
      const double g = (i % 2 == 0) ? gw[i / 2] : 0.0;
      r.x[n] = ax[i];
      r.wk[n] = w[i];
      r.wg[n] = g;
      ++n;
      if (i > 0) {
        r.x[n] = -ax[i];
        r.wk[n] = w[i];
        r.wg[n] = g;
        ++n;
      }
    }
    return r;
  }();
  return rule;
}

inline bool apply_rule(const VectorIntegrand& f, const Segment& seg, Piece& p, std::size_t dim,
                       std::vector<double>& buf, std::size_t& evals) {
  const auto& rule = kronrod15();
  const double c = 0.5 * (p.a + p.b);
  const double h = 0.5 * (p.b - p.a);
  p.value.assign(dim, 0.0);
  std::vector<double> gauss(dim, 0.0);
  bool finite = true;
  for (std::size_t n = 0; n < 15; ++n) {
    double jac = 0.0;
    const double s = seg.map(c + h * rule.x[n], jac);
    std::fill(buf.begin(), buf.end(), 0.0);
    ++evals;
    if (!f(s, buf)) {
      finite = false;
      continue;
    }
    for (std::size_t i = 0; i < dim; ++i) {
      const double term = buf[i] * jac;
      if (!std::isfinite(term)) {
        finite = false;
        continue;
      }
      p.value[i] += rule.wk[n] * term;
      gauss[i] += rule.wg[n] * term;
    }
  }
  p.error.assign(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    p.value[i] *= h;
    gauss[i] *= h;
    p.error[i] = std::abs(p.value[i] - gauss[i]);
  }
  return finite;
}

}  // namespace detail

/// Adaptive integration of a vector integrand over the union of segments.
/// Bisection targets the piece with the largest scaled error until
/// max_i (sum of errors)_i / scale_i <= rel_tol.
inline AdaptiveResult integrate_segments(const VectorIntegrand& f, std::span<const Segment> segments,
                                         std::size_t dim, const AdaptiveOptions& opts, const ScaleFn& scale_fn) {
  AdaptiveResult res;
  res.value.assign(dim, 0.0);
  res.error.assign(dim, 0.0);
  std::vector<double> buf(dim), scale(dim, 1.0);
  std::vector<detail::Piece> pieces;
  pieces.reserve(opts.max_intervals + 2);

  for (std::size_t k = 0; k < segments.size(); ++k) {
    const auto& seg = segments[k];
    if (!(seg.v_hi() > seg.v_lo())) continue;
    detail::Piece p{k, seg.v_lo(), seg.v_hi(), {}, {}};
    if (!detail::apply_rule(f, seg, p, dim, buf, res.evaluations)) res.non_finite = true;
    pieces.push_back(std::move(p));
  }

  auto totals = [&] {
    std::fill(res.value.begin(), res.value.end(), 0.0);
    std::fill(res.error.begin(), res.error.end(), 0.0);
    for (const auto& p : pieces)
      for (std::size_t i = 0; i < dim; ++i) {
        res.value[i] += p.value[i];
        res.error[i] += p.error[i];
      }
    scale_fn(res.value, scale);
  };
  auto scaled_error = [&](const std::vector<double>& e) {
    double m = 0.0;
    for (std::size_t i = 0; i < dim; ++i) m = std::max(m, e[i] / scale[i]);
    return m;
  };

  totals();
  while (true) {
    if (scaled_error(res.error) <= opts.rel_tol) {
      res.converged = true;
      break;
    }
    if (pieces.size() >= opts.max_intervals || res.non_finite) break;
    std::size_t worst = 0;
    double worst_err = -1.0;
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      const double e = scaled_error(pieces[j].error);
      if (e > worst_err) {
        worst_err = e;
        worst = j;
      }
    }
    const double mid = 0.5 * (pieces[worst].a + pieces[worst].b);
    if (!(mid > pieces[worst].a && mid < pieces[worst].b)) break;  // interval exhausted
    detail::Piece left{pieces[worst].segment, pieces[worst].a, mid, {}, {}};
    detail::Piece right{pieces[worst].segment, mid, pieces[worst].b, {}, {}};
    const auto& seg = segments[left.segment];
    if (!detail::apply_rule(f, seg, left, dim, buf, res.evaluations)) res.non_finite = true;
    if (!detail::apply_rule(f, seg, right, dim, buf, res.evaluations)) res.non_finite = true;
    pieces[worst] = std::move(left);
    pieces.push_back(std::move(right));
    totals();
  }
  res.intervals = pieces.size();
  return res;
}

/// Probabilists' Gauss-Hermite rule: nodes x_i and weights w_i with
/// sum w_i = 1, exact for E[p(Z)] with deg p <= 2n - 1.
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

inline GaussHermiteRule gauss_hermite(std::size_t n) {
  if (n == 0 || n > 512) throw std::invalid_argument("gauss_hermite: n must be in [1, 512]");
  // Starting points: eigenvalues of the physicists' Jacobi matrix
  // (Golub-Welsch); then Newton on the orthonormal recurrence, whose
  // derivative also gives weights with full relative accuracy in the tails.
  // Above n = 512 the recurrence values overflow.
  const double nd = static_cast<double>(n);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  Eigen::VectorXd sub(static_cast<Eigen::Index>(n > 1 ? n - 1 : 1));
  for (std::size_t k = 1; k < n; ++k) sub(static_cast<Eigen::Index>(k - 1)) = std::sqrt(static_cast<double>(k) / 2.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, sub.head(static_cast<Eigen::Index>(n - 1)), Eigen::EigenvaluesOnly);
  const Eigen::VectorXd guess = eig.eigenvalues();  // ascending

  const double pim4 = 0.7511255444649425;  // pi^(-1/4)
  std::vector<double> x(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    double z = guess(static_cast<Eigen::Index>(n - 1 - i));  // descending, as below
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double jd = static_cast<double>(j);
        p1 = z * std::sqrt(2.0 / (jd + 1.0)) * p2 - std::sqrt(jd / (jd + 1.0)) * p3;
      }
      pp = std::sqrt(2.0 * nd) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15 * std::max(1.0, std::abs(z))) break;
    }
    x[i] = z;
    w[i] = 2.0 / (pp * pp);
  }
  // Exact symmetry.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double z = 0.5 * (x[i] - x[n - 1 - i]);
    const double wi = 0.5 * (w[i] + w[n - 1 - i]);
    x[i] = z;
    x[n - 1 - i] = -z;
    w[i] = w[n - 1 - i] = wi;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double sqrt_pi = std::sqrt(3.14159265358979323846);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    // ascending order
    rule.nodes[i] = std::sqrt(2.0) * x[n - 1 - i];
    rule.weights[i] = w[n - 1 - i] / sqrt_pi;
    total += rule.weights[i];
  }
  for (auto& v : rule.weights) v /= total;
  return rule;
}

/// n quasi-random points of N(0, I_dim): Sobol sequence with a seeded
/// Cranley-Patterson rotation, mapped through the normal quantile.
inline std::vector<std::vector<double>> sobol_normal_points(std::size_t dim, std::size_t n, std::uint64_t seed) {
  boost::random::sobol engine(static_cast<unsigned>(dim));
  engine.discard(dim);  // drop the origin
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> shift(dim);
  for (auto& s : shift) s = unif(rng);
  const double denom = static_cast<double>(boost::random::sobol::max()) + 1.0;
  std::vector<std::vector<double>> pts(n, std::vector<double>(dim));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t d = 0; d < dim; ++d) {
      double u = static_cast<double>(engine()) / denom + shift[d];
      u -= std::floor(u);
      u = std::clamp(u, 1e-16, 1.0 - 1e-16);
      pts[i][d] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u - 1.0);
    }
  return pts;
}

}  // namespace versatility::quadrature
