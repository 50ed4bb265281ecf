#pragma once

// Score vectors, Fisher information matrices, the unnormalized Jeffreys
// density and the Cramer-Rao bound.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "versatility/distribution.hpp"
#include "versatility/errors.hpp"
#include "versatility/expectation.hpp"

namespace versatility {

enum class FisherMethod { Analytic, NumericScore, NumericHessian };

inline std::string_view to_string(FisherMethod m) {
  switch (m) {
    case FisherMethod::Analytic: return "analytic";
    case FisherMethod::NumericScore: return "numeric-score";
    case FisherMethod::NumericHessian: return "numeric-hessian";
  }
  return "";
}

struct FisherMatrix {
  Eigen::MatrixXd entries;
  FisherMethod method = FisherMethod::Analytic;
  /// Largest estimated absolute error relative to the largest diagonal entry.
  double error_estimate = 0.0;
  /// Total probability mass seen by the expectation (1 for proper densities;
  /// numeric paths only).
  double mass = 1.0;
  /// E[score]; zero up to numerical error (numeric paths only).
  Eigen::VectorXd score_mean;

  std::size_t k() const noexcept { return static_cast<std::size_t>(entries.rows()); }
  double scale() const { return entries.diagonal().cwiseAbs().maxCoeff(); }
};

struct FisherOptions {
  bool force_numeric = false;
  ExpectationOptions expectation{};
};

namespace detail {

// Step for central differences: relative with an absolute floor, shrunk so
// that a - 2h stays inside the parameter domain.
inline double fd_step(double a, double rel, double floor) {
  double h = std::max(rel * std::abs(a), floor);
  if (a > 0.0) h = std::min(h, 0.25 * a);
  return h;
}

inline void numeric_score(const DistributionSpec& spec, const Outcome& w, std::span<const double> a,
                          std::span<double> out) {
  std::vector<double> p(a.begin(), a.end());
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double h = fd_step(a[i], 1e-6, 1e-8);
    const double zero_ok = i < spec.zero_allowed.size() && spec.zero_allowed[i];
    if (a[i] == 0.0 && zero_ok) {
      p[i] = h;
      const double up = spec.log_density(w, p);
      p[i] = 0.0;
      out[i] = (up - spec.log_density(w, p)) / h;
      continue;
    }
    p[i] = a[i] + h;
    const double up = spec.log_density(w, p);
    p[i] = a[i] - h;
    const double dn = spec.log_density(w, p);
    p[i] = a[i];
    out[i] = (up - dn) / (2.0 * h);
  }
}

inline void raw_score(const DistributionSpec& spec, const Outcome& w, std::span<const double> a,
                      std::span<double> out) {
  if (spec.analytic_score)
    spec.analytic_score(w, a, out);
  else
    numeric_score(spec, w, a, out);
}

// Negative Hessian of ln f in the parameters: five-point second differences
// on the diagonal, fourth-order cross stencil off it.
inline void negative_hessian(const DistributionSpec& spec, const Outcome& w, std::span<const double> a,
                             Eigen::MatrixXd& H) {
  const std::size_t k = a.size();
  std::vector<double> p(a.begin(), a.end());
  std::vector<double> h(k);
  for (std::size_t i = 0; i < k; ++i) h[i] = fd_step(a[i], 2e-3, 1e-4);
  auto at = [&](std::size_t i, int di, std::size_t j, int dj) {
    p[i] = a[i] + di * h[i];
    if (j != i) p[j] = a[j] + dj * h[j];
    const double v = spec.log_density(w, p);
    p[i] = a[i];
    p[j] = a[j];
    return v;
  };
  const double f0 = spec.log_density(w, a);
  for (std::size_t i = 0; i < k; ++i) {
    const double d2 = (-at(i, 2, i, 0) + 16.0 * at(i, 1, i, 0) - 30.0 * f0 + 16.0 * at(i, -1, i, 0) - at(i, -2, i, 0)) /
                      (12.0 * h[i] * h[i]);
    H(i, i) = -d2;
    for (std::size_t j = i + 1; j < k; ++j) {
      const double s = 8.0 * (at(i, 1, j, -2) + at(i, 2, j, -1) + at(i, -2, j, 1) + at(i, -1, j, 2)) -
                       8.0 * (at(i, -1, j, -2) + at(i, -2, j, -1) + at(i, 1, j, 2) + at(i, 2, j, 1)) -
                       (at(i, 2, j, -2) + at(i, -2, j, 2) - at(i, -2, j, -2) - at(i, 2, j, 2)) +
                       64.0 * (at(i, -1, j, -1) + at(i, 1, j, 1) - at(i, 1, j, -1) - at(i, -1, j, 1));
      H(i, j) = H(j, i) = -s / (144.0 * h[i] * h[j]);
    }
  }
}

inline std::size_t tri_index(std::size_t i, std::size_t j, std::size_t k) {
  // upper triangle, row-major, i <= j
  return i * k - i * (i - 1) / 2 + (j - i);
}

inline std::string entry_name(std::size_t c, std::size_t k) {
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j)
      if (tri_index(i, j, k) == c) return "I[" + std::to_string(i) + "][" + std::to_string(j) + "]";
  return "component " + std::to_string(c);
}

// Error scales for a packed upper triangle: sqrt(|I_ii I_jj|).
inline void triangle_scale(std::size_t k, std::span<const double> est, std::span<double> scale, double floor) {
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      const double di = std::abs(est[tri_index(i, i, k)]), dj = std::abs(est[tri_index(j, j, k)]);
      scale[tri_index(i, j, k)] = std::max(std::sqrt(di * dj), floor);
    }
}

inline FisherMatrix numeric_fisher(const DistributionSpec& spec, std::span<const double> a, const FisherOptions& opts) {
  const std::size_t k = a.size();
  const std::size_t nt = k * (k + 1) / 2;
  const std::size_t dim = nt + k + 1;  // products, score means, mass
  auto g = [&](const Outcome& w, double, std::span<double> out) {
    double sc[8];
    std::span<double> s(sc, k);
    raw_score(spec, w, a, s);
    for (std::size_t i = 0; i < k; ++i) {
      if (!std::isfinite(s[i])) return false;
      for (std::size_t j = i; j < k; ++j) out[tri_index(i, j, k)] = s[i] * s[j];
      out[nt + i] = s[i];
    }
    out[nt + k] = 1.0;
    return true;
  };
  auto scale = [&](std::span<const double> est, std::span<double> sc) {
    triangle_scale(k, est, sc, 1e-300);
    for (std::size_t i = 0; i < k; ++i) sc[nt + i] = std::max(std::sqrt(std::abs(est[tri_index(i, i, k)])), 1e-300);
    sc[nt + k] = 1.0;
  };
  const auto r = expectation(spec, a, dim, g, scale, opts.expectation);
  if (r.divergent_component) {
    const std::size_t c = *r.divergent_component;
    const std::string name = c < nt ? entry_name(c, k) : (c < nt + k ? "E[score]" : "total mass");
    throw DivergenceError(spec.family_id + ": Fisher expectation diverges (" + name + ")");
  }
  FisherMatrix fm;
  fm.method = FisherMethod::NumericScore;
  fm.entries.resize(k, k);
  fm.score_mean.resize(k);
  double err = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      fm.entries(i, j) = fm.entries(j, i) = r.value[tri_index(i, j, k)];
      err = std::max(err, r.error[tri_index(i, j, k)]);
    }
    fm.score_mean(i) = r.value[nt + i];
  }
  fm.mass = r.value[nt + k];
  const double sc = fm.scale();
  fm.error_estimate = sc > 0.0 ? err / sc : err;
  return fm;
}

inline void check_psd(const FisherMatrix& fm, const std::string& who) {
  const double sc = fm.scale();
  if (!fm.entries.allFinite()) throw NumericPsdError(who + ": Fisher matrix is not finite");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fm.entries, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-8 * sc)
    throw NumericPsdError(who + ": Fisher matrix is not positive semidefinite");
}

}  // namespace detail

/// d ln f(w | a) / d a_i for each i.
inline Eigen::VectorXd score(const DistributionSpec& spec, double w, const ParamVector& a) {
  const double lf = eval_log_density(spec, w, a);
  if (lf == -std::numeric_limits<double>::infinity())
    throw ScoreUndefinedError(spec.family_id + ": score undefined where the density vanishes");
  if (is_pole(lf)) throw ScoreUndefinedError(spec.family_id + ": score undefined at a pole of the density");
  Eigen::VectorXd s(static_cast<Eigen::Index>(a.size()));
  detail::raw_score(spec, Outcome::at(w), a.values(), std::span<double>(s.data(), a.size()));
  return s;
}

/// The k x k Fisher information matrix E[score score^T].
inline FisherMatrix fisher_matrix(const DistributionSpec& spec, const ParamVector& a, const FisherOptions& opts = {}) {
  spec.validate(a);
  FisherMatrix fm;
  if (spec.analytic_fisher && !opts.force_numeric) {
    fm.entries = spec.analytic_fisher(a.values());
    fm.method = FisherMethod::Analytic;
    fm.score_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(a.size()));
  } else {
    fm = detail::numeric_fisher(spec, a.values(), opts);
  }
  detail::check_psd(fm, spec.family_id);
  return fm;
}

inline double fisher_scalar(const DistributionSpec& spec, const ParamVector& a, const FisherOptions& opts = {}) {
  if (a.size() != 1) throw ParameterArityError("fisher_scalar needs a single parameter");
  return fisher_matrix(spec, a, opts).entries(0, 0);
}

/// -E[d^2 ln f / da da^T] by numeric second differences.
inline FisherMatrix fisher_matrix_hessian(const DistributionSpec& spec, const ParamVector& a,
                                          const FisherOptions& opts = {}) {
  spec.validate(a);
  const std::size_t k = a.size();
  const std::size_t nt = k * (k + 1) / 2;
  Eigen::MatrixXd H(k, k);
  auto g = [&](const Outcome& w, double, std::span<double> out) {
    detail::negative_hessian(spec, w, a.values(), H);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i; j < k; ++j) {
        if (!std::isfinite(H(i, j))) return false;
        out[detail::tri_index(i, j, k)] = H(i, j);
      }
    return true;
  };
  auto scale = [&](std::span<const double> est, std::span<double> sc) { detail::triangle_scale(k, est, sc, 1e-300); };
  const auto r = expectation(spec, a.values(), nt, g, scale, opts.expectation);
  if (r.divergent_component)
    throw DivergenceError(spec.family_id + ": Hessian expectation diverges (" +
                          detail::entry_name(*r.divergent_component, k) + ")");
  FisherMatrix fm;
  fm.method = FisherMethod::NumericHessian;
  fm.entries.resize(k, k);
  double err = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) {
      fm.entries(i, j) = fm.entries(j, i) = r.value[detail::tri_index(i, j, k)];
      err = std::max(err, r.error[detail::tri_index(i, j, k)]);
    }
  fm.score_mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
  const double sc = fm.scale();
  fm.error_estimate = sc > 0.0 ? err / sc : err;
  return fm;
}

/// max |Hessian form - score-product form| / matrix scale.
inline double fisher_hessian_check(const DistributionSpec& spec, const ParamVector& a, const FisherOptions& opts = {}) {
  const auto fm = fisher_matrix(spec, a, opts);
  const auto hm = fisher_matrix_hessian(spec, a, opts);
  const double sc = fm.scale();
  return (fm.entries - hm.entries).cwiseAbs().maxCoeff() / (sc > 0.0 ? sc : 1.0);
}

/// sqrt(det I(a)), unnormalized.
inline double jeffreys_density(const DistributionSpec& spec, const ParamVector& a, const FisherOptions& opts = {}) {
  const auto fm = fisher_matrix(spec, a, opts);
  const double det = fm.entries.determinant();
  const double sc = std::pow(fm.scale(), static_cast<double>(fm.k()));
  if (det < 0.0) {
    if (det < -1e-10 * sc) throw NumericPsdError(spec.family_id + ": negative Fisher determinant");
    return 0.0;
  }
  return std::sqrt(det);
}

struct CramerRaoBound {
  double value;
  bool infinite;  // zero information
};

/// 1 / (n I(a)) for a scalar parameter.
inline CramerRaoBound cramer_rao_bound(const DistributionSpec& spec, const ParamVector& a, long long n,
                                       const FisherOptions& opts = {}) {
  if (n <= 0) throw DomainError("cramer_rao_bound: n must be a positive integer");
  const double info = fisher_scalar(spec, a, opts);
  if (!(info > 0.0)) return {std::numeric_limits<double>::infinity(), true};
  return {1.0 / (static_cast<double>(n) * info), false};
}

}  // namespace versatility
