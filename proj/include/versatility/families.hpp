#pragma once

// The distribution families over their canonical parameters.
//
// Canonical parameters (all on (0, inf) except where noted):
//   exponential     (lambda)            lambda e^{-lambda y}
//   gamma           (r, lambda)         lambda^r y^{r-1} e^{-lambda y} / G(r)
//   weibull         (lambda, tau)       tau lambda y^{tau-1} e^{-lambda y^tau}
//   pareto2         (alpha, theta)      alpha theta^alpha / (y + theta)^{alpha+1}
//   lognormal       (nu, sigma)         location ln(nu), scale sigma
//   gengamma        (r, lambda, tau)    tau lambda^r y^{tau r-1} e^{-lambda y^tau} / G(r)
//   negbinom        (r, m)              success probability m/(m+1)
//   discreteweibull (m, tau)            q^{x^tau} - q^{(x+1)^tau}, q = 1/(m+1)
//   waring          (alpha, theta)
//   genpoisson      (lambda, varsigma)  varsigma may be 0; improper for varsigma >= 1
//   geometric       (m)                 (m/(m+1)) (1/(m+1))^x
//   poisson         (lambda)
//
// Every log-density reads the outcome through Outcome::log_value wherever
// the outcome may exceed the double range.

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "versatility/distribution.hpp"
#include "versatility/errors.hpp"
#include "versatility/outcome.hpp"
#include "versatility/special.hpp"

namespace versatility::families {

namespace detail {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(y + c) for c >= 0.
inline double log_shift(const Outcome& w, double c) {
  if (w.value >= c && w.value > 0.0) return w.log_value + std::log1p(c / w.value);
  return std::log(w.value + c);
}

// y^tau = exp(tau ln y), 0 at y = 0.
inline double power(const Outcome& w, double tau) { return w.is_zero() ? 0.0 : std::exp(tau * w.log_value); }

// (y^tau) ln y, 0 at y = 0.
inline double power_log(const Outcome& w, double tau) {
  if (w.is_zero()) return 0.0;
  const double p = std::exp(tau * w.log_value);
  return p == 0.0 ? 0.0 : p * w.log_value;
}

// x c - lnG(x + 1), safe for x beyond the double range.
inline double log_poisson_kernel(const Outcome& w, double c) {
  const double x = w.value;
  if (x < 15.0) return (x == 0.0 ? 0.0 : x * c) - std::lgamma(x + 1.0);
  // lnG(x+1) = (x + 1/2) ln x - x + ln sqrt(2 pi) + R(x)
  const double lin = c + 1.0 - w.log_value;
  const double head = std::isinf(x) ? (lin < 0.0 ? -kInf : (lin > 0.0 ? kInf : 0.0)) : x * lin;
  return head - 0.5 * w.log_value - special::kLogSqrtTwoPi - special::detail::stirling_remainder(x);
}

// ln( q^{x^tau} - q^{(x+1)^tau} ) with c = -ln q > 0.
inline double log_discrete_weibull(const Outcome& w, double c, double tau) {
  if (w.is_zero()) return special::log1mexp(-c);
  const double s = w.log_value;
  const double A = std::exp(tau * s);
  if (std::isinf(A)) return -kInf;
  // z = tau ln(1 + 1/x); log of (x+1)^tau - x^tau = tau s + ln(expm1(z)).
  const double log_l1p = s > 30.0 ? -s - 0.5 * std::exp(-s) : std::log(std::log1p(std::exp(-s)));
  const double log_z = std::log(tau) + log_l1p;
  const double z = std::exp(log_z);
  const double log_em = z < 1e-5 ? log_z + z / 2.0 + z * z / 24.0 : std::log(std::expm1(z));
  const double log_eps = std::log(c) + tau * s + log_em;  // ln(c (B - A))
  double tail;
  if (log_eps < -20.0) {
    const double eps = std::exp(log_eps);
    tail = log_eps - eps / 2.0;
  } else {
    tail = special::log1mexp(-std::exp(log_eps));
  }
  return -c * A + tail;
}

// Score of the Discrete Weibull log-pmf in (c, tau), c = -ln q:
//   d/dc   = -A + phi / c
//   d/dtau = -c A ln x + phi (D'/D)
// with A = x^tau, D = (x+1)^tau - x^tau, phi = cD / expm1(cD) and
// D'/D = ln x + z / (tau (1 - e^{-z})), z = tau ln(1 + 1/x).
inline void score_discrete_weibull(const Outcome& w, double c, double tau, double& d_c, double& d_tau) {
  if (w.is_zero()) {
    d_c = 1.0 / std::expm1(c);
    d_tau = 0.0;
    return;
  }
  const double s = w.log_value;
  const double A = std::exp(tau * s);
  const double log_l1p = s > 30.0 ? -s - 0.5 * std::exp(-s) : std::log(std::log1p(std::exp(-s)));
  const double log_z = std::log(tau) + log_l1p;
  const double z = std::exp(log_z);
  const double log_em = z < 1e-5 ? log_z + z / 2.0 + z * z / 24.0 : std::log(std::expm1(z));
  const double eps = std::exp(std::log(c) + tau * s + log_em);  // c D
  const double phi = eps < 1e-8 ? 1.0 - eps / 2.0 : (std::isinf(eps) ? 0.0 : eps / std::expm1(eps));
  const double ratio = z < 1e-5 ? 1.0 + z / 2.0 : z / (-std::expm1(-z));
  const double dlogD = s + ratio / tau;
  d_c = -A + phi / c;
  d_tau = -c * A * s + phi * dlogD;
}

inline Eigen::MatrixXd mat2(double a, double b, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, b, d;
  return m;
}

inline Eigen::MatrixXd mat1(double a) {
  Eigen::MatrixXd m(1, 1);
  m << a;
  return m;
}

}  // namespace detail

using detail::kInf;

inline std::shared_ptr<const DistributionSpec> exponential() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "exponential";
  s->display_name = "Exponential";
  s->support = SupportKind::ContinuousNonNegativeReals;
  s->param_names = {"lambda"};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    const double l = a[0];
    return std::log(l) - l * w.value;
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    out[0] = 1.0 / a[0] - w.value;
  };
  s->analytic_fisher = [](std::span<const double> a) { return detail::mat1(1.0 / (a[0] * a[0])); };
  return s;
}

inline std::shared_ptr<const DistributionSpec> gamma() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "gamma";
  s->display_name = "Gamma";
  s->support = SupportKind::ContinuousNonNegativeReals;
  s->param_names = {"r", "lambda"};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    const double r = a[0], l = a[1];
    return r * std::log(l) + special::xlogy(r - 1.0, w.log_value) - l * w.value - std::lgamma(r);
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    const double r = a[0], l = a[1];
    out[0] = std::log(l) - special::digamma(r) + w.log_value;
    out[1] = r / l - w.value;
  };
  s->analytic_fisher = [](std::span<const double> a) {
    const double r = a[0], l = a[1];
    return detail::mat2(special::trigamma(r), -1.0 / l, r / (l * l));
  };
  return s;
}

inline std::shared_ptr<const DistributionSpec> weibull() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "weibull";
  s->display_name = "Weibull";
  s->support = SupportKind::ContinuousNonNegativeReals;
  s->param_names = {"lambda", "tau"};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    const double l = a[0], t = a[1];
    return std::log(t) + std::log(l) + special::xlogy(t - 1.0, w.log_value) - l * detail::power(w, t);
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    const double l = a[0], t = a[1];
    out[0] = 1.0 / l - detail::power(w, t);
    out[1] = 1.0 / t + w.log_value - l * detail::power_log(w, t);
  };
  s->analytic_fisher = [](std::span<const double> a) {
    const double l = a[0], t = a[1];
    const double ll = std::log(l);
    const double psi2 = 1.0 - special::kEulerGamma;
    const double psi1_2 = special::kPi * special::kPi / 6.0 - 1.0;
    return detail::mat2(1.0 / (l * l), (psi2 - ll) / (l * t),
                        (1.0 + psi1_2 + psi2 * psi2 - 2.0 * ll * psi2 + ll * ll) / (t * t));
  };
  return s;
}

inline std::shared_ptr<const DistributionSpec> pareto2() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "pareto2";
  s->display_name = "Pareto 2";
  s->support = SupportKind::ContinuousNonNegativeReals;
  s->param_names = {"alpha", "theta"};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    const double al = a[0], th = a[1];
    return std::log(al) + al * std::log(th) - (al + 1.0) * detail::log_shift(w, th);
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    const double al = a[0], th = a[1];
    out[0] = 1.0 / al + std::log(th) - detail::log_shift(w, th);
    out[1] = al / th - (al + 1.0) / (w.value + th);
  };
  s->analytic_fisher = [](std::span<const double> a) {
    const double al = a[0], th = a[1];
    return detail::mat2(1.0 / (al * al), -1.0 / (th * (al + 1.0)), al / (th * th * (al + 2.0)));
  };
  return s;
}

inline std::shared_ptr<const DistributionSpec> lognormal() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "lognormal";
  s->display_name = "Lognormal";
  s->support = SupportKind::ContinuousNonNegativeReals;
  s->param_names = {"nu", "sigma"};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    if (w.is_zero()) return -kInf;
    const double z = (w.log_value - std::log(a[0])) / a[1];
    return -0.5 * z * z - std::log(a[1]) - w.log_value - special::kLogSqrtTwoPi;
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    const double nu = a[0], sg = a[1];
    const double z = w.log_value - std::log(nu);
    out[0] = z / (sg * sg * nu);
    out[1] = -1.0 / sg + z * z / (sg * sg * sg);
  };
  s->analytic_fisher = [](std::span<const double> a) {
    const double nu = a[0], sg = a[1];
    return detail::mat2(1.0 / (sg * sg * nu * nu), 0.0, 2.0 / (sg * sg));
  };
  return s;
}

inline std::shared_ptr<const DistributionSpec> gengamma() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "gengamma";
  s->display_name = "Generalized Gamma";
  s->support = SupportKind::ContinuousNonNegativeReals;
  s->param_names = {"r", "lambda", "tau"};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    const double r = a[0], l = a[1], t = a[2];
    return std::log(t) + r * std::log(l) + special::xlogy(t * r - 1.0, w.log_value) - l * detail::power(w, t) -
           std::lgamma(r);
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    const double r = a[0], l = a[1], t = a[2];
    out[0] = std::log(l) + special::xlogy(t, w.log_value) - special::digamma(r);
    out[1] = r / l - detail::power(w, t);
    out[2] = 1.0 / t + special::xlogy(r, w.log_value) - l * detail::power_log(w, t);
  };
  return s;
}

inline std::shared_ptr<const DistributionSpec> negbinom() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "negbinom";
  s->display_name = "Negative Binomial";
  s->support = SupportKind::DiscreteNonNegativeIntegers;
  s->param_names = {"r", "m"};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    const double r = a[0], m = a[1];
    const double x = w.value;
    const double tail = x == 0.0 ? 0.0 : -x * std::log1p(m);
    return special::log_gamma_ratio(w, r, 1.0) - std::lgamma(r) - r * std::log1p(1.0 / m) + tail;
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    const double r = a[0], m = a[1];
    out[0] = special::digamma_shifted(w, r) - special::digamma(r) - std::log1p(1.0 / m);
    out[1] = r / (m * (m + 1.0)) - w.value / (m + 1.0);
  };
  return s;
}

inline std::shared_ptr<const DistributionSpec> discreteweibull() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "discreteweibull";
  s->display_name = "Discrete Weibull";
  s->support = SupportKind::DiscreteNonNegativeIntegers;
  s->param_names = {"m", "tau"};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    return detail::log_discrete_weibull(w, std::log1p(a[0]), a[1]);
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    double d_c = 0.0, d_tau = 0.0;
    detail::score_discrete_weibull(w, std::log1p(a[0]), a[1], d_c, d_tau);
    out[0] = d_c / (1.0 + a[0]);
    out[1] = d_tau;
  };
  return s;
}

inline std::shared_ptr<const DistributionSpec> waring() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "waring";
  s->display_name = "Waring";
  s->support = SupportKind::DiscreteNonNegativeIntegers;
  s->param_names = {"alpha", "theta"};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    const double al = a[0], th = a[1];
    return std::log(al) + std::lgamma(al + th) - std::lgamma(th) + special::log_gamma_ratio(w, th, al + th + 1.0);
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    const double al = a[0], th = a[1];
    const double psi_at = special::digamma(al + th);
    out[0] = 1.0 / al + psi_at - special::digamma_shifted(w, al + th + 1.0);
    out[1] = psi_at - special::digamma(th) + special::digamma_difference(w, th, al + th + 1.0);
  };
  return s;
}

inline std::shared_ptr<const DistributionSpec> genpoisson() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "genpoisson";
  s->display_name = "Generalized Poisson";
  s->support = SupportKind::DiscreteNonNegativeIntegers;
  s->param_names = {"lambda", "varsigma"};
  s->zero_allowed = {false, true};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    const double l = a[0], v = a[1];
    const double x = w.value;
    if (v == 0.0) return detail::log_poisson_kernel(w, std::log(l)) - l;
    if (x < 15.0) return std::log(l) - v * x - l + (x - 1.0) * std::log(v * x + l) - std::lgamma(x + 1.0);
    // Stirling form of -lnG(x + 1), grouped so that x = inf stays finite-or-(-inf).
    const double L = std::log1p(l / (v * x));
    const double cross = std::isinf(x) ? special::detail::shifted_log_excess(x, l / v) + l / v - L : (x - 1.0) * L;
    const double decay = special::x_minus_one_minus_log(v);  // v - 1 - ln v >= 0
    const double lin = decay == 0.0 ? 0.0 : -x * decay;
    return std::log(l) - l + lin - std::log(v) + cross - 1.5 * w.log_value - special::kLogSqrtTwoPi -
           special::detail::stirling_remainder(x);
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    const double l = a[0], v = a[1];
    const double x = w.value;
    const double d = v * x + l;
    out[0] = 1.0 / l - 1.0 + (x - 1.0) / d;
    out[1] = x * ((1.0 - v) * x - 1.0 - l) / d;
  };
  s->admissibility_note = [](std::span<const double> a) -> std::string {
    return a[1] >= 1.0 ? "varsigma >= 1: probabilities do not sum to one" : "";
  };
  return s;
}

inline std::shared_ptr<const DistributionSpec> geometric() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "geometric";
  s->display_name = "Geometric";
  s->support = SupportKind::DiscreteNonNegativeIntegers;
  s->param_names = {"m"};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    const double m = a[0];
    const double tail = w.value == 0.0 ? 0.0 : -w.value * std::log1p(m);
    return -std::log1p(1.0 / m) + tail;
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    const double m = a[0];
    out[0] = 1.0 / (m * (m + 1.0)) - w.value / (m + 1.0);
  };
  s->analytic_fisher = [](std::span<const double> a) {
    const double m = a[0];
    return detail::mat1(1.0 / (m * m * (m + 1.0)));
  };
  return s;
}

inline std::shared_ptr<const DistributionSpec> poisson() {
  auto s = std::make_shared<DistributionSpec>();
  s->family_id = "poisson";
  s->display_name = "Poisson";
  s->support = SupportKind::DiscreteNonNegativeIntegers;
  s->param_names = {"lambda"};
  s->log_density = [](const Outcome& w, std::span<const double> a) {
    return detail::log_poisson_kernel(w, std::log(a[0])) - a[0];
  };
  s->analytic_score = [](const Outcome& w, std::span<const double> a, std::span<double> out) {
    out[0] = w.value / a[0] - 1.0;
  };
  s->analytic_fisher = [](std::span<const double> a) { return detail::mat1(1.0 / a[0]); };
  return s;
}

/// All families keyed by their stable identifier.
inline const std::map<std::string, std::shared_ptr<const DistributionSpec>>& registry() {
  static const std::map<std::string, std::shared_ptr<const DistributionSpec>> r = {
      {"exponential", exponential()},
      {"gamma", gamma()},
      {"weibull", weibull()},
      {"pareto2", pareto2()},
      {"lognormal", lognormal()},
      {"gengamma", gengamma()},
      {"negbinom", negbinom()},
      {"discreteweibull", discreteweibull()},
      {"waring", waring()},
      {"genpoisson", genpoisson()},
      {"geometric", geometric()},
      {"poisson", poisson()},
  };
  return r;
}

inline std::shared_ptr<const DistributionSpec> family(const std::string& id) {
  const auto& r = registry();
  auto it = r.find(id);
  if (it == r.end()) throw CatalogError("unknown family '" + id + "'");
  return it->second;
}

}  // namespace versatility::families
