#pragma once

// Special-function helpers used by the log-density and score evaluators.
//
// Point values of digamma / trigamma / log-gamma come from Boost.Math. The
// helpers below add the shifted differences lnG(t+a) - lnG(t+b) and
// psi(t+a) - psi(t+b), evaluated without cancellation for t up to
// exp(1e300) via Stirling expansions around the common shift t.

#include <cmath>
#include <limits>

#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "versatility/outcome.hpp"

namespace versatility::special {

inline constexpr double kEulerGamma = 0.57721566490153286061;
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogSqrtTwoPi = 0.91893853320467274178;

inline double digamma(double x) { return boost::math::digamma(x); }
inline double trigamma(double x) { return boost::math::trigamma(x); }

/// a * ln(y) given ln(y), with the convention 0 * ln(0) = 0.
inline double xlogy(double a, double log_y) noexcept { return a == 0.0 ? 0.0 : a * log_y; }

/// ln(1 - exp(x)) for x <= 0.
inline double log1mexp(double x) noexcept {
  if (x > -0.6931471805599453) return std::log(-std::expm1(x));
  return std::log1p(-std::exp(x));
}

/// x - 1 - ln(x), accurate near x = 1.
inline double x_minus_one_minus_log(double x) noexcept {
  const double d = x - 1.0;
  if (std::abs(d) < 1e-3) {
    const double d2 = d * d;
    return d2 * (0.5 - d / 3.0 + d2 / 4.0 - d2 * d / 5.0 + d2 * d2 / 6.0);
  }
  return d - std::log1p(d);
}

namespace detail {

// lnG(x) - [(x - 1/2) ln x - x + ln sqrt(2 pi)], for x >= 15.
inline double stirling_remainder(double x) noexcept {
  if (std::isinf(x)) return 0.0;
  const double r = 1.0 / x;
  const double r2 = r * r;
  return r * (1.0 / 12.0 +
              r2 * (-1.0 / 360.0 +
                    r2 * (1.0 / 1260.0 +
                          r2 * (-1.0 / 1680.0 + r2 * (1.0 / 1188.0 + r2 * (-691.0 / 360360.0 + r2 / 156.0))))));
}

// psi(x) - ln(x), for x >= 30.
inline double digamma_remainder(double x) noexcept {
  if (std::isinf(x)) return 0.0;
  const double r = 1.0 / x;
  const double r2 = r * r;
  return -0.5 * r -
         r2 * (1.0 / 12.0 - r2 * (1.0 / 120.0 - r2 * (1.0 / 252.0 - r2 * (1.0 / 240.0 - r2 / 132.0))));
}

// t * log1p(a / t) - a, finite as t -> inf.
inline double shifted_log_excess(double t, double a) noexcept {
  if (std::isinf(t)) return 0.0;
  const double z = a / t;
  if (std::abs(z) < 1e-4) return a * z * (-0.5 + z * (1.0 / 3.0 - z * 0.25));
  return t * std::log1p(z) - a;
}

inline double log1p_ratio(double t, double a) noexcept { return std::isinf(t) ? 0.0 : std::log1p(a / t); }

}  // namespace detail

/// lnG(t + a) - lnG(t + b).
inline double log_gamma_ratio(const Outcome& t, double a, double b) {
  const double T = t.value;
  if (T >= 15.0 && T + a >= 15.0 && T + b >= 15.0) {
    const double la = detail::log1p_ratio(T, a);
    const double lb = detail::log1p_ratio(T, b);
    return (a - b) * t.log_value + detail::shifted_log_excess(T, a) - detail::shifted_log_excess(T, b) +
           (a - 0.5) * la - (b - 0.5) * lb + detail::stirling_remainder(T + a) - detail::stirling_remainder(T + b);
  }
  return std::lgamma(T + a) - std::lgamma(T + b);
}

/// psi(t + c).
inline double digamma_shifted(const Outcome& t, double c) {
  const double T = t.value;
  if (T >= 30.0 && T + c >= 30.0) return t.log_value + detail::log1p_ratio(T, c) + detail::digamma_remainder(T + c);
  return digamma(T + c);
}

/// psi(t + a) - psi(t + b).
inline double digamma_difference(const Outcome& t, double a, double b) {
  const double T = t.value;
  if (T >= 30.0 && T + a >= 30.0 && T + b >= 30.0) {
    return detail::log1p_ratio(T, a) - detail::log1p_ratio(T, b) + detail::digamma_remainder(T + a) -
           detail::digamma_remainder(T + b);
  }
  return digamma(T + a) - digamma(T + b);
}

}  // namespace versatility::special
