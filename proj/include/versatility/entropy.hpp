#pragma once

// Simplicity measures of a single distribution: Shannon (or differential)
// entropy, its exponential, and power means of the density.

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>

#include "versatility/distribution.hpp"
#include "versatility/errors.hpp"
#include "versatility/expectation.hpp"

namespace versatility {

enum class EntropyKind { Shannon, Differential };

inline std::string_view to_string(EntropyKind k) { return k == EntropyKind::Shannon ? "Shannon" : "Differential"; }

struct EntropyResult {
  double value = 0.0;  // nats
  EntropyKind kind = EntropyKind::Shannon;
  double numeric_error_estimate = 0.0;
};

namespace detail {

// Entropy and power means are defined only where the formula is a proper
// distribution.
inline void require_proper(const DistributionSpec& spec, const ParamVector& a) {
  spec.validate(a);
  if (!spec.admissibility_note) return;
  const std::string note = spec.admissibility_note(a.values());
  if (!note.empty()) throw NonNormalizableError(spec.family_id + ": " + note);
}

}  // namespace detail

/// E[-ln f(W)]. Zero-density outcomes contribute nothing.
inline EntropyResult shannon_entropy(const DistributionSpec& spec, const ParamVector& a,
                                     const ExpectationOptions& opts = {}) {
  detail::require_proper(spec, a);
  auto g = [](const Outcome&, double log_f, std::span<double> out) {
    out[0] = -log_f;
    return std::isfinite(log_f);
  };
  // Absolute floor of one nat: entropies near zero are still resolved to rel_tol.
  auto scale = [](std::span<const double> est, std::span<double> s) { s[0] = std::max(std::abs(est[0]), 1.0); };
  ExpectationResult r;
  try {
    r = expectation(spec, a.values(), 1, g, scale, opts);
  } catch (const DivergenceError& e) {
    throw DivergentEntropyError(e.what());
  }
  if (r.divergent_component) throw DivergentEntropyError(spec.family_id + ": entropy does not converge");
  return {r.value[0], spec.is_discrete() ? EntropyKind::Shannon : EntropyKind::Differential, r.error[0]};
}

/// e^H, the geometric mean of 1/f(W).
inline double exponentiated_entropy(const DistributionSpec& spec, const ParamVector& a,
                                    const ExpectationOptions& opts = {}) {
  return std::exp(shannon_entropy(spec, a, opts).value);
}

/// Which power mean power_mean_simplicity reports.
enum class PowerMeanConvention {
  /// (E[f(W)^p])^{-1/p}: the inverse of the p-th power mean of f. At p = 1 this
  /// is the inverse Herfindahl-Hirschman index.
  Density,
  /// (E[f(W)^{-p}])^{1/p}: the p-th power mean of 1/f. Infinite for every
  /// continuous family at p >= 1.
  Reciprocal
};

struct PowerMeanResult {
  double value = 0.0;  // +inf when divergent
  bool divergent = false;
  double numeric_error_estimate = 0.0;
};

/// Power-mean simplicity of order p > 0. Both conventions tend to e^H as
/// p -> 0+. Divergence is reported in the result, not thrown.
inline PowerMeanResult power_mean_simplicity(const DistributionSpec& spec, const ParamVector& a, double p,
                                             PowerMeanConvention convention = PowerMeanConvention::Density,
                                             const ExpectationOptions& opts = {}) {
  if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("power mean order must be positive and finite");
  detail::require_proper(spec, a);
  const double e = convention == PowerMeanConvention::Density ? p : -p;
  auto g = [e](const Outcome&, double log_f, std::span<double> out) {
    out[0] = std::exp(e * log_f);
    return std::isfinite(out[0]);
  };
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ExpectationResult r;
  try {
    r = expectation(spec, a.values(), 1, g, {}, opts);
  } catch (const DivergenceError&) {
    return {kInf, true, 0.0};
  }
  if (r.divergent_component || !std::isfinite(r.value[0]) || !(r.value[0] > 0.0)) return {kInf, true, 0.0};
  // Work with ln E so that small p keeps full relative accuracy.
  const double log_m = std::log(r.value[0]);
  const double value = std::exp(-log_m / e);
  return {value, false, value * std::abs(r.error[0] / r.value[0]) / p};
}

}  // namespace versatility
