#pragma once

#include <cmath>
#include <limits>

namespace versatility {

/// A point of the outcome space carried together with its logarithm.
///
/// Heavy-tailed families are integrated far beyond the range of a double
/// (Waring with a small tail index keeps mass out to w ~ exp(1e4)), so
/// densities must be evaluable from the log of the outcome alone. `value`
/// saturates to +inf there while `log_value` stays exact.
struct Outcome {
  double value;
  double log_value;

  static Outcome at(double w) noexcept { return {w, w > 0.0 ? std::log(w) : -std::numeric_limits<double>::infinity()}; }
  static Outcome from_log(double s) noexcept { return {std::exp(s), s}; }

  bool is_zero() const noexcept { return value == 0.0; }
};

}  // namespace versatility
