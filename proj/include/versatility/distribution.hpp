#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "versatility/errors.hpp"
#include "versatility/outcome.hpp"

namespace versatility {

enum class SupportKind { DiscreteNonNegativeIntegers, ContinuousNonNegativeReals };

inline std::string_view to_string(SupportKind s) {
  return s == SupportKind::DiscreteNonNegativeIntegers ? "discrete" : "continuous";
}

/// Ordered, named parameter values.
class ParamVector {
 public:
  ParamVector() = default;
  ParamVector(std::vector<std::string> names, std::vector<double> values)
      : names_(std::move(names)), values_(std::move(values)) {
    if (names_.size() != values_.size())
      throw ParameterArityError("parameter names and values differ in length");
    if (names_.empty()) throw ParameterArityError("a parameter vector needs at least one entry");
    for (std::size_t i = 0; i < names_.size(); ++i) {
      for (std::size_t j = i + 1; j < names_.size(); ++j)
        if (names_[i] == names_[j]) throw ParameterArityError("duplicate parameter name '" + names_[i] + "'");
      if (!std::isfinite(values_[i])) throw DomainError("parameter '" + names_[i] + "' is not finite");
    }
  }

  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<std::string>& names() const noexcept { return names_; }

  std::optional<std::size_t> index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - names_.begin());
  }

 private:
  std::vector<std::string> names_;
  std::vector<double> values_;
};

using LogDensityFn = std::function<double(const Outcome&, std::span<const double>)>;
using ScoreFn = std::function<void(const Outcome&, std::span<const double>, std::span<double>)>;
using FisherFn = std::function<Eigen::MatrixXd(std::span<const double>)>;

/// A distribution family over its canonical parameters.
///
/// `log_density` must accept any real outcome in the support (discrete
/// families are evaluated off the integers when the expectation engine
/// integrates their tails), returns -inf where the density vanishes and
/// +inf at an integrable pole. Callers go through eval_log_density for
/// validated access.
struct DistributionSpec {
  std::string family_id;
  std::string display_name;
  SupportKind support = SupportKind::ContinuousNonNegativeReals;
  std::vector<std::string> param_names;
  /// Parameters that may also take the value zero (GenPoisson's varsigma).
  std::vector<bool> zero_allowed;
  LogDensityFn log_density;
  ScoreFn analytic_score;    // optional
  FisherFn analytic_fisher;  // optional
  /// Optional diagnostic for parameter points where the formula is not a
  /// proper distribution. Empty string means admissible.
  std::function<std::string(std::span<const double>)> admissibility_note;

  std::size_t arity() const noexcept { return param_names.size(); }
  bool is_discrete() const noexcept { return support == SupportKind::DiscreteNonNegativeIntegers; }
  bool has_analytic_fisher() const noexcept { return static_cast<bool>(analytic_fisher); }
  bool has_analytic_score() const noexcept { return static_cast<bool>(analytic_score); }

  /// Arity and domain checks; throws ParameterArityError / DomainError.
  void validate(const ParamVector& a) const {
    if (a.size() != arity())
      throw ParameterArityError(family_id + " expects " + std::to_string(arity()) + " parameters, got " +
                                std::to_string(a.size()));
    for (std::size_t i = 0; i < arity(); ++i) {
      if (a.names()[i] != param_names[i])
        throw ParameterArityError(family_id + " parameter " + std::to_string(i) + " is '" + param_names[i] +
                                  "', got '" + a.names()[i] + "'");
      const bool zero_ok = i < zero_allowed.size() && zero_allowed[i];
      if (a[i] < 0.0 || (a[i] == 0.0 && !zero_ok))
        throw DomainError(family_id + " parameter '" + param_names[i] + "' must be positive");
    }
  }

  ParamVector params(std::vector<double> values) const { return ParamVector(param_names, std::move(values)); }
};

inline void check_support(const DistributionSpec& spec, double w) {
  if (!std::isfinite(w) || w < 0.0) throw SupportError(spec.family_id + ": outcome outside [0, inf)");
  if (spec.is_discrete() && w != std::floor(w))
    throw SupportError(spec.family_id + ": outcome must be a non-negative integer");
}

/// ln f(w | a). -inf at zero-density points, +inf at a pole of the density
/// (Gamma with r < 1 or Weibull with tau < 1 at w = 0).
inline double eval_log_density(const DistributionSpec& spec, double w, const ParamVector& a) {
  spec.validate(a);
  check_support(spec, w);
  const double v = spec.log_density(Outcome::at(w), a.values());
  if (std::isnan(v)) throw DomainError(spec.family_id + ": log-density is undefined at this point");
  return v;
}

inline bool is_pole(double log_density) noexcept { return log_density == std::numeric_limits<double>::infinity(); }

}  // namespace versatility
