#pragma once

// Prior expectation of the Fisher information and the versatility measure
// V = det(E[I(a)])^{1/(2k)}, a_j iid Lognormal.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "versatility/catalog.hpp"
#include "versatility/distribution.hpp"
#include "versatility/errors.hpp"
#include "versatility/fisher.hpp"
#include "versatility/quadrature.hpp"

namespace versatility {

enum class QuadratureScheme { GaussHermite, QuasiMonteCarlo };

/// What to do with prior mass on parameter points where the family is not
/// a proper distribution (Generalized Poisson with varsigma >= 1).
enum class ImproperPolicy {
  Reject,    // PolicyError
  Full,      // integrate over the whole prior, recording the mass residual
  Truncated  // drop those points and renormalize the prior
};

inline std::string_view to_string(ImproperPolicy p) {
  switch (p) {
    case ImproperPolicy::Reject: return "reject";
    case ImproperPolicy::Full: return "full";
    case ImproperPolicy::Truncated: return "truncated";
  }
  return "";
}

struct LognormalMarginal {
  double log_mean = 0.0;
  double log_sd = 1.0;
};

struct PriorSpec {
  /// Per-parameter marginals; missing entries default to Lognormal(0, 1).
  std::vector<LognormalMarginal> marginals;
  std::size_t nodes = 64;  // per dimension, >= 16
  QuadratureScheme scheme = QuadratureScheme::GaussHermite;
  /// Sample count for the quasi-random rule, used when k > 3.
  std::size_t mc_samples = 8192;
  std::uint64_t seed = 20170101;
  /// Tensor nodes whose weight falls below this are skipped.
  double prune_weight = 1e-20;
  ImproperPolicy policy = ImproperPolicy::Reject;
  /// Re-run with half the nodes to estimate the quadrature error.
  bool estimate_error = true;
  FisherOptions fisher{};

  LognormalMarginal marginal(std::size_t j) const { return j < marginals.size() ? marginals[j] : LognormalMarginal{}; }
};

struct BayesianFim {
  Eigen::MatrixXd mean;
  std::size_t points = 0;         // prior nodes evaluated
  double excluded_weight = 0.0;   // prior weight dropped by truncation
  double max_mass_residual = 0.0; // largest |sum f - 1| over evaluated nodes
  std::size_t improper_points = 0;
  std::optional<std::string> divergence;  // first failing node, if any
};

namespace detail {

struct PriorNode {
  std::vector<double> u;  // standard normal coordinates
  double weight;
};

inline std::vector<PriorNode> prior_nodes(std::size_t k, const PriorSpec& prior, std::size_t nodes) {
  if (nodes < 16) throw DomainError("prior quadrature needs at least 16 nodes per dimension");
  std::vector<PriorNode> out;
  const bool qmc = prior.scheme == QuadratureScheme::QuasiMonteCarlo || k > 3;
  if (qmc) {
    const auto pts = quadrature::sobol_normal_points(k, prior.mc_samples, prior.seed);
    const double w = 1.0 / static_cast<double>(pts.size());
    for (const auto& p : pts) out.push_back({p, w});
    return out;
  }
  const auto rule = quadrature::gauss_hermite(nodes);
  std::vector<std::size_t> idx(k, 0);
  while (true) {
    double w = 1.0;
    std::vector<double> u(k);
    for (std::size_t j = 0; j < k; ++j) {
      w *= rule.weights[idx[j]];
      u[j] = rule.nodes[idx[j]];
    }
    if (w >= prior.prune_weight) out.push_back({std::move(u), w});
    std::size_t j = 0;
    while (j < k && ++idx[j] == nodes) idx[j++] = 0;
    if (j == k) break;
  }
  return out;
}

// Fisher information in the parameterization's coordinates.
inline Eigen::MatrixXd coordinate_fisher(const DistributionSpec& spec, const std::vector<ParamScale>& scales,
                                         const std::vector<double>& a, const FisherOptions& opts,
                                         double* mass_residual) {
  const ParamVector pv(spec.param_names, a);
  const FisherMatrix fm = fisher_matrix(spec, pv, opts);
  if (mass_residual) *mass_residual = std::abs(fm.mass - 1.0);
  Eigen::MatrixXd I = fm.entries;
  for (std::size_t j = 0; j < scales.size(); ++j)
    if (scales[j] == ParamScale::Log) {
      I.row(static_cast<Eigen::Index>(j)) *= a[j];
      I.col(static_cast<Eigen::Index>(j)) *= a[j];
    }
  return I;
}

inline BayesianFim bayesian_fim_impl(const DistributionSpec& spec, const std::vector<ParamScale>& scales,
                                     const PriorSpec& prior, std::size_t nodes) {
  const std::size_t k = spec.arity();
  BayesianFim out;
  out.mean = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  const auto pts = prior_nodes(k, prior, nodes);
  double kept = 0.0;
  std::vector<double> a(k);
  for (const auto& node : pts) {
    for (std::size_t j = 0; j < k; ++j) {
      const auto m = prior.marginal(j);
      a[j] = std::exp(m.log_mean + m.log_sd * node.u[j]);
    }
    if (spec.admissibility_note) {
      const std::string note = spec.admissibility_note(a);
      if (!note.empty()) {
        if (prior.policy == ImproperPolicy::Reject)
          throw PolicyError(spec.family_id + ": prior puts mass where " + note +
                            "; choose the full or truncated policy");
        ++out.improper_points;
        if (prior.policy == ImproperPolicy::Truncated) {
          out.excluded_weight += node.weight;
          continue;
        }
      }
    }
    double residual = 0.0;
    Eigen::MatrixXd I;
    try {
      I = coordinate_fisher(spec, scales, a, prior.fisher, &residual);
    } catch (const DivergenceError& e) {
      if (!out.divergence) out.divergence = e.what();
      continue;
    }
    out.max_mass_residual = std::max(out.max_mass_residual, residual);
    out.mean += node.weight * I;
    kept += node.weight;
    ++out.points;
  }
  if (kept > 0.0) out.mean /= kept;
  return out;
}

inline double det_root(const Eigen::MatrixXd& m, const std::string& who) {
  const double det = m.determinant();
  if (!(det > 0.0) || !std::isfinite(det)) throw NumericPsdError(who + ": Bayesian Fisher determinant is not positive");
  return std::pow(det, 1.0 / (2.0 * static_cast<double>(m.rows())));
}

}  // namespace detail

/// E_prior[I(a)] for a family over its own parameters (linear coordinates).
inline BayesianFim bayesian_fim(const DistributionSpec& spec, const PriorSpec& prior = {}) {
  return detail::bayesian_fim_impl(spec, std::vector<ParamScale>(spec.arity(), ParamScale::Linear), prior,
                                   prior.nodes);
}

/// E_prior[I(a)] in the coordinates of a parameterization.
inline BayesianFim bayesian_fim(const Parameterization& p, const PriorSpec& prior = {}) {
  return detail::bayesian_fim_impl(p.spec(), p.scales(), prior, prior.nodes);
}

struct ParameterizationVersatility {
  std::string label;
  double value = 0.0;
  double error_estimate = 0.0;  // relative change under node halving
  std::size_t symbols = 0;
  BayesianFim fim;
};

/// det(E[I])^{1/(2k)} for one parameterization.
inline ParameterizationVersatility versatility(const Parameterization& p, const PriorSpec& prior = {}) {
  ParameterizationVersatility r;
  r.label = p.label();
  r.symbols = p.symbol_count();
  r.fim = bayesian_fim(p, prior);
  if (r.fim.divergence) throw DivergenceError(*r.fim.divergence);
  r.value = detail::det_root(r.fim.mean, p.spec().family_id);
  const bool gh = prior.scheme == QuadratureScheme::GaussHermite && p.arity() <= 3;
  if (prior.estimate_error && gh) {
    const auto half = detail::bayesian_fim_impl(p.spec(), p.scales(), prior, std::max<std::size_t>(16, prior.nodes / 2));
    if (!half.divergence) {
      const double v = detail::det_root(half.mean, p.spec().family_id);
      r.error_estimate = std::abs(v - r.value) / r.value;
    }
  }
  return r;
}

inline double versatility(const DistributionSpec& spec, const PriorSpec& prior = {}) {
  const auto fim = bayesian_fim(spec, prior);
  if (fim.divergence) throw DivergenceError(*fim.divergence);
  return detail::det_root(fim.mean, spec.family_id);
}

enum class VersatilityMethod { SingleParameterization, AveragedTie };

inline std::string_view to_string(VersatilityMethod m) {
  return m == VersatilityMethod::SingleParameterization ? "SingleParameterization" : "AveragedTie";
}

struct VersatilityResult {
  std::string model;
  double value = 0.0;
  std::vector<ParameterizationVersatility> per_parameterization;  // the selected forms
  VersatilityMethod method = VersatilityMethod::SingleParameterization;
  Eigen::MatrixXd bayesian_fim;
  double error_estimate = 0.0;
  std::vector<symbols::Ranked> symbol_counts;  // every registered form
  std::vector<std::string> policy_notes;
};

using SymbolCounter = std::function<std::size_t(const Parameterization&)>;

/// Relative tolerance under which tied forms count as giving one value.
inline constexpr double kEqualTieTolerance = 1e-8;

/// Node-halving changes above this are reported: the prior expectation is
/// then either poorly resolved or divergent.
inline constexpr double kPriorConvergenceWarning = 1e-3;

/// V of the least-compressible (fewest-symbol) forms of a model, averaged
/// over ties.
inline VersatilityResult versatility_final(const std::string& model_id, const PriorSpec& prior = {},
                                           const SymbolCounter& counter = {}) {
  const Model& m = model(model_id);
  if (m.forms.empty()) throw CatalogError(model_id + ": no registered parameterization");
  if (m.density_only) throw CatalogError(model_id + ": registered for density evaluation only");
  std::vector<symbols::Ranked> entries;
  for (const auto& f : m.forms) entries.push_back({f.label(), counter ? counter(f) : f.symbol_count()});
  const auto ranking = symbols::rank_parameterizations(entries);

  VersatilityResult out;
  out.model = model_id;
  out.symbol_counts = ranking.counts;
  for (const auto& label : ranking.minimal) {
    auto pv = versatility(m.form(label), prior);
    pv.symbols = counter ? counter(m.form(label)) : pv.symbols;
    out.per_parameterization.push_back(std::move(pv));
  }
  double sum = 0.0, lo = out.per_parameterization.front().value, hi = lo;
  for (const auto& c : out.per_parameterization) {
    sum += c.value;
    lo = std::min(lo, c.value);
    hi = std::max(hi, c.value);
    out.error_estimate = std::max(out.error_estimate, c.error_estimate);
  }
  const bool equal = (hi - lo) <= kEqualTieTolerance * hi;
  out.method = out.per_parameterization.size() > 1 && !equal ? VersatilityMethod::AveragedTie
                                                               : VersatilityMethod::SingleParameterization;
  out.value = out.method == VersatilityMethod::AveragedTie ? sum / static_cast<double>(out.per_parameterization.size())
                                                           : out.per_parameterization.front().value;
  out.bayesian_fim = out.per_parameterization.front().fim.mean;

  for (const auto& c : out.per_parameterization) {
    const auto& f = c.fim;
    if (f.improper_points == 0) continue;
    std::ostringstream s;
    s.precision(6);
    if (prior.policy == ImproperPolicy::Truncated)
      s << c.label << ": prior truncated to the proper region; " << f.improper_points
        << " nodes dropped, excluded prior weight " << f.excluded_weight << ", renormalized";
    else
      s << c.label << ": prior integrated over the full range; " << f.improper_points
        << " nodes where the family is improper, max |mass - 1| = " << f.max_mass_residual;
    out.policy_notes.push_back(s.str());
  }
  for (const auto& c : out.per_parameterization) {
    if (!(c.error_estimate > kPriorConvergenceWarning)) continue;
    std::ostringstream s;
    s.precision(3);
    s << c.label << ": value changes by " << c.error_estimate
      << " (relative) under node halving; the prior expectation is unresolved or divergent";
    out.policy_notes.push_back(s.str());
  }
  return out;
}

}  // namespace versatility
