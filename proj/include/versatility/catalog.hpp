#pragma once

// Parameterizations and the model catalog.
//
// A Parameterization is one printed density expression for a family. Its
// free parameters map onto the family's canonical parameters slot by slot:
// a slot is either fixed, a free parameter, or the reciprocal of one (the
// m/(m+1) versus 1/(m+1) and rate versus mean pairs). A Model groups the
// alternative expressions of one table row.

#include <array>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "versatility/distribution.hpp"
#include "versatility/errors.hpp"
#include "versatility/families.hpp"
#include "versatility/symbols.hpp"

namespace versatility {

/// Coordinate in which the Fisher information of a parameter is taken. The
/// prior is always placed on the parameter itself.
enum class ParamScale { Linear, Log };

struct Slot {
  enum class Kind { Fixed, Free, Reciprocal };
  Kind kind;
  double value = 0.0;     // Fixed
  std::size_t index = 0;  // Free / Reciprocal

  static Slot fixed(double v) { return {Kind::Fixed, v, 0}; }
  static Slot free(std::size_t i) { return {Kind::Free, 0.0, i}; }
  static Slot reciprocal(std::size_t i) { return {Kind::Reciprocal, 0.0, i}; }
};

class Parameterization {
 public:
  Parameterization(std::string label, std::shared_ptr<const DistributionSpec> family, std::vector<std::string> names,
                   std::vector<Slot> slots, std::string expression, std::vector<ParamScale> scales = {})
      : label_(std::move(label)),
        family_(std::move(family)),
        names_(std::move(names)),
        slots_(std::move(slots)),
        expression_(std::move(expression)),
        scales_(std::move(scales)) {
    if (slots_.size() != family_->arity()) throw CatalogError(label_ + ": slot count differs from family arity");
    if (scales_.empty()) scales_.assign(names_.size(), ParamScale::Linear);
    if (scales_.size() != names_.size()) throw CatalogError(label_ + ": one scale per free parameter");
    ast_ = symbols::parse(expression_, variable());
    spec_ = build_spec();
  }

  const std::string& label() const noexcept { return label_; }
  const DistributionSpec& family() const noexcept { return *family_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::vector<ParamScale>& scales() const noexcept { return scales_; }
  const std::vector<Slot>& slots() const noexcept { return slots_; }
  const std::string& expression() const noexcept { return expression_; }
  std::string variable() const { return family_->is_discrete() ? "x" : "y"; }
  std::size_t arity() const noexcept { return names_.size(); }
  const symbols::NodePtr& ast() const noexcept { return ast_; }
  std::size_t symbol_count() const { return symbols::symbol_count(*ast_); }

  /// The family seen as a distribution over the free parameters.
  const DistributionSpec& spec() const noexcept { return *spec_; }
  std::shared_ptr<const DistributionSpec> spec_ptr() const noexcept { return spec_; }

  ParamVector params(std::vector<double> free) const { return ParamVector(names_, std::move(free)); }

  void to_canonical(std::span<const double> free, std::span<double> canon) const {
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const auto& sl = slots_[s];
      canon[s] = sl.kind == Slot::Kind::Fixed ? sl.value
                 : sl.kind == Slot::Kind::Free ? free[sl.index]
                                               : 1.0 / free[sl.index];
    }
  }

  std::vector<double> canonical(std::span<const double> free) const {
    std::vector<double> c(slots_.size());
    to_canonical(free, c);
    return c;
  }

  /// d canonical / d free.
  Eigen::MatrixXd jacobian(std::span<const double> free) const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(slots_.size()),
                                              static_cast<Eigen::Index>(names_.size()));
    for (std::size_t s = 0; s < slots_.size(); ++s) {
      const auto& sl = slots_[s];
      const auto r = static_cast<Eigen::Index>(s), c = static_cast<Eigen::Index>(sl.index);
      if (sl.kind == Slot::Kind::Free) J(r, c) = 1.0;
      if (sl.kind == Slot::Kind::Reciprocal) J(r, c) = -1.0 / (free[sl.index] * free[sl.index]);
    }
    return J;
  }

  /// Diagonal factors d a_j / d coordinate_j (a_j for Log, 1 for Linear).
  Eigen::VectorXd coordinate_factors(std::span<const double> free) const {
    Eigen::VectorXd d(static_cast<Eigen::Index>(names_.size()));
    for (std::size_t j = 0; j < names_.size(); ++j)
      d(static_cast<Eigen::Index>(j)) = scales_[j] == ParamScale::Log ? free[j] : 1.0;
    return d;
  }

 private:
  std::string label_;
  std::shared_ptr<const DistributionSpec> family_;
  std::vector<std::string> names_;
  std::vector<Slot> slots_;
  std::string expression_;
  std::vector<ParamScale> scales_;
  symbols::NodePtr ast_;
  std::shared_ptr<const DistributionSpec> spec_;

  bool is_identity() const {
    if (slots_.size() != names_.size()) return false;
    for (std::size_t s = 0; s < slots_.size(); ++s)
      if (slots_[s].kind != Slot::Kind::Free || slots_[s].index != s) return false;
    return true;
  }

  std::shared_ptr<const DistributionSpec> build_spec() const {
    if (is_identity()) {
      auto s = std::make_shared<DistributionSpec>(*family_);
      s->param_names = names_;
      return s;
    }
    auto s = std::make_shared<DistributionSpec>();
    const auto fam = family_;
    const auto slots = slots_;
    const std::size_t kc = fam->arity();
    auto map = [slots, kc](std::span<const double> free, std::array<double, 4>& c) {
      for (std::size_t i = 0; i < kc; ++i) {
        const auto& sl = slots[i];
        c[i] = sl.kind == Slot::Kind::Fixed ? sl.value
               : sl.kind == Slot::Kind::Free ? free[sl.index]
                                             : 1.0 / free[sl.index];
      }
    };
    s->family_id = fam->family_id;
    s->display_name = fam->display_name + " [" + label_ + "]";
    s->support = fam->support;
    s->param_names = names_;
    s->log_density = [fam, map, kc](const Outcome& w, std::span<const double> a) {
      std::array<double, 4> c{};
      map(a, c);
      return fam->log_density(w, std::span<const double>(c.data(), kc));
    };
    const std::size_t kf = names_.size();
    auto jac = [slots, kc, kf](std::span<const double> a) {
      Eigen::MatrixXd J = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kc), static_cast<Eigen::Index>(kf));
      for (std::size_t i = 0; i < kc; ++i) {
        const auto& sl = slots[i];
        if (sl.kind == Slot::Kind::Free) J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(sl.index)) = 1.0;
        if (sl.kind == Slot::Kind::Reciprocal)
          J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(sl.index)) = -1.0 / (a[sl.index] * a[sl.index]);
      }
      return J;
    };
    if (fam->analytic_score) {
      s->analytic_score = [fam, map, jac, kc, kf](const Outcome& w, std::span<const double> a, std::span<double> out) {
        std::array<double, 4> c{}, sc{};
        map(a, c);
        fam->analytic_score(w, std::span<const double>(c.data(), kc), std::span<double>(sc.data(), kc));
        const Eigen::MatrixXd J = jac(a);
        for (std::size_t j = 0; j < kf; ++j) {
          double v = 0.0;
          for (std::size_t i = 0; i < kc; ++i) v += J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * sc[i];
          out[j] = v;
        }
      };
    }
    if (fam->analytic_fisher) {
      s->analytic_fisher = [fam, map, jac, kc](std::span<const double> a) {
        std::array<double, 4> c{};
        map(a, c);
        const Eigen::MatrixXd J = jac(a);
        return Eigen::MatrixXd(J.transpose() * fam->analytic_fisher(std::span<const double>(c.data(), kc)) * J);
      };
    }
    if (fam->admissibility_note) {
      s->admissibility_note = [fam, map, kc](std::span<const double> a) {
        std::array<double, 4> c{};
        map(a, c);
        return fam->admissibility_note(std::span<const double>(c.data(), kc));
      };
    }
    return s;
  }
};

/// One table row: a family (or special case) with its alternative printed forms.
struct Model {
  std::string id;
  std::string title;
  std::vector<Parameterization> forms;
  bool density_only = false;

  std::size_t arity() const { return forms.front().arity(); }
  const Parameterization& form(const std::string& label) const {
    for (const auto& f : forms)
      if (f.label() == label) return f;
    throw CatalogError(id + ": no parameterization '" + label + "'");
  }
};

namespace detail {

inline std::vector<Parameterization> exponential_forms() {
  auto e = families::exponential();
  return {Parameterization("rate", e, {"lambda"}, {Slot::free(0)}, "lambda * exp(~1 * lambda * y)"),
          Parameterization("mean", e, {"theta"}, {Slot::reciprocal(0)}, "exp(~1 * y / theta) / theta")};
}

inline std::vector<Parameterization> geometric_forms() {
  auto g = families::geometric();
  return {Parameterization("m/(m+1)", g, {"m"}, {Slot::free(0)}, "m / (m + 1) * (1 / (m + 1)) ^ x"),
          Parameterization("1/(m+1)", g, {"m"}, {Slot::reciprocal(0)}, "1 / (m + 1) * (m / (m + 1)) ^ x")};
}

inline std::vector<Model> build_catalog() {
  using families::family;
  const auto F = Slot::free;
  const auto R = Slot::reciprocal;
  const auto K = Slot::fixed;
  const auto Log = ParamScale::Log;
  const auto Lin = ParamScale::Linear;
  std::vector<Model> c;

  c.push_back({"exponential", "Exponential(lambda)", exponential_forms()});

  c.push_back({"gamma", "Gamma(r, lambda)",
               {Parameterization("rate", family("gamma"), {"r", "lambda"}, {F(0), F(1)},
                                 "lambda ^ r * y ^ (r - 1) * exp(~1 * lambda * y) / G(r)"),
                Parameterization("scale", family("gamma"), {"r", "theta"}, {F(0), R(1)},
                                 "y ^ (r - 1) * exp(~1 * y / theta) / theta ^ r / G(r)")}});
  c.push_back({"gamma:r=1", "Gamma(r=1, lambda) = Exponential(lambda)", exponential_forms()});
  c.push_back({"gamma:lambda=1", "Gamma(r, lambda=1)",
               {Parameterization("shape", family("gamma"), {"r"}, {F(0), K(1.0)}, "y ^ (r - 1) * exp(~1 * y) / G(r)")}});

  c.push_back({"weibull", "Weibull(lambda, tau)",
               {Parameterization("rate", family("weibull"), {"lambda", "tau"}, {F(0), F(1)},
                                 "tau * lambda * y ^ (tau - 1) * exp(~1 * lambda * y ^ tau)")}});
  c.push_back({"weibull:tau=1", "Weibull(lambda, tau=1) = Exponential(lambda)", exponential_forms()});
  c.push_back({"weibull:lambda=1", "Weibull(lambda=1, tau)",
               {Parameterization("shape", family("weibull"), {"tau"}, {K(1.0), F(0)},
                                 "tau * y ^ (tau - 1) * exp(~1 * y ^ tau)")}});

  c.push_back({"pareto2", "Pareto 2(alpha, theta)",
               {Parameterization("default", family("pareto2"), {"alpha", "theta"}, {F(0), F(1)},
                                 "alpha * theta ^ alpha / (y + theta) ^ (alpha + 1)")}});
  c.push_back({"pareto2:alpha=1", "Pareto 2(alpha=1, theta)",
               {Parameterization("scale", family("pareto2"), {"theta"}, {K(1.0), F(0)}, "theta / (y + theta) ^ 2")}});
  c.push_back({"pareto2:theta=1", "Pareto 2(alpha, theta=1)",
               {Parameterization("tail", family("pareto2"), {"alpha"}, {F(0), K(1.0)},
                                 "alpha / (y + 1) ^ (alpha + 1)")}});

  c.push_back({"lognormal", "Lognormal(ln(nu), sigma)",
               {Parameterization("default", family("lognormal"), {"nu", "sigma"}, {F(0), F(1)},
                                 "exp(~1 * (ln(y) - ln(nu)) ^ 2 / (2 * sigma ^ 2)) / ((2 * pi) rt 2 * sigma * y)",
                                 {Log, Lin})}});
  c.push_back({"lognormal:nu=1", "Lognormal(ln(nu)=0, sigma)",
               {Parameterization("scale", family("lognormal"), {"sigma"}, {K(1.0), F(0)},
                                 "exp(~1 * ln(y) ^ 2 / (2 * sigma ^ 2)) / ((2 * pi) rt 2 * sigma * y)")}});
  c.push_back({"lognormal:sigma=1", "Lognormal(ln(nu), sigma=1)",
               {Parameterization("location", family("lognormal"), {"nu"}, {F(0), K(1.0)},
                                 "exp(~1 * (ln(y) - ln(nu)) ^ 2 / 2) / ((2 * pi) rt 2 * y)", {Log})}});

  c.push_back({"gengamma", "Generalized Gamma(r, lambda, tau)",
               {Parameterization("default", family("gengamma"), {"r", "lambda", "tau"}, {F(0), F(1), F(2)},
                                 "tau * lambda ^ r * y ^ (tau * r - 1) * exp(~1 * lambda * y ^ tau) / G(r)")},
               true});

  c.push_back({"negbinom", "Negative Binomial(r, m/(m+1))",
               {Parameterization("m/(m+1)", family("negbinom"), {"r", "m"}, {F(0), F(1)},
                                 "G(x + r) / (G(r) * G(x + 1)) * (m / (m + 1)) ^ r * (1 / (m + 1)) ^ x"),
                Parameterization("1/(m+1)", family("negbinom"), {"r", "m"}, {F(0), R(1)},
                                 "G(x + r) / (G(r) * G(x + 1)) * (1 / (m + 1)) ^ r * (m / (m + 1)) ^ x")}});
  c.push_back({"negbinom:r=1", "Negative Binomial(r=1, .) = Geometric(.)", geometric_forms()});
  c.push_back({"negbinom:p=1/2", "Negative Binomial(r, 1/2)",
               {Parameterization("shape", family("negbinom"), {"r"}, {F(0), K(1.0)},
                                 "G(x + r) / (G(r) * G(x + 1)) * (1 / 2) ^ (x + r)")}});

  c.push_back({"discreteweibull", "Discrete Weibull(m/(m+1), tau)",
               {Parameterization("m/(m+1)", family("discreteweibull"), {"m", "tau"}, {F(0), F(1)},
                                 "(1 / (m + 1)) ^ (x ^ tau) - (1 / (m + 1)) ^ ((x + 1) ^ tau)"),
                Parameterization("1/(m+1)", family("discreteweibull"), {"m", "tau"}, {R(0), F(1)},
                                 "(m / (m + 1)) ^ (x ^ tau) - (m / (m + 1)) ^ ((x + 1) ^ tau)")}});
  c.push_back({"discreteweibull:tau=1", "Discrete Weibull(., tau=1) = Geometric(.)", geometric_forms()});
  c.push_back({"discreteweibull:q=1/2", "Discrete Weibull(1/2, tau)",
               {Parameterization("shape", family("discreteweibull"), {"tau"}, {K(1.0), F(0)},
                                 "(1 / 2) ^ (x ^ tau) - (1 / 2) ^ ((x + 1) ^ tau)")}});

  c.push_back({"waring", "Waring(alpha, theta)",
               {Parameterization("default", family("waring"), {"alpha", "theta"}, {F(0), F(1)},
                                 "alpha * G(alpha + theta) * G(x + theta) / (G(theta) * G(x + alpha + theta + 1))")}});
  c.push_back({"waring:alpha=1", "Waring(alpha=1, theta)",
               {Parameterization("scale", family("waring"), {"theta"}, {K(1.0), F(0)},
                                 "theta / ((x + theta) * (x + theta + 1))")}});
  c.push_back({"waring:theta=1", "Waring(alpha, theta=1)",
               {Parameterization("tail", family("waring"), {"alpha"}, {F(0), K(1.0)},
                                 "alpha * G(alpha + 1) * G(x + 1) / G(x + alpha + 2)")}});

  c.push_back({"genpoisson", "Generalized Poisson(lambda, varsigma)",
               {Parameterization("default", family("genpoisson"), {"lambda", "varsigma"}, {F(0), F(1)},
                                 "lambda * exp(~1 * (varsigma * x + lambda)) * (varsigma * x + lambda) ^ (x - 1) / "
                                 "G(x + 1)")}});
  c.push_back({"genpoisson:lambda=1", "Generalized Poisson(lambda=1, varsigma)",
               {Parameterization("dispersion", family("genpoisson"), {"varsigma"}, {K(1.0), F(0)},
                                 "exp(~1 * (varsigma * x + 1)) * (varsigma * x + 1) ^ (x - 1) / G(x + 1)")}});
  c.push_back({"genpoisson:varsigma=0", "Generalized Poisson(lambda, varsigma=0) = Poisson(lambda)",
               {Parameterization("rate", family("poisson"), {"lambda"}, {F(0)},
                                 "exp(~1 * lambda) * lambda ^ x / G(x + 1)")}});

  c.push_back({"geometric", "Geometric", geometric_forms()});
  c.push_back({"poisson", "Poisson(lambda)",
               {Parameterization("rate", family("poisson"), {"lambda"}, {F(0)},
                                 "exp(~1 * lambda) * lambda ^ x / G(x + 1)")}});
  return c;
}

}  // namespace detail

/// Every model with its registered parameterizations. Built once.
inline const std::vector<Model>& catalog() {
  static const std::vector<Model> c = detail::build_catalog();
  return c;
}

inline const Model& model(const std::string& id) {
  for (const auto& m : catalog())
    if (m.id == id) return m;
  throw CatalogError("unknown model '" + id + "'");
}

}  // namespace versatility
