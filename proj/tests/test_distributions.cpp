#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "test_support.hpp"

using namespace versatility;
using families::family;

TEST(LogDensity, PointValues) {
  EXPECT_DOUBLE_EQ(eval_log_density(*family("exponential"), 0.0, family("exponential")->params({1.0})), 0.0);
  EXPECT_NEAR(eval_log_density(*family("poisson"), 0.0, family("poisson")->params({1.0})), -1.0, 1e-15);
  const auto& p2 = *family("pareto2");
  EXPECT_NEAR(eval_log_density(p2, 1.0, p2.params({1.0, 1.0})), std::log(0.25), 1e-12);
}

TEST(LogDensity, RejectsBadInput) {
  const auto& e = *family("exponential");
  EXPECT_THROW(eval_log_density(e, 1.0, ParamVector({"lambda", "mu"}, {1.0, 2.0})), ParameterArityError);
  EXPECT_THROW(eval_log_density(e, 1.0, e.params({-1.0})), DomainError);
  EXPECT_THROW(eval_log_density(e, 1.0, e.params({0.0})), DomainError);
  EXPECT_THROW(eval_log_density(e, -0.5, e.params({1.0})), SupportError);
  EXPECT_THROW(eval_log_density(*family("poisson"), 1.5, family("poisson")->params({1.0})), SupportError);
  EXPECT_THROW(ParamVector({"a", "a"}, {1.0, 2.0}), ParameterArityError);
  EXPECT_THROW(ParamVector({"a"}, {NAN}), DomainError);
}

TEST(LogDensity, PoissonAgainstDirectFormula) {
  const auto& p = *family("poisson");
  for (double lambda : {0.3, 1.0, 4.5})
    for (int x = 0; x < 30; ++x) {
      const double oracle = -lambda + x * std::log(lambda) - std::lgamma(x + 1.0);
      EXPECT_NEAR(eval_log_density(p, x, p.params({lambda})), oracle, 1e-12 * std::max(1.0, std::abs(oracle)));
    }
}

// Every printed form, evaluated as an expression, is the density the
// family computes at the mapped canonical parameters.
TEST(Catalog, PrintedFormsEvaluateToTheDensity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (const auto& m : catalog())
    for (const auto& f : m.forms) {
      for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> free;
        for (std::size_t i = 0; i < f.arity(); ++i) {
          double v = std::exp(u(rng));
          if (f.names()[i] == "varsigma") v = 0.45 * (u(rng) + 1.0);
          free.push_back(v);
        }
        const auto a = f.params(free);
        const bool discrete = f.family().is_discrete();
        for (double w : discrete ? std::vector<double>{0, 1, 2, 5, 11} : std::vector<double>{0.05, 0.7, 1.9, 6.0}) {
          std::map<std::string, double, std::less<>> env{{f.variable(), w}};
          for (std::size_t i = 0; i < f.arity(); ++i) env[f.names()[i]] = free[i];
          const double printed = symbols::evaluate(*f.ast(), env);
          const double computed = std::exp(eval_log_density(f.spec(), w, a));
          EXPECT_NEAR(computed, printed, 1e-10 * std::max(1.0, std::abs(printed)))
              << m.id << " form " << f.label() << " at w=" << w;
        }
      }
    }
}

TEST(Catalog, Structure) {
  std::size_t two_param = 0;
  for (const auto& id : {"gamma", "weibull", "pareto2", "lognormal", "negbinom", "discreteweibull", "waring",
                         "genpoisson"})
    if (model(id).arity() == 2) ++two_param;
  EXPECT_EQ(two_param, 8u);
  EXPECT_EQ(model("negbinom").forms.size(), 2u);
  EXPECT_THROW(model("nonexistent"), CatalogError);
  EXPECT_THROW(model("negbinom").form("nope"), CatalogError);
}

TEST(Normalization, ExamplesFromClosedForms) {
  auto e = check_normalization(*family("exponential"), family("exponential")->params({2.0}), 1e-10);
  EXPECT_TRUE(e.ok);
  EXPECT_LT(e.residual, 1e-10);
  auto g = check_normalization(*family("geometric"), family("geometric")->params({1.0}), 1e-10);
  EXPECT_TRUE(g.ok);
  EXPECT_LT(g.residual, 1e-10);
}

TEST(Normalization, GeneralizedPoissonAboveOneIsNotProper) {
  const auto& gp = *family("genpoisson");
  try {
    const auto r = check_normalization(gp, gp.params({1.0, 1.5}), 1e-8);
    EXPECT_FALSE(r.ok) << "residual " << r.residual;
  } catch (const NonNormalizableError&) {
    SUCCEED();
  }
}

TEST(Normalization, TwentyRandomPointsPerFamily) {
  std::mt19937_64 rng(11);
  for (const auto& [id, spec] : families::registry())
    for (int i = 0; i < 20; ++i) {
      const auto a = vtest::random_point(*spec, rng);
      const auto r = check_normalization(*spec, a, 1e-8);
      EXPECT_TRUE(r.ok) << id << " residual " << r.residual << " at " << a[0];
    }
}

// Special cases collapse onto the simpler family pointwise.
TEST(Reductions, PointwiseDensityMatch) {
  const auto& ex = *family("exponential");
  const auto& geo = *family("geometric");
  const auto& poi = *family("poisson");
  for (double p : {0.4, 1.0, 2.5}) {
    for (double y : {0.0, 0.3, 1.0, 4.0}) {
      const double base = eval_log_density(ex, y, ex.params({p}));
      EXPECT_NEAR(eval_log_density(*family("gamma"), y, family("gamma")->params({1.0, p})), base, 1e-12);
      EXPECT_NEAR(eval_log_density(*family("weibull"), y, family("weibull")->params({p, 1.0})), base, 1e-12);
      EXPECT_NEAR(eval_log_density(*family("gengamma"), y, family("gengamma")->params({1.0, p, 1.0})), base, 1e-12);
    }
    for (double x : {0.0, 1.0, 3.0, 10.0}) {
      const double g = eval_log_density(geo, x, geo.params({p}));
      EXPECT_NEAR(eval_log_density(*family("negbinom"), x, family("negbinom")->params({1.0, p})), g, 1e-12);
      EXPECT_NEAR(eval_log_density(*family("discreteweibull"), x, family("discreteweibull")->params({p, 1.0})), g,
                  1e-12);
      EXPECT_NEAR(eval_log_density(*family("genpoisson"), x, family("genpoisson")->params({p, 0.0})),
                  eval_log_density(poi, x, poi.params({p})), 1e-12);
    }
  }
}

TEST(Reductions, GeometricClosedForm) {
  // P(X = x) = (m/(m+1)) (1/(m+1))^x
  const auto& geo = *family("geometric");
  for (double m : {0.5, 1.0, 3.0})
    for (int x = 0; x < 12; ++x)
      EXPECT_NEAR(std::exp(eval_log_density(geo, x, geo.params({m}))), m / (m + 1) * std::pow(1 / (m + 1), x), 1e-14);
}
