#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "test_support.hpp"

using namespace versatility;
using families::family;

namespace {

// Shannon entropy of a pmf by direct summation until the terms vanish.
template <class LogPmf>
double direct_entropy(LogPmf log_p, int terms) {
  double h = 0.0;
  for (int x = 0; x < terms; ++x) {
    const double lp = log_p(x);
    if (std::isfinite(lp)) h -= std::exp(lp) * lp;
  }
  return h;
}

}  // namespace

TEST(Entropy, Exponential) {
  const auto& e = *family("exponential");
  const auto h1 = shannon_entropy(e, e.params({1.0}));
  EXPECT_NEAR(h1.value, 1.0, 1e-9);
  EXPECT_EQ(h1.kind, EntropyKind::Differential);
  EXPECT_NEAR(shannon_entropy(e, e.params({std::numbers::e})).value, 0.0, 1e-9);
  EXPECT_NEAR(exponentiated_entropy(e, e.params({1.0})), std::numbers::e, 1e-8);
  EXPECT_NEAR(exponentiated_entropy(e, e.params({std::numbers::e})), 1.0, 1e-9);
  for (double lambda : {0.2, 3.0, 40.0})
    EXPECT_NEAR(shannon_entropy(e, e.params({lambda})).value, 1.0 - std::log(lambda), 1e-9);
}

TEST(Entropy, GeometricHalf) {
  // varrho = 1/2 is m = 1 in the m/(m+1) form.
  const auto& g = *family("geometric");
  const auto h = shannon_entropy(g, g.params({1.0}));
  EXPECT_EQ(h.kind, EntropyKind::Shannon);
  EXPECT_NEAR(h.value, 2.0 * std::log(2.0), 1e-9);
  EXPECT_NEAR(exponentiated_entropy(g, g.params({1.0})), 4.0, 1e-8);
  for (double m : {0.3, 2.0, 9.0}) {
    const double rho = m / (m + 1.0);
    const double oracle = -((1.0 - rho) / rho) * std::log(1.0 - rho) - std::log(rho);
    EXPECT_NEAR(shannon_entropy(g, g.params({m})).value, oracle, 1e-9);
  }
}

TEST(Entropy, GammaClosedForm) {
  // H = r - ln(lambda) + lnG(r) + (1 - r) digamma(r)
  const auto& g = *family("gamma");
  for (auto [r, lambda] : {std::pair{0.5, 1.0}, std::pair{2.0, 3.0}, std::pair{7.5, 0.4}}) {
    const double oracle = r - std::log(lambda) + std::lgamma(r) + (1.0 - r) * vtest::digamma(r);
    EXPECT_NEAR(shannon_entropy(g, g.params({r, lambda})).value, oracle, 1e-7) << "r=" << r;
  }
}

TEST(Entropy, PoissonAgainstDirectSum) {
  const auto& p = *family("poisson");
  for (double lambda : {0.5, 3.0, 25.0}) {
    const double oracle =
        direct_entropy([&](int x) { return -lambda + x * std::log(lambda) - std::lgamma(x + 1.0); }, 400);
    EXPECT_NEAR(shannon_entropy(p, p.params({lambda})).value, oracle, 1e-9);
  }
}

TEST(PowerMean, InverseHerfindahl) {
  const auto& e = *family("exponential");
  const auto& g = *family("geometric");
  EXPECT_NEAR(power_mean_simplicity(e, e.params({1.0}), 1.0).value, 2.0, 1e-9);
  EXPECT_NEAR(power_mean_simplicity(g, g.params({1.0}), 1.0).value, 3.0, 1e-9);
  // Exponential: E[f^p] = lambda^p / (p + 1), so the mean is (p + 1)^{1/p} / lambda.
  for (double p : {0.5, 2.0, 4.0})
    EXPECT_NEAR(power_mean_simplicity(e, e.params({2.0}), p).value, std::pow(p + 1.0, 1.0 / p) / 2.0, 1e-8);
}

TEST(PowerMean, ReciprocalConvention) {
  const auto& e = *family("exponential");
  const auto div = power_mean_simplicity(e, e.params({1.0}), 1.0, PowerMeanConvention::Reciprocal);
  EXPECT_TRUE(div.divergent);
  EXPECT_TRUE(std::isinf(div.value));
  // E[f^{-1/2}] = 2 / sqrt(lambda), squared: 4 / lambda
  EXPECT_NEAR(power_mean_simplicity(e, e.params({1.0}), 0.5, PowerMeanConvention::Reciprocal).value, 4.0, 1e-8);
  EXPECT_THROW(power_mean_simplicity(e, e.params({1.0}), 0.0), DomainError);
  EXPECT_THROW(power_mean_simplicity(e, e.params({1.0}), -1.0), DomainError);
}

TEST(PowerMean, SmallOrderApproachesExponentiatedEntropy) {
  std::mt19937_64 rng(17);
  for (const auto& [id, spec] : families::registry())
    for (int i = 0; i < 3; ++i) {
      const auto a = vtest::random_point(*spec, rng);
      const double eh = exponentiated_entropy(*spec, a);
      for (auto conv : {PowerMeanConvention::Density, PowerMeanConvention::Reciprocal}) {
        const auto pm = power_mean_simplicity(*spec, a, 1e-3, conv);
        ASSERT_FALSE(pm.divergent) << id;
        EXPECT_LT(vtest::rel(pm.value, eh), 1e-2) << id;
      }
    }
}

TEST(Entropy, RefusesImproperFormulas) {
  const auto& gp = *family("genpoisson");
  EXPECT_THROW(shannon_entropy(gp, gp.params({1.0, 1.5})), NonNormalizableError);
  EXPECT_THROW(power_mean_simplicity(gp, gp.params({1.0, 1.5}), 1.0), NonNormalizableError);
  EXPECT_NO_THROW(shannon_entropy(gp, gp.params({1.0, 0.5})));
}
