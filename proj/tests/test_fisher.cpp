#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "test_support.hpp"

using namespace versatility;
using families::family;

TEST(Score, PointValues) {
  const auto& e = *family("exponential");
  EXPECT_NEAR(score(e, 1.0, e.params({2.0}))[0], -0.5, 1e-12);
  const auto& p = *family("poisson");
  EXPECT_NEAR(score(p, 1.0, p.params({1.0}))[0], 0.0, 1e-12);
  const auto& p2 = *family("pareto2");
  EXPECT_NEAR(score(p2, 0.0, p2.params({1.0, 1.0}))[0], 1.0, 1e-12);
}

TEST(FisherMatrix, ClosedForms) {
  EXPECT_NEAR(fisher_scalar(*family("exponential"), family("exponential")->params({2.0})), 0.25, 1e-12);
  EXPECT_NEAR(fisher_scalar(*family("poisson"), family("poisson")->params({4.0})), 0.25, 1e-12);

  const double weibull_tau1 = std::pow(1.0 - vtest::kEulerGamma, 2) + std::numbers::pi * std::numbers::pi / 6.0;
  const auto& w = model("weibull:lambda=1").form("shape");
  EXPECT_NEAR(fisher_scalar(w.spec(), w.params({1.0})), weibull_tau1, 1e-9);
  EXPECT_NEAR(weibull_tau1, 1.823680, 1e-6);

  const auto& g = model("gamma:lambda=1").form("shape");
  EXPECT_NEAR(fisher_scalar(g.spec(), g.params({1.0})), std::numbers::pi * std::numbers::pi / 6.0, 1e-9);

  // Gamma(r, lambda): [[trigamma(r), -1/lambda], [-1/lambda, r/lambda^2]]
  const auto& gam = *family("gamma");
  const auto fm = fisher_matrix(gam, gam.params({2.0, 3.0}));
  EXPECT_NEAR(fm.entries(0, 0), vtest::trigamma(2.0), 1e-10);
  EXPECT_NEAR(fm.entries(0, 1), -1.0 / 3.0, 1e-12);
  EXPECT_NEAR(fm.entries(1, 1), 2.0 / 9.0, 1e-12);

  // Location information of a lognormal is 1/sigma^2 in ln(nu), for every nu.
  const auto& ln = *family("lognormal");
  for (double nu : {0.2, 1.0, 7.0}) {
    const double i_nu = fisher_matrix(ln, ln.params({nu, 1.0})).entries(0, 0);
    EXPECT_NEAR(nu * nu * i_nu, 1.0, 1e-10);
  }
}

TEST(FisherMatrix, SymmetricAndPsdAtRandomPoints) {
  std::mt19937_64 rng(21);
  for (const auto& [id, spec] : families::registry())
    for (int i = 0; i < 20; ++i) {
      const auto a = vtest::random_point(*spec, rng);
      const auto fm = fisher_matrix(*spec, a);
      EXPECT_TRUE(fm.entries.isApprox(fm.entries.transpose(), 1e-12)) << id;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fm.entries);
      EXPECT_GE(es.eigenvalues().minCoeff(), -1e-9 * fm.scale()) << id << " at point " << i;
    }
}

TEST(FisherMatrix, HessianFormAgrees) {
  EXPECT_LE(fisher_hessian_check(*family("exponential"), family("exponential")->params({1.0})), 1e-4);
  EXPECT_LE(fisher_hessian_check(*family("gamma"), family("gamma")->params({2.0, 3.0})), 1e-3);
  EXPECT_LE(fisher_hessian_check(*family("geometric"), family("geometric")->params({1.0})), 1e-3);
  std::mt19937_64 rng(5);
  for (const auto& [id, spec] : families::registry())
    for (int i = 0; i < 5; ++i) {
      const auto a = vtest::random_point(*spec, rng);
      EXPECT_LE(fisher_hessian_check(*spec, a), 1e-3) << id << " at point " << i;
    }
}

TEST(FisherMatrix, ScoreHasMeanZero) {
  std::mt19937_64 rng(9);
  FisherOptions numeric;
  numeric.force_numeric = true;
  for (const auto& [id, spec] : families::registry())
    for (int i = 0; i < 5; ++i) {
      const auto a = vtest::random_point(*spec, rng);
      const auto fm = fisher_matrix(*spec, a, numeric);
      ASSERT_EQ(fm.score_mean.size(), static_cast<Eigen::Index>(spec->arity())) << id;
      for (std::size_t j = 0; j < spec->arity(); ++j)
        EXPECT_LE(std::abs(fm.score_mean[j]), 1e-6 * std::sqrt(fm.entries(j, j))) << id << " component " << j;
    }
}

TEST(FisherMatrix, AnalyticMatchesNumeric) {
  std::mt19937_64 rng(13);
  FisherOptions numeric;
  numeric.force_numeric = true;
  for (const auto& [id, spec] : families::registry()) {
    if (!spec->has_analytic_fisher()) continue;
    for (int i = 0; i < 10; ++i) {
      const auto a = vtest::random_point(*spec, rng);
      const auto fa = fisher_matrix(*spec, a);
      const auto fn = fisher_matrix(*spec, a, numeric);
      EXPECT_EQ(fa.method, FisherMethod::Analytic);
      EXPECT_LE((fa.entries - fn.entries).cwiseAbs().maxCoeff() / fa.scale(), 1e-4) << id;
    }
  }
}

TEST(Jeffreys, PointValues) {
  EXPECT_NEAR(jeffreys_density(*family("exponential"), family("exponential")->params({2.0})), 0.5, 1e-12);
  EXPECT_NEAR(jeffreys_density(*family("poisson"), family("poisson")->params({4.0})), 0.5, 1e-12);
}

// lambda = beta^p as a stand-alone family: the Jeffreys density must pick up
// exactly the Jacobian |d lambda / d beta|.
TEST(Jeffreys, ReparameterizationCovariance) {
  for (double p : {0.5, 2.0, 3.0}) {
    DistributionSpec s;
    s.family_id = "exponential-power";
    s.param_names = {"beta"};
    s.log_density = [p](const Outcome& w, std::span<const double> a) {
      const double l = std::pow(a[0], p);
      return std::log(l) - l * w.value;
    };
    const auto& ex = *family("exponential");
    for (double beta : {0.4, 1.0, 1.7}) {
      const double lambda = std::pow(beta, p);
      const double jacobian = p * std::pow(beta, p - 1.0);
      const double expected = jeffreys_density(ex, ex.params({lambda})) * jacobian;
      EXPECT_NEAR(jeffreys_density(s, s.params({beta})), expected, 1e-6 * expected) << "p=" << p;
    }
  }
}

TEST(CramerRao, Exponential) {
  const auto& rate = model("exponential").form("rate");
  const auto& mean = model("exponential").form("mean");
  EXPECT_NEAR(cramer_rao_bound(rate.spec(), rate.params({6.0}), 1).value, 36.0, 1e-9);
  EXPECT_NEAR(cramer_rao_bound(mean.spec(), mean.params({1.0 / 6.0}), 1).value, 1.0 / 36.0, 1e-12);
  for (const auto& [id, spec] : families::registry()) {
    if (spec->arity() != 1) continue;
    std::mt19937_64 rng(3);
    const auto a = vtest::random_point(*spec, rng);
    EXPECT_NEAR(cramer_rao_bound(*spec, a, 100).value, cramer_rao_bound(*spec, a, 1).value / 100.0,
                1e-12 * cramer_rao_bound(*spec, a, 1).value)
        << id;
  }
  EXPECT_THROW(cramer_rao_bound(rate.spec(), rate.params({1.0}), 0), DomainError);
}

TEST(FisherMatrix, DiscreteAgainstBruteForceSum) {
  // Negative binomial score sums written out term by term, with lgamma and
  // a long direct sum as the oracle.
  const double r = 2.5, m = 1.3;
  const double q = m / (m + 1.0);
  Eigen::Matrix2d oracle = Eigen::Matrix2d::Zero();
  for (int x = 0; x < 4000; ++x) {
    const double logp = std::lgamma(x + r) - std::lgamma(r) - std::lgamma(x + 1.0) + r * std::log(q) +
                        x * std::log(1.0 - q);
    const double pr = std::exp(logp);
    const double dr = vtest::digamma(x + r) - vtest::digamma(r) + std::log(q);
    const double dm = r / m - (r + x) / (m + 1.0);  // d/dm of r ln m + x ln 1 - (r + x) ln(m + 1)
    oracle(0, 0) += pr * dr * dr;
    oracle(0, 1) += pr * dr * dm;
    oracle(1, 1) += pr * dm * dm;
  }
  oracle(1, 0) = oracle(0, 1);
  const auto& nb = *family("negbinom");
  const auto fm = fisher_matrix(nb, nb.params({r, m}));
  EXPECT_LE((fm.entries - Eigen::MatrixXd(oracle)).cwiseAbs().maxCoeff() / fm.scale(), 1e-6);
}
