// Acceptance run: one PASS/FAIL line per criterion, with the evidence
// indented beneath it. Exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "test_support.hpp"

using namespace versatility;

namespace {

struct Criterion {
  bool pass = true;
  std::vector<std::string> lines;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    lines.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void info(const std::string& what) { lines.push_back("      " + what); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds(const std::function<void()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string row_name(const TableRow& r) {
  return r.model + (r.parameterization.empty() ? "" : " [" + r.parameterization + "]");
}

const TableRow* find(const TableReport& t, const std::string& model, const std::string& form = "") {
  for (const auto& r : t.rows)
    if (r.model == model && (form.empty() || r.parameterization == form)) return &r;
  return nullptr;
}

const double kWeibullShapeInfo =
    std::pow(1.0 - vtest::kEulerGamma, 2) + std::numbers::pi * std::numbers::pi / 6.0;

Criterion table2() {
  Criterion c;
  TableReport t;
  const double secs = seconds([&] {
    for (const auto& ref : reference_rows())
      if (ref.table == 2)
        for (auto& r : detail::rows_for(ref, PriorSpec{}, "")) t.rows.push_back(std::move(r));
  });
  for (const auto& r : t.rows)
    c.check(r.value_computed && r.abs_dev <= 0.005,
            fmt("%-22s computed %.6f  reference %.4f  |dev| %.2e (<= 0.005)", row_name(r).c_str(),
                r.value_computed.value_or(NAN), r.value_paper, r.abs_dev));
  const double ve = *find(t, "exponential")->value_computed;
  const double vw = *find(t, "weibull:lambda=1")->value_computed;
  c.check(std::abs(ve - std::numbers::e) <= 1e-6, fmt("exponential vs e: |dev| %.2e (<= 1e-6)", std::abs(ve - std::numbers::e)));
  const double w_oracle = std::numbers::e * std::sqrt(kWeibullShapeInfo);
  c.check(std::abs(vw - w_oracle) <= 1e-6,
          fmt("weibull:lambda=1 vs e*sqrt((1-g)^2+pi^2/6) = %.8f: |dev| %.2e (<= 1e-6)", w_oracle, std::abs(vw - w_oracle)));
  c.check(secs < 5.0, fmt("runtime %.2f s (< 5 s)", secs));
  return c;
}

Criterion table3() {
  Criterion c;
  TableReport t;
  const double secs = seconds([&] {
    for (const auto& ref : reference_rows())
      if (ref.table == 3)
        for (auto& r : detail::rows_for(ref, PriorSpec{}, "")) t.rows.push_back(std::move(r));
  });
  for (const auto& r : t.rows)
    c.check(r.value_computed && r.rel_dev <= 0.005,
            fmt("%-22s computed %.6f  reference %.4f  rel %.2e (<= 0.5%%)", row_name(r).c_str(),
                r.value_computed.value_or(NAN), r.value_paper, r.rel_dev));
  const double p_theta = *find(t, "pareto2:theta=1")->value_computed;
  const double p_alpha = *find(t, "pareto2:alpha=1")->value_computed;
  const double ln1 = *find(t, "lognormal:sigma=1")->value_computed;
  c.check(std::abs(p_theta - std::numbers::e) <= 1e-4, fmt("pareto2:theta=1 vs e: |dev| %.2e (<= 1e-4)", std::abs(p_theta - std::numbers::e)));
  const double e_rt3 = std::numbers::e / std::sqrt(3.0);
  c.check(std::abs(p_alpha - e_rt3) <= 1e-4, fmt("pareto2:alpha=1 vs e/sqrt(3): |dev| %.2e (<= 1e-4)", std::abs(p_alpha - e_rt3)));
  c.check(std::abs(ln1 - 1.0) <= 1e-6, fmt("lognormal:sigma=1 vs 1: |dev| %.2e (<= 1e-6)", std::abs(ln1 - 1.0)));
  c.check(secs < 60.0, fmt("runtime %.2f s (< 60 s)", secs));
  return c;
}

Criterion table4(const TableReport& full) {
  Criterion c;
  for (const auto& r : full.rows) {
    if (r.table != 4) continue;
    const bool improper = r.model == "genpoisson" || r.model == "genpoisson:lambda=1";
    if (improper) continue;
    c.check(r.value_computed && r.rel_dev <= 0.01,
            fmt("%-30s computed %.6f  reference %.4f  rel %.2e (<= 1%%)", row_name(r).c_str(),
                r.value_computed.value_or(NAN), r.value_paper, r.rel_dev));
  }
  const double poisson = *find(full, "genpoisson:varsigma=0")->value_computed;
  c.check(std::abs(poisson - std::exp(0.25)) <= 1e-6,
          fmt("poisson row vs e^(1/4): |dev| %.2e (<= 1e-6)", std::abs(poisson - std::exp(0.25))));

  // Improper-prior rows: both policies must be attempted and documented.
  for (const auto& model : {"genpoisson", "genpoisson:lambda=1"}) {
    bool any_within = false;
    std::size_t documented = 0;
    for (const auto& r : full.rows) {
      if (r.model != model) continue;
      const bool ok = r.value_computed && !r.notes.empty();
      documented += ok;
      any_within = any_within || (r.value_computed && r.rel_dev <= 0.01);
      c.info(fmt("%-30s %-22s computed %.6f  reference %.4f  rel %.2e", model, r.flags.front().c_str(),
                 r.value_computed.value_or(NAN), r.value_paper, r.rel_dev));
    }
    c.check(documented == 2, fmt("%s: both prior policies computed and reported with notes%s", model,
                                 any_within ? "" : " (neither within 1%; passes on the documented report)"));
  }
  return c;
}

Criterion symbol_counts() {
  Criterion c;
  const std::vector<std::pair<std::string, std::size_t>> cases = {
      {"l * exp(~1 * l * y)", 10},
      {"(b ^ p) * exp(~1 * b ^ p * y)", 16},
      {"l * ((e ^ (~1)) ^ l) ^ y", 15},
      {"(b ^ p) * ((e ^ (~1)) ^ (b ^ p)) ^ y", 23}};
  for (const auto& [text, expected] : cases) {
    const auto n = symbols::symbol_count(*symbols::parse(text));
    c.check(n == expected, fmt("\"%s\" -> %zu (expected %zu)", text.c_str(), n, expected));
  }
  const auto r = versatility_final("exponential");
  std::size_t at_ten = 0;
  for (const auto& s : r.symbol_counts) at_ten += s.count == 10;
  c.check(r.per_parameterization.size() == 2 && at_ten == 2,
          fmt("exponential: %zu forms selected, %zu forms at 10 symbols (expected 2 and 2)", r.per_parameterization.size(),
              at_ten));
  return c;
}

Criterion properties(const TableReport& base) {
  Criterion c;
  std::mt19937_64 rng(20240601);

  {
    double worst_asym = 0.0, worst_eig = std::numeric_limits<double>::infinity();
    std::size_t points = 0;
    for (const auto& [id, spec] : families::registry())
      for (int i = 0; i < 20; ++i, ++points) {
        const auto fm = fisher_matrix(*spec, vtest::random_point(*spec, rng));
        worst_asym = std::max(worst_asym, (fm.entries - fm.entries.transpose()).cwiseAbs().maxCoeff() / fm.scale());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fm.entries);
        worst_eig = std::min(worst_eig, es.eigenvalues().minCoeff() / fm.scale());
      }
    c.check(worst_asym <= 1e-12 && worst_eig >= -1e-9,
            fmt("Fisher matrix symmetric and PSD at %zu points: max asymmetry %.1e, min eigenvalue/scale %.1e", points,
                worst_asym, worst_eig));
  }
  {
    double worst = 0.0;
    std::string where;
    for (const auto& [id, spec] : families::registry())
      for (int i = 0; i < 5; ++i) {
        const double d = fisher_hessian_check(*spec, vtest::random_point(*spec, rng));
        if (d > worst) worst = d, where = id;
      }
    c.check(worst <= 1e-3, fmt("score-product vs Hessian form: max deviation %.2e (%s) (<= 1e-3)", worst, where.c_str()));
  }
  {
    FisherOptions numeric;
    numeric.force_numeric = true;
    double worst = 0.0;
    std::string where;
    for (const auto& [id, spec] : families::registry())
      for (int i = 0; i < 5; ++i) {
        const auto fm = fisher_matrix(*spec, vtest::random_point(*spec, rng), numeric);
        for (Eigen::Index j = 0; j < fm.entries.rows(); ++j) {
          const double d = std::abs(fm.score_mean[j]) / std::sqrt(fm.entries(j, j));
          if (d > worst) worst = d, where = id;
        }
      }
    c.check(worst <= 1e-6, fmt("score mean zero: max |E[score_i]|/sqrt(I_ii) %.2e (%s) (<= 1e-6)", worst, where.c_str()));
  }
  {
    double worst = 0.0;
    const double base_v = versatility::versatility(*families::family("exponential"));
    for (double p : {0.5, 2.0, 3.0}) {
      DistributionSpec s;
      s.family_id = "exponential-power";
      s.param_names = {"beta"};
      s.log_density = [p](const Outcome& w, std::span<const double> a) {
        const double l = std::pow(a[0], p);
        return std::log(l) - l * w.value;
      };
      const double v = versatility::versatility(s);
      worst = std::max(worst, vtest::rel(v, p * base_v));
      c.info(fmt("lambda = beta^%.1f: V = %.6f, p * V(lambda form) = %.6f", p, v, p * base_v));
    }
    c.check(worst <= 5e-3, fmt("reparameterization scaling: max relative deviation %.2e (<= 0.5%%)", worst));
  }
  {
    double worst = 0.0;
    std::string where;
    for (const auto& [id, spec] : families::registry())
      for (int i = 0; i < 3; ++i) {
        const auto a = vtest::random_point(*spec, rng);
        const double d = vtest::rel(power_mean_simplicity(*spec, a, 1e-3).value, exponentiated_entropy(*spec, a));
        if (d > worst) worst = d, where = id;
      }
    c.check(worst <= 1e-2, fmt("power mean at p = 1e-3 vs exponentiated entropy: max rel %.2e (%s) (<= 1%%)", worst,
                               where.c_str()));
  }
  {
    PriorSpec fine;
    fine.nodes = 128;
    const TableReport doubled = reproduce_tables(fine);
    double worst_other = 0.0;
    std::size_t over = 0;
    for (std::size_t i = 0; i < base.rows.size(); ++i) {
      const auto& a = base.rows[i];
      const auto& b = doubled.rows[i];
      if (!a.value_computed || !b.value_computed) {
        ++over;
        c.info(fmt("%-30s failed to compute", row_name(a).c_str()));
        continue;
      }
      const double d = vtest::rel(*b.value_computed, *a.value_computed);
      if (d >= 1e-4) {
        ++over;
        c.info(fmt("%-30s %-22s 64 nodes %.6f, 128 nodes %.6f, rel change %.2e", row_name(a).c_str(),
                   a.flags.empty() ? "" : a.flags.front().c_str(), *a.value_computed, *b.value_computed, d));
      } else {
        worst_other = std::max(worst_other, d);
      }
    }
    c.check(over == 0, fmt("node doubling 64 -> 128: %zu of %zu rows change by >= 1e-4 (largest change among the rest "
                           "%.1e)", over, base.rows.size(), worst_other));
  }
  {
    PriorSpec qmc;
    qmc.scheme = QuadratureScheme::QuasiMonteCarlo;
    qmc.seed = 12345;
    auto dump = [&] {
      nlohmann::json j = to_json(reproduce_tables());
      const auto r = versatility_final("gamma", qmc);
      j["qmc"] = {{"value", r.value}, {"seed", qmc.seed}};
      return j.dump();
    };
    const std::string a = dump(), b = dump();
    c.check(a == b, fmt("JSON byte-identical across runs under a fixed seed (%zu bytes)", a.size()));
  }
  return c;
}

}  // namespace

int main() {
  const TableReport base = reproduce_tables();
  const std::vector<std::pair<std::string, std::function<Criterion()>>> criteria = {
      {"1 Table 2 reproduction", table2},
      {"2 Table 3 reproduction", table3},
      {"3 Table 4 reproduction", [&] { return table4(base); }},
      {"4 symbol counts", symbol_counts},
      {"5 property suite", [&] { return properties(base); }},
  };
  bool all = true;
  for (const auto& [name, run] : criteria) {
    Criterion c;
    try {
      c = run();
    } catch (const std::exception& e) {
      c.check(false, std::string("exception: ") + e.what());
    }
    all = all && c.pass;
    std::printf("criterion %s: %s\n", name.c_str(), c.pass ? "PASS" : "FAIL");
    for (const auto& l : c.lines) std::printf("    %s\n", l.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
