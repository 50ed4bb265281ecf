// Command-line front end.
//
// Exit codes: 0 success, 2 usage / expression / catalog / parameter errors,
// 3 numeric failure (divergence, non-PSD matrix, refused prior policy),
// 4 `tables` ran but a non-exempt row deviates from its reference by >= 1%.

#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "versatility/versatility.hpp"

namespace {

using nlohmann::json;
using namespace versatility;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitDeviation = 4;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string family;
  std::vector<std::string> params;
  std::string parameterization;
  std::size_t nodes = 64;
  std::size_t mc_samples = 8192;
  std::uint64_t seed = 20170101;
  std::string gp_policy = "full";
  std::string output = "text";
  long long n = 1;
  std::optional<double> p;
  bool reciprocal = false;
  bool hessian_check = false;
  std::optional<double> grid_max;
  std::size_t grid_points = 201;
  std::string expr;
  std::string var = "y";
};

PriorSpec make_prior(const RunConfig& c) {
  PriorSpec p;
  p.nodes = c.nodes;
  p.mc_samples = c.mc_samples;
  p.seed = c.seed;
  if (c.gp_policy == "full")
    p.policy = ImproperPolicy::Full;
  else if (c.gp_policy == "truncated")
    p.policy = ImproperPolicy::Truncated;
  else
    p.policy = ImproperPolicy::Reject;
  return p;
}

void require_family(const RunConfig& c) {
  if (c.family.empty()) throw UsageError("--family is required");
}

// The distribution a parameter-point command works on: a family over its
// canonical parameters, or one printed form over its free parameters.
std::shared_ptr<const DistributionSpec> target_spec(const RunConfig& c) {
  require_family(c);
  if (c.parameterization.empty()) return families::family(c.family);
  return model(c.family).form(c.parameterization).spec_ptr();
}

ParamVector parse_params(const DistributionSpec& spec, const std::vector<std::string>& items) {
  std::map<std::string, double> given;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=value, got '" + item + "'");
    const std::string name = item.substr(0, eq);
    double v = 0.0;
    try {
      std::size_t used = 0;
      v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw UsageError("--param " + name + ": not a number");
    }
    if (!given.emplace(name, v).second) throw UsageError("--param " + name + " given twice");
  }
  std::vector<double> values;
  for (const auto& name : spec.param_names) {
    auto it = given.find(name);
    if (it == given.end()) throw UsageError(spec.family_id + " needs --param " + name + "=<value>");
    values.push_back(it->second);
    given.erase(it);
  }
  if (!given.empty()) throw UsageError(spec.family_id + " has no parameter '" + given.begin()->first + "'");
  ParamVector a(spec.param_names, values);
  spec.validate(a);
  return a;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json r = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
    rows.push_back(r);
  }
  return rows;
}

std::string matrix_text(const Eigen::MatrixXd& m, const std::string& indent) {
  std::string out;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out += indent + "[";
    for (Eigen::Index j = 0; j < m.cols(); ++j) out += (j ? ", " : "") + format6(m(i, j));
    out += "]\n";
  }
  return out;
}

std::string params_text(const ParamVector& a) {
  std::string s;
  for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + a.names()[i] + "=" + format6(a[i]);
  return s;
}

json params_json(const ParamVector& a) {
  json j = json::object();
  for (std::size_t i = 0; i < a.size(); ++i) j[a.names()[i]] = a[i];
  return j;
}

// Flat key/value output shared by the csv emitters of single-point commands.
void print_csv(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::cout << "key,value\n";
  for (const auto& [k, v] : kv) std::cout << csv_field(k) << ',' << csv_field(v) << '\n';
}

std::string full(double v) {
  std::ostringstream o;
  o.precision(17);
  o << v;
  return o.str();
}

void emit_density_grid(const DistributionSpec& spec, const ParamVector& a, const RunConfig& c) {
  const double max = *c.grid_max;
  if (!(max > 0.0)) throw UsageError("--emit-density-grid needs a positive upper end");
  std::printf("w,density\n");
  if (spec.is_discrete()) {
    for (double x = 0.0; x <= max; x += 1.0)
      std::printf("%.17g,%.17g\n", x, std::exp(eval_log_density(spec, x, a)));
    return;
  }
  if (c.grid_points < 2) throw UsageError("--grid-points must be at least 2");
  for (std::size_t i = 0; i < c.grid_points; ++i) {
    const double y = max * static_cast<double>(i) / static_cast<double>(c.grid_points - 1);
    std::printf("%.17g,%.17g\n", y, std::exp(eval_log_density(spec, y, a)));
  }
}

int cmd_versatility(const RunConfig& c) {
  require_family(c);
  const PriorSpec prior = make_prior(c);
  const auto r = versatility_final(c.family, prior);
  if (c.output == "json") {
    json j;
    j["model"] = r.model;
    j["value"] = r.value;
    j["method"] = std::string(to_string(r.method));
    j["error_estimate"] = r.error_estimate;
    json comps = json::array();
    for (const auto& p : r.per_parameterization)
      comps.push_back({{"label", p.label},
                       {"value", p.value},
                       {"error_estimate", p.error_estimate},
                       {"symbols", p.symbols},
                       {"bayesian_fim", matrix_json(p.fim.mean)}});
    j["per_parameterization"] = comps;
    j["bayesian_fim"] = matrix_json(r.bayesian_fim);
    json counts = json::array();
    for (const auto& s : r.symbol_counts) counts.push_back({{"label", s.label}, {"symbols", s.count}});
    j["symbol_counts"] = counts;
    j["policy_notes"] = r.policy_notes;
    j["prior"] = prior_json(prior);
    j["prior"]["policy"] = std::string(to_string(prior.policy));
    std::cout << j.dump(2) << '\n';
  } else if (c.output == "csv") {
    std::vector<std::pair<std::string, std::string>> kv = {
        {"model", r.model}, {"value", full(r.value)}, {"method", std::string(to_string(r.method))},
        {"error_estimate", full(r.error_estimate)}};
    for (const auto& p : r.per_parameterization) kv.emplace_back("value[" + p.label + "]", full(p.value));
    for (const auto& n : r.policy_notes) kv.emplace_back("note", n);
    print_csv(kv);
  } else {
    std::cout << r.model << "\n";
    std::cout << "  V = " << format6(r.value) << "  (" << to_string(r.method) << ")\n";
    for (const auto& p : r.per_parameterization)
      std::cout << "  form " << p.label << ": " << format6(p.value) << "  [" << p.symbols << " symbols, halving change "
                << format6(p.error_estimate) << "]\n";
    std::cout << "  symbol counts:";
    for (const auto& s : r.symbol_counts) std::cout << ' ' << s.label << '=' << s.count;
    std::cout << "\n  Bayesian FIM:\n" << matrix_text(r.bayesian_fim, "    ");
    for (const auto& n : r.policy_notes) std::cout << "  note: " << n << '\n';
  }
  return kExitOk;
}

int cmd_fisher(const RunConfig& c) {
  const auto spec = target_spec(c);
  const ParamVector a = parse_params(*spec, c.params);
  if (c.grid_max) {
    emit_density_grid(*spec, a, c);
    return kExitOk;
  }
  const FisherMatrix fm = fisher_matrix(*spec, a);
  const double jeff = jeffreys_density(*spec, a);
  std::optional<CramerRaoBound> crb;
  if (a.size() == 1) crb = cramer_rao_bound(*spec, a, c.n);
  std::optional<double> hess;
  if (c.hessian_check) hess = fisher_hessian_check(*spec, a);
  const std::string note = spec->admissibility_note ? spec->admissibility_note(a.values()) : "";

  if (c.output == "json") {
    json j;
    j["family"] = spec->family_id;
    if (!c.parameterization.empty()) j["parameterization"] = c.parameterization;
    j["parameters"] = params_json(a);
    j["method"] = std::string(to_string(fm.method));
    j["fisher"] = matrix_json(fm.entries);
    j["error_estimate"] = fm.error_estimate;
    j["jeffreys_density"] = jeff;
    if (crb) j["cramer_rao_bound"] = {{"n", c.n}, {"value", crb->infinite ? json(nullptr) : json(crb->value)}};
    if (hess) j["hessian_deviation"] = *hess;
    if (!note.empty()) j["note"] = note;
    std::cout << j.dump(2) << '\n';
  } else if (c.output == "csv") {
    std::vector<std::pair<std::string, std::string>> kv = {{"family", spec->family_id},
                                                           {"method", std::string(to_string(fm.method))}};
    for (Eigen::Index i = 0; i < fm.entries.rows(); ++i)
      for (Eigen::Index j = 0; j < fm.entries.cols(); ++j)
        kv.emplace_back("fisher[" + std::to_string(i) + "][" + std::to_string(j) + "]", full(fm.entries(i, j)));
    kv.emplace_back("jeffreys_density", full(jeff));
    if (crb) kv.emplace_back("cramer_rao_bound", crb->infinite ? "inf" : full(crb->value));
    if (hess) kv.emplace_back("hessian_deviation", full(*hess));
    if (!note.empty()) kv.emplace_back("note", note);
    print_csv(kv);
  } else {
    std::cout << spec->family_id << " at " << params_text(a) << "\n";
    std::cout << "  method: " << to_string(fm.method) << "\n  Fisher information:\n" << matrix_text(fm.entries, "    ");
    std::cout << "  Jeffreys density: " << format6(jeff) << "\n";
    if (crb)
      std::cout << "  Cramer-Rao bound (n=" << c.n << "): " << (crb->infinite ? "inf" : format6(crb->value)) << "\n";
    if (hess) std::cout << "  Hessian-form deviation: " << format6(*hess) << "\n";
    if (!note.empty()) std::cout << "  note: " << note << "\n";
  }
  return kExitOk;
}

int cmd_entropy(const RunConfig& c) {
  const auto spec = target_spec(c);
  const ParamVector a = parse_params(*spec, c.params);
  if (c.grid_max) {
    emit_density_grid(*spec, a, c);
    return kExitOk;
  }
  const EntropyResult h = shannon_entropy(*spec, a);
  const double eh = std::exp(h.value);
  std::optional<PowerMeanResult> pm;
  const auto conv = c.reciprocal ? PowerMeanConvention::Reciprocal : PowerMeanConvention::Density;
  if (c.p) pm = power_mean_simplicity(*spec, a, *c.p, conv);

  if (c.output == "json") {
    json j;
    j["family"] = spec->family_id;
    j["parameters"] = params_json(a);
    j["entropy"] = {{"value", h.value}, {"kind", std::string(to_string(h.kind))}, {"error", h.numeric_error_estimate}};
    j["exponentiated_entropy"] = eh;
    if (pm)
      j["power_mean"] = {{"p", *c.p},
                         {"convention", c.reciprocal ? "reciprocal" : "density"},
                         {"value", pm->divergent ? json(nullptr) : json(pm->value)},
                         {"divergent", pm->divergent}};
    std::cout << j.dump(2) << '\n';
  } else if (c.output == "csv") {
    std::vector<std::pair<std::string, std::string>> kv = {{"family", spec->family_id},
                                                           {"entropy", full(h.value)},
                                                           {"kind", std::string(to_string(h.kind))},
                                                           {"exponentiated_entropy", full(eh)}};
    if (pm) kv.emplace_back("power_mean", pm->divergent ? "inf" : full(pm->value));
    print_csv(kv);
  } else {
    std::cout << spec->family_id << " at " << params_text(a) << "\n";
    std::cout << "  " << to_string(h.kind) << " entropy: " << format6(h.value) << " nats\n";
    std::cout << "  exponentiated entropy: " << format6(eh) << "\n";
    if (pm)
      std::cout << "  power mean (p=" << format6(*c.p) << ", " << (c.reciprocal ? "reciprocal" : "density")
                << "): " << (pm->divergent ? "inf (divergent)" : format6(pm->value)) << "\n";
  }
  return kExitOk;
}

int cmd_symbols(const RunConfig& c) {
  if (c.expr.empty()) throw UsageError("--expr is required");
  const auto tokens = symbols::tokenize(c.expr, c.var);
  const auto ast = symbols::parse(tokens);
  const std::size_t count = symbols::symbol_count(*ast);
  if (c.output == "json") {
    json toks = json::array();
    for (const auto& t : tokens)
      toks.push_back({{"kind", std::string(to_string(t.kind))}, {"lexeme", t.lexeme}, {"position", t.position}});
    json j = {{"expression", c.expr}, {"variable", c.var}, {"count", count}, {"tokens", toks},
              {"rendered", symbols::render(*ast)}};
    std::cout << j.dump(2) << '\n';
  } else if (c.output == "csv") {
    std::cout << "position,kind,lexeme\n";
    for (const auto& t : tokens) std::cout << t.position << ',' << to_string(t.kind) << ',' << csv_field(t.lexeme) << '\n';
  } else {
    std::cout << count << " symbols\n";
    for (const auto& t : tokens) std::cout << "  " << to_string(t.kind) << "  " << t.lexeme << "\n";
  }
  return kExitOk;
}

int cmd_tables(const RunConfig& c) {
  const TableReport report = reproduce_tables(make_prior(c));
  if (c.output == "json")
    std::cout << to_json(report).dump(2) << '\n';
  else if (c.output == "csv")
    std::cout << to_csv(report);
  else
    std::cout << to_text(report);
  if (report.any_failed()) return kExitNumeric;
  return report.all_within(0.01) ? kExitOk : kExitDeviation;
}

int exit_code_for(const Error& e) {
  if (dynamic_cast<const ExpressionError*>(&e) || dynamic_cast<const CatalogError*>(&e) ||
      dynamic_cast<const ParameterArityError*>(&e) || dynamic_cast<const DomainError*>(&e) ||
      dynamic_cast<const SupportError*>(&e))
    return kExitUsage;
  return kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Functional versatility of parametric distributions"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "key=value file mirroring the long flags; flags win");

  RunConfig c;
  app.add_option("--family", c.family, "family id (fisher, entropy) or catalog model id (versatility)");
  app.add_option("--param", c.params, "parameter value as name=value; repeatable")->delimiter(',');
  app.add_option("--parameterization", c.parameterization, "printed form of a catalog model, by label");
  app.add_option("--nodes", c.nodes, "Gauss-Hermite nodes per prior dimension")
      ->check(CLI::Range(std::size_t{16}, std::size_t{512}));
  app.add_option("--mc-samples", c.mc_samples, "quasi-random prior points when k > 3")->check(CLI::PositiveNumber);
  app.add_option("--seed", c.seed, "seed of the quasi-random rotation");
  app.add_option("--gp-policy", c.gp_policy, "prior mass where the model is improper")
      ->check(CLI::IsMember({"full", "truncated", "reject"}));
  app.add_option("--output", c.output, "output format")->check(CLI::IsMember({"text", "json", "csv"}));
  app.add_option("--n", c.n, "sample size for the Cramer-Rao bound")->check(CLI::PositiveNumber);
  app.add_option("--p", c.p, "order of the power-mean simplicity")->check(CLI::PositiveNumber);
  app.add_flag("--reciprocal", c.reciprocal, "power mean of 1/f instead of the inverse power mean of f");
  app.add_flag("--hessian-check", c.hessian_check, "also report the Hessian-form deviation");
  app.add_option("--emit-density-grid", c.grid_max, "print density on [0, MAX] as CSV instead of the report");
  app.add_option("--grid-points", c.grid_points, "grid size for continuous families");
  app.add_option("--expr", c.expr, "expression for the symbols command");
  app.add_option("--var", c.var, "outcome variable of the expression");

  auto* versatility_cmd = app.add_subcommand("versatility", "V of the fewest-symbol form(s) of a catalog model");
  auto* fisher_cmd = app.add_subcommand("fisher", "Fisher information, Jeffreys density, Cramer-Rao bound");
  auto* entropy_cmd = app.add_subcommand("entropy", "entropy, exponentiated entropy, power-mean simplicity");
  auto* symbols_cmd = app.add_subcommand("symbols", "symbol count and token dump of an expression");
  auto* tables_cmd = app.add_subcommand("tables", "recompute the reference tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (versatility_cmd->parsed()) return cmd_versatility(c);
    if (fisher_cmd->parsed()) return cmd_fisher(c);
    if (entropy_cmd->parsed()) return cmd_entropy(c);
    if (symbols_cmd->parsed()) return cmd_symbols(c);
    if (tables_cmd->parsed()) return cmd_tables(c);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e);
  }
  return kExitUsage;
}
