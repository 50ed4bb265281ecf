#pragma once

// Recomputes every versatility value of the three reference tables and
// compares it with the published figure.

#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"  // nlohmann/json, vendored

#include "versatility/catalog.hpp"
#include "versatility/errors.hpp"
#include "versatility/prior.hpp"

namespace versatility {

struct ReferenceRow {
  int table;
  std::string model;
  /// Published values of tied forms, by label; empty when a single form is used.
  std::vector<std::pair<std::string, double>> components;
  double value;
  bool improper_prior = false;  // computed under both GP prior policies
};

/// The published reference values, in table order.
inline const std::vector<ReferenceRow>& reference_rows() {
  static const std::vector<ReferenceRow> rows = {
      {2, "exponential", {}, 2.7183},
      {2, "gamma:lambda=1", {}, 2.8399},
      {2, "weibull:lambda=1", {}, 3.6709},
      {3, "gamma", {}, 3.1264},
      {3, "gamma:r=1", {}, 2.7183},
      {3, "gamma:lambda=1", {}, 2.8399},
      {3, "weibull", {}, 3.4349},
      {3, "weibull:tau=1", {}, 2.7183},
      {3, "weibull:lambda=1", {}, 3.6709},
      {3, "pareto2", {}, 2.0874},
      {3, "pareto2:alpha=1", {}, 1.5694},
      {3, "pareto2:theta=1", {}, 2.7183},
      {3, "lognormal", {}, 3.2327},
      {3, "lognormal:nu=1", {}, 3.8440},
      {3, "lognormal:sigma=1", {}, 1.0000},
      {4, "negbinom", {{"m/(m+1)", 1.7910}, {"1/(m+1)", 1.1721}}, 1.4816},
      {4, "negbinom:r=1", {{"m/(m+1)", 2.4981}, {"1/(m+1)", 1.0718}}, 1.7850},
      {4, "negbinom:p=1/2", {}, 1.0151},
      {4, "discreteweibull", {{"m/(m+1)", 2.4379}, {"1/(m+1)", 1.6791}}, 2.0585},
      {4, "discreteweibull:tau=1", {{"m/(m+1)", 2.4981}, {"1/(m+1)", 1.0718}}, 1.7850},
      {4, "discreteweibull:q=1/2", {}, 2.7160},
      {4, "waring", {}, 1.3997},
      {4, "waring:alpha=1", {}, 0.9423},
      {4, "waring:theta=1", {}, 2.2441},
      {4, "genpoisson", {}, 1.3794, true},
      {4, "genpoisson:lambda=1", {}, 1.7124, true},
      {4, "genpoisson:varsigma=0", {}, 1.2840},
  };
  return rows;
}

struct TableRow {
  int table = 0;
  std::string family;            // family identifier of the computed form
  std::string model;             // catalog model, e.g. "negbinom:r=1"
  std::string parameterization;  // form label, or "average" for a tie mean
  std::size_t k = 0;
  std::optional<double> value_computed;  // empty when the computation failed
  double value_paper = 0.0;
  double abs_dev = 0.0;
  double rel_dev = 0.0;
  double error_estimate = 0.0;  // relative change under node halving
  std::string method;
  std::vector<std::string> flags;
  std::vector<std::string> notes;
  /// Flagged rows whose deviation does not count against the run: failed
  /// computations and rows depending on the GP prior policy.
  bool exempt = false;
};

struct TableReport {
  PriorSpec prior;
  std::vector<TableRow> rows;

  bool any_failed() const {
    for (const auto& r : rows)
      if (!r.value_computed) return true;
    return false;
  }
  /// True if every non-exempt row is within `rel_tol` of the published value.
  bool all_within(double rel_tol) const {
    for (const auto& r : rows)
      if (!r.exempt && !(r.rel_dev < rel_tol)) return false;
    return true;
  }
};

namespace detail {

inline void set_deviation(TableRow& r) {
  if (!r.value_computed) return;
  r.abs_dev = std::abs(*r.value_computed - r.value_paper);
  r.rel_dev = r.abs_dev / std::abs(r.value_paper);
}

inline std::vector<TableRow> rows_for(const ReferenceRow& ref, const PriorSpec& prior, const std::string& tag) {
  std::vector<TableRow> out;
  const Model& m = model(ref.model);
  TableRow head;
  head.table = ref.table;
  head.model = ref.model;
  head.family = m.forms.front().family().family_id;
  head.k = m.arity();
  head.value_paper = ref.value;
  if (!tag.empty()) {
    head.flags.push_back(tag);
    head.exempt = true;
  }
  try {
    const auto res = versatility_final(ref.model, prior);
    head.method = std::string(to_string(res.method));
    head.error_estimate = res.error_estimate;
    head.notes = res.policy_notes;
    for (const auto& [label, published] : ref.components) {
      TableRow c = head;
      c.parameterization = label;
      c.value_paper = published;
      c.flags.push_back("tie-component");
      c.notes.clear();
      for (const auto& p : res.per_parameterization)
        if (p.label == label) {
          c.value_computed = p.value;
          c.error_estimate = p.error_estimate;
        }
      if (c.error_estimate > kPriorConvergenceWarning) c.flags.push_back("prior-unconverged");
      if (!c.value_computed) {
        c.flags.push_back("failed");
        c.exempt = true;
        c.notes.push_back("form '" + label + "' is not among the fewest-symbol forms");
      }
      set_deviation(c);
      out.push_back(std::move(c));
    }
    if (res.error_estimate > kPriorConvergenceWarning) head.flags.push_back("prior-unconverged");
    head.value_computed = res.value;
    head.parameterization = ref.components.empty() ? res.per_parameterization.front().label : "average";
    if (!ref.components.empty()) head.flags.push_back("tie-average");
  } catch (const Error& e) {
    head.flags.push_back("failed");
    head.exempt = true;
    head.notes.push_back(e.what());
  }
  set_deviation(head);
  out.push_back(std::move(head));
  return out;
}

}  // namespace detail

/// Every reference row recomputed under `prior`. Rows on an improper prior
/// region are computed once per policy (full and truncated) regardless of
/// prior.policy. A failing row is flagged and the run continues.
inline TableReport reproduce_tables(const PriorSpec& prior = {}) {
  TableReport report;
  report.prior = prior;
  for (const auto& ref : reference_rows()) {
    if (!ref.improper_prior) {
      for (auto& r : detail::rows_for(ref, prior, "")) report.rows.push_back(std::move(r));
      continue;
    }
    for (const auto policy : {ImproperPolicy::Full, ImproperPolicy::Truncated}) {
      PriorSpec p = prior;
      p.policy = policy;
      const std::string tag = "gp-policy-" + std::string(to_string(policy));
      for (auto& r : detail::rows_for(ref, p, tag)) report.rows.push_back(std::move(r));
    }
  }
  return report;
}

// ---- emitters ----

inline nlohmann::json prior_json(const PriorSpec& p) {
  return {{"nodes", p.nodes},
          {"scheme", p.scheme == QuadratureScheme::GaussHermite ? "gauss-hermite" : "quasi-monte-carlo"},
          {"mc_samples", p.mc_samples},
          {"seed", p.seed},
          {"prune_weight", p.prune_weight},
          {"marginal", "lognormal(0, 1)"}};
}

inline nlohmann::json to_json(const TableRow& r) {
  nlohmann::json j;
  j["table"] = r.table;
  j["family"] = r.family;
  j["model"] = r.model;
  j["parameterization"] = r.parameterization;
  j["k"] = r.k;
  j["value_computed"] = r.value_computed ? nlohmann::json(*r.value_computed) : nlohmann::json(nullptr);
  j["value_paper"] = r.value_paper;
  j["abs_dev"] = r.value_computed ? nlohmann::json(r.abs_dev) : nlohmann::json(nullptr);
  j["rel_dev"] = r.value_computed ? nlohmann::json(r.rel_dev) : nlohmann::json(nullptr);
  j["error_estimate"] = r.error_estimate;
  j["method"] = r.method;
  j["flags"] = r.flags;
  j["notes"] = r.notes;
  return j;
}

inline nlohmann::json to_json(const TableReport& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : t.rows) rows.push_back(to_json(r));
  return {{"prior", prior_json(t.prior)}, {"rows", rows}};
}

/// Six significant digits, as used by every text emitter.
inline std::string format6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string to_text(const TableReport& t) {
  std::ostringstream o;
  char line[256];
  int table = 0;
  for (const auto& r : t.rows) {
    if (r.table != table) {
      table = r.table;
      o << (table == 2 ? "" : "\n") << "Table " << table << "\n";
      std::snprintf(line, sizeof line, "  %-24s %-10s %10s %10s %11s  %s\n", "model", "form", "computed", "reference",
                    "rel_dev", "flags");
      o << line;
    }
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ",") + f;
    std::snprintf(line, sizeof line, "  %-24s %-10s %10s %10s %11s  %s\n", r.model.c_str(),
                  r.parameterization.c_str(), r.value_computed ? format6(*r.value_computed).c_str() : "failed",
                  format6(r.value_paper).c_str(), r.value_computed ? format6(r.rel_dev).c_str() : "-", flags.c_str());
    o << line;
    for (const auto& n : r.notes) o << "      " << n << "\n";
  }
  return o.str();
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

inline std::string to_csv(const TableReport& t) {
  std::ostringstream o;
  o.precision(17);
  o << "table,family,model,parameterization,k,value_computed,value_paper,abs_dev,rel_dev,flags\n";
  for (const auto& r : t.rows) {
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    o << r.table << ',' << r.family << ',' << csv_field(r.model) << ',' << csv_field(r.parameterization) << ','
      << r.k << ',';
    if (r.value_computed)
      o << *r.value_computed << ',' << r.value_paper << ',' << r.abs_dev << ',' << r.rel_dev;
    else
      o << ',' << r.value_paper << ",,";
    o << ',' << csv_field(flags) << '\n';
  }
  return o.str();
}

}  // namespace versatility
