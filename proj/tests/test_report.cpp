#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "test_support.hpp"

using namespace versatility;

namespace {

const TableReport& report() {
  static const TableReport r = reproduce_tables();
  return r;
}

}  // namespace

TEST(Report, CoversEveryReferenceRow) {
  std::size_t expected = 0;
  for (const auto& ref : reference_rows())
    expected += (ref.components.size() + 1) * (ref.improper_prior ? 2 : 1);
  EXPECT_EQ(report().rows.size(), expected);
  std::set<int> tables;
  for (const auto& r : report().rows) tables.insert(r.table);
  EXPECT_EQ(tables, (std::set<int>{2, 3, 4}));
}

TEST(Report, DeviationColumns) {
  for (const auto& r : report().rows) {
    ASSERT_TRUE(r.value_computed.has_value()) << r.model;
    EXPECT_DOUBLE_EQ(r.abs_dev, std::abs(*r.value_computed - r.value_paper)) << r.model;
    EXPECT_DOUBLE_EQ(r.rel_dev, r.abs_dev / r.value_paper) << r.model;
  }
}

TEST(Report, ImproperPriorRowsAreExemptAndCarryBothPolicies) {
  std::size_t full = 0, truncated = 0;
  for (const auto& r : report().rows) {
    const bool gp = r.model == "genpoisson" || r.model == "genpoisson:lambda=1";
    EXPECT_EQ(r.exempt, gp) << r.model;
    if (!gp) continue;
    EXPECT_FALSE(r.notes.empty());
    for (const auto& f : r.flags) {
      full += f == "gp-policy-full";
      truncated += f == "gp-policy-truncated";
    }
  }
  EXPECT_EQ(full, 2u);
  EXPECT_EQ(truncated, 2u);
}

TEST(Report, TieRowsAreLabelled) {
  for (const auto& r : report().rows) {
    if (r.model != "negbinom") continue;
    const bool avg = r.parameterization == "average";
    EXPECT_EQ(std::count(r.flags.begin(), r.flags.end(), avg ? "tie-average" : "tie-component"), 1) << r.parameterization;
  }
}

TEST(Report, JsonSchemaAndDeterminism) {
  const auto j = to_json(report());
  for (const auto& row : j["rows"])
    for (const char* key : {"family", "parameterization", "k", "value_computed", "value_paper", "abs_dev", "rel_dev",
                            "flags"})
      EXPECT_TRUE(row.contains(key)) << key;
  EXPECT_EQ(j["prior"]["nodes"], 64);
  EXPECT_EQ(to_json(reproduce_tables()).dump(), j.dump());
}

TEST(Report, TextAndCsv) {
  const auto text = to_text(report());
  EXPECT_NE(text.find("Table 2"), std::string::npos);
  EXPECT_NE(text.find("Table 4"), std::string::npos);
  EXPECT_NE(text.find("2.71828"), std::string::npos);
  const auto csv = to_csv(report());
  EXPECT_EQ(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')), report().rows.size() + 1);
  EXPECT_NE(csv.find(",m/(m+1),"), std::string::npos);
  EXPECT_EQ(csv_field("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
  EXPECT_EQ(format6(3.14159265), "3.14159");
}
