//
// Copyright 2026 The cdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "cdp/bench.h"

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "testing/status_matchers.h"

namespace cdp {
namespace {

using ::cdp::testing::StatusIs;
using ::testing::ElementsAre;

constexpr char kCity[] =
    "node,parent,level\n"
    "city,,1\n"
    "north,city,2\n"
    "south,city,2\n"
    "n1,north,3\n"
    "n2,north,3\n"
    "s1,south,3\n";

Hierarchy City() {
  std::istringstream in(kCity);
  return *Hierarchy::FromCsv(in);
}

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.epsilons = {0.5, 1.0, 2.0};
  c.mechanisms = {BenchMechanism::kMh, BenchMechanism::kTopDown,
                  BenchMechanism::kImage, BenchMechanism::kRejection};
  c.repetitions = 4;
  c.seed = 42;
  c.synth = SynthSpec{.levels = 3, .branching = {3, 2}, .leaf_mean = 50.0};
  c.mh.burn_in = 2000;
  return c;
}

const ResultRow& Find(const ResultTable& t, double eps, const std::string& level,
                      const std::string& mech) {
  for (const ResultRow& r : t.rows) {
    if (r.epsilon == eps && r.level == level && r.mechanism == mech) return r;
  }
  ADD_FAILURE() << "no row " << eps << " " << level << " " << mech;
  return t.rows.front();
}

TEST(MechanismNameTest, RoundTrip) {
  for (BenchMechanism m : {BenchMechanism::kMh, BenchMechanism::kTopDown,
                           BenchMechanism::kImage, BenchMechanism::kRejection}) {
    ASSERT_OK_AND_ASSIGN(BenchMechanism back, ParseMechanism(MechanismName(m)));
    EXPECT_EQ(back, m);
  }
  EXPECT_FALSE(ParseMechanism("bogus").ok());
}

TEST(SynthDataTest, ShapeAndDeterminism) {
  ASSERT_OK_AND_ASSIGN(HierarchicalData d, SynthData(SynthSpec{}, 7));
  EXPECT_EQ(d.hierarchy.size(), 31);
  EXPECT_EQ(d.x.size(), 31);
  EXPECT_EQ(d.hierarchy.num_levels(), 3);
  ASSERT_OK_AND_ASSIGN(HierarchicalData again, SynthData(SynthSpec{}, 7));
  EXPECT_EQ(again.x, d.x);
  ASSERT_OK_AND_ASSIGN(HierarchicalData other, SynthData(SynthSpec{}, 8));
  EXPECT_NE(other.x, d.x);
  EXPECT_DOUBLE_EQ(d.x[d.hierarchy.root()], d.x.head(24).sum());
}

TEST(SynthDataTest, PoissonLeafMoments) {
  const SynthSpec spec{.levels = 2, .branching = {10000}, .leaf_mean = 1000.0};
  ASSERT_OK_AND_ASSIGN(HierarchicalData d, SynthData(spec, 3));
  const Vector leaves = d.x.head(10000);
  const double mean = leaves.mean();
  const double var = (leaves.array() - mean).square().sum() / (leaves.size() - 1);
  EXPECT_NEAR(mean, 1000.0, 50.0);
  EXPECT_NEAR(var, 1000.0, 50.0);  // Poisson: variance equals the mean
  for (double x : leaves) EXPECT_EQ(x, std::round(x));
}

TEST(SynthDataTest, InvalidSpec) {
  EXPECT_THAT(SynthData(SynthSpec{.levels = 3, .branching = {2}}, 1),
              StatusIs(absl::StatusCode::kInvalidArgument, "InvalidSpec"));
  EXPECT_THAT(SynthData(SynthSpec{.levels = 2, .branching = {2}, .leaf_mean = 0}, 1),
              StatusIs(absl::StatusCode::kInvalidArgument, "InvalidSpec"));
}

TEST(CountsTest, AggregatesLeaves) {
  std::istringstream counts("node,count\nn1,4\ns1,7\nn2,1\n");
  ASSERT_OK_AND_ASSIGN(HierarchicalData d, CountsFromCsv(counts, City()));
  // n1, n2, s1, north, south, city
  EXPECT_THAT(std::vector<double>(d.x.begin(), d.x.end()),
              ElementsAre(4, 1, 7, 5, 7, 12));
}

TEST(CountsTest, SingleLeaf) {
  std::istringstream h("node,parent,level\nroot,,1\nleaf,root,2\n");
  std::istringstream counts("id,count\nleaf,5\n");
  ASSERT_OK_AND_ASSIGN(HierarchicalData d,
                       CountsFromCsv(counts, *Hierarchy::FromCsv(h)));
  EXPECT_THAT(std::vector<double>(d.x.begin(), d.x.end()), ElementsAre(5, 5));
}

TEST(CountsTest, Errors) {
  auto load = [](const char* text) {
    std::istringstream in(text);
    return CountsFromCsv(in, City());
  };
  EXPECT_THAT(load("node,count\nn1,4\ns1,-7\nn2,1\n"),
              StatusIs(absl::StatusCode::kInvalidArgument, "NegativeCount"));
  EXPECT_THAT(load("node,count\nn1,4\ns1,7\n"),
              StatusIs(absl::StatusCode::kInvalidArgument, "HierarchyMismatch"));
  EXPECT_THAT(load("node,count\nn1,4\ns1,7\nn2,1\nnorth,5\n"),
              StatusIs(absl::StatusCode::kInvalidArgument, "HierarchyMismatch"));
  EXPECT_THAT(load("node,count\nn1,4\nn1,4\ns1,7\nn2,1\n"),
              StatusIs(absl::StatusCode::kInvalidArgument, "HierarchyMismatch"));
  EXPECT_THAT(load("node,total\nn1,4\n"),
              StatusIs(absl::StatusCode::kInvalidArgument, "ParseError"));
  EXPECT_THAT(load("node,count\nn1,abc\ns1,7\nn2,1\n"),
              StatusIs(absl::StatusCode::kInvalidArgument, "ParseError"));
}

TEST(ConfigTest, JsonDefaultsAndPaths) {
  ASSERT_OK_AND_ASSIGN(
      ExperimentConfig c,
      ExperimentConfig::FromJson(R"({"hierarchy_path": "h.csv", "counts_path": "/abs/c.csv"})",
                                 "/data/dir"));
  EXPECT_THAT(c.epsilons, ElementsAre(0.5, 1.0, 2.0));
  EXPECT_EQ(c.mechanisms.size(), 4u);
  EXPECT_EQ(c.hierarchy_path, "/data/dir/h.csv");
  EXPECT_EQ(c.counts_path, "/abs/c.csv");
  EXPECT_OK(c.Validate());

  ASSERT_OK_AND_ASSIGN(
      ExperimentConfig s,
      ExperimentConfig::FromJson(
          R"({"synth": {"branching": [2, 2]}, "mh": {"release": "chain_mean", "target": "leaf"}})",
          "."));
  ASSERT_TRUE(s.synth.has_value());
  EXPECT_EQ(s.synth->levels, 3);
  EXPECT_EQ(s.mh.release, MhRelease::kChainMean);
  EXPECT_EQ(s.mh.target, MhTarget::kLeafOnly);
  EXPECT_EQ(s.mh.init, MhInit::kRandomFeasible);
  ASSERT_OK_AND_ASSIGN(ExperimentConfig q,
                       ExperimentConfig::FromJson(R"({"synth": {}, "mh": {"init": "query"}})", "."));
  EXPECT_EQ(q.mh.init, MhInit::kAtQueryValue);

  EXPECT_THAT(ExperimentConfig::FromJson(R"({"epsilon": [1]})", "."),
              StatusIs(absl::StatusCode::kInvalidArgument, "InvalidConfig"));
  EXPECT_THAT(ExperimentConfig::FromJson(R"({"mh": {"release": "x"}})", "."),
              StatusIs(absl::StatusCode::kInvalidArgument, "InvalidConfig"));
  EXPECT_THAT(ExperimentConfig::FromJson("{not json", "."),
              StatusIs(absl::StatusCode::kInvalidArgument, "ParseError"));
  ExperimentConfig bad = SmallConfig();
  bad.epsilons = {1.0, -1.0};
  EXPECT_THAT(bad.Validate(), StatusIs(absl::StatusCode::kInvalidArgument, "InvalidConfig"));
}

TEST(NormalizedL1Test, AveragesOverIndices) {
  Vector x(4), y(4);
  x << 1, 2, 3, 4;
  y << 2, 2, 0, 4;
  EXPECT_DOUBLE_EQ(NormalizedL1(x, y, {0, 1, 2, 3}), 1.0);
  EXPECT_DOUBLE_EQ(NormalizedL1(x, y, {2}), 3.0);
}

TEST(RunBenchmarkTest, ZeroNoiseGivesZeroError) {
  ExperimentConfig c = SmallConfig();
  c.zero_noise = true;
  ASSERT_OK_AND_ASSIGN(BenchResult r, RunBenchmark(c));
  EXPECT_FALSE(r.partial_failure());
  for (const ResultRow& row : r.table.rows) {
    EXPECT_EQ(row.mean_l1, 0.0) << row.mechanism << " " << row.level;
  }
}

TEST(RunBenchmarkTest, HugeBudgetGivesTinyError) {
  ExperimentConfig c = SmallConfig();
  c.epsilons = {1e6};
  ASSERT_OK_AND_ASSIGN(BenchResult r, RunBenchmark(c));
  EXPECT_FALSE(r.partial_failure());
  for (const ResultRow& row : r.table.rows) {
    EXPECT_LT(row.mean_l1, 1e-3) << row.mechanism << " " << row.level;
  }
}

TEST(RunBenchmarkTest, TableLayoutAndIdentities) {
  const ExperimentConfig c = SmallConfig();
  ASSERT_OK_AND_ASSIGN(HierarchicalData data, LoadExperimentData(c));
  ASSERT_OK_AND_ASSIGN(BenchResult r, RunBenchmark(c, data));
  EXPECT_FALSE(r.partial_failure());
  EXPECT_EQ(r.releases, 3 * 4 * 4);
  EXPECT_LE(r.max_equality_residual, 1e-9);
  // Three budgets, levels 1..3 plus "all", four mechanisms.
  ASSERT_EQ(r.table.rows.size(), 3u * 4u * 4u);
  EXPECT_EQ(r.table.rows[0].level, "1");
  EXPECT_EQ(r.table.rows[0].mechanism, "mh");
  EXPECT_EQ(r.table.rows[4].level, "2");
  EXPECT_EQ(r.table.rows[12].level, "all");
  EXPECT_EQ(r.table.rows[16].epsilon, 1.0);

  const Hierarchy& h = data.hierarchy;
  for (double eps : c.epsilons) {
    for (const char* mech : {"mh", "topdown", "image", "rejection"}) {
      // Node-weighted average of the per-level errors is the overall error.
      double weighted = 0.0;
      for (int level = 1; level <= h.num_levels(); ++level) {
        weighted += Find(r.table, eps, std::to_string(level), mech).mean_l1 *
                    h.LevelIndices(level).size();
      }
      EXPECT_NEAR(weighted / h.size(), Find(r.table, eps, "all", mech).mean_l1, 1e-9);
    }
  }
  for (const char* mech : {"mh", "topdown", "image", "rejection"}) {
    for (const char* level : {"1", "2", "3", "all"}) {
      const double a = Find(r.table, 0.5, level, mech).mean_l1;
      const double b = Find(r.table, 1.0, level, mech).mean_l1;
      const double d = Find(r.table, 2.0, level, mech).mean_l1;
      EXPECT_GT(a, b) << mech << " " << level;
      EXPECT_GT(b, d) << mech << " " << level;
    }
  }
  // Linear post-processing of paired noise: errors scale exactly with 1/eps.
  for (const char* mech : {"topdown", "image"}) {
    const double a = Find(r.table, 0.5, "all", mech).mean_l1;
    const double b = Find(r.table, 1.0, "all", mech).mean_l1;
    EXPECT_NEAR(a / b, 2.0, 1e-9);
  }

  ASSERT_OK_AND_ASSIGN(BenchResult again, RunBenchmark(c, data));
  for (size_t i = 0; i < r.table.rows.size(); ++i) {
    EXPECT_EQ(again.table.rows[i].mean_l1, r.table.rows[i].mean_l1);
  }
}

// A stuck chain must not hand back the query value itself.
TEST(RunBenchmarkTest, MhReleaseMovesOnLargerHierarchies) {
  ExperimentConfig c = SmallConfig();
  c.synth = SynthSpec{};  // 24 leaves
  c.mechanisms = {BenchMechanism::kMh};
  c.epsilons = {1.0};
  c.mh.burn_in = 10000;
  ASSERT_OK_AND_ASSIGN(BenchResult r, RunBenchmark(c));
  for (const ResultRow& row : r.table.rows) EXPECT_GT(row.mean_l1, 0.1) << row.level;
}

TEST(RunBenchmarkTest, ThreadCountDoesNotChangeResults) {
  ExperimentConfig c = SmallConfig();
  c.mechanisms = {BenchMechanism::kTopDown, BenchMechanism::kMh};
  c.threads = 1;
  ASSERT_OK_AND_ASSIGN(BenchResult one, RunBenchmark(c));
  c.threads = 4;
  ASSERT_OK_AND_ASSIGN(BenchResult four, RunBenchmark(c));
  ASSERT_EQ(one.table.rows.size(), four.table.rows.size());
  for (size_t i = 0; i < one.table.rows.size(); ++i) {
    EXPECT_EQ(one.table.rows[i].mean_l1, four.table.rows[i].mean_l1);
  }
}

TEST(RunBenchmarkTest, FailedCellsBecomeNanRows) {
  ExperimentConfig c = SmallConfig();
  c.mechanisms = {BenchMechanism::kRejection, BenchMechanism::kTopDown};
  c.rejection_max_tries = 1;
  c.synth = SynthSpec{.levels = 2, .branching = {40}, .leaf_mean = 10.0};
  ASSERT_OK_AND_ASSIGN(BenchResult r, RunBenchmark(c));
  EXPECT_TRUE(r.partial_failure());
  const ResultRow& bad = Find(r.table, 1.0, "all", "rejection");
  EXPECT_TRUE(std::isnan(bad.mean_l1));
  EXPECT_THAT(bad.note, ::testing::HasSubstr("AcceptanceTimeout"));
  EXPECT_FALSE(std::isnan(Find(r.table, 1.0, "all", "topdown").mean_l1));
}

TEST(TableTest, CsvRoundTripAndEmpty) {
  ResultTable t;
  t.rows.push_back({0.5, "1", "mh", 1.0 / 3.0, 0.1, ""});
  t.rows.push_back({0.5, "all", "topdown", std::nan(""), std::nan(""), "boom"});
  ASSERT_OK_AND_ASSIGN(std::string csv, EmitTable(t, TableFormat::kCsv));
  ASSERT_OK_AND_ASSIGN(ResultTable back, ParseTableCsv(csv));
  ASSERT_EQ(back.rows.size(), 2u);
  EXPECT_EQ(back.rows[0].mean_l1, 1.0 / 3.0);
  EXPECT_EQ(back.rows[0].level, "1");
  EXPECT_TRUE(std::isnan(back.rows[1].mean_l1));
  for (TableFormat f : {TableFormat::kJson, TableFormat::kGnuplot, TableFormat::kWide}) {
    ASSERT_OK_AND_ASSIGN(std::string s, EmitTable(t, f));
    EXPECT_FALSE(s.empty());
  }
  EXPECT_THAT(EmitTable(ResultTable{}, TableFormat::kCsv),
              StatusIs(absl::StatusCode::kInvalidArgument, "EmptyTable"));
}

}  // namespace
}  // namespace cdp
