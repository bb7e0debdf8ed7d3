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

#ifndef CDP_CORE_BENCH_H_
#define CDP_CORE_BENCH_H_

// Accuracy sweep over privacy budgets: perturb a hierarchy of counts, make
// the release consistent with each mechanism, and tabulate normalized L1
// error per level.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "cdp/hierarchy.h"
#include "cdp/revision.h"
#include "cdp/types.h"

namespace cdp {

enum class BenchMechanism { kMh, kTopDown, kImage, kRejection };

std::string MechanismName(BenchMechanism m);
absl::StatusOr<BenchMechanism> ParseMechanism(std::string_view name);

// Complete tree with branching[k] children per level-(k+1) node and
// Poisson(leaf_mean) leaf counts.
struct SynthSpec {
  int levels = 3;
  std::vector<int> branching = {6, 4};
  double leaf_mean = 1000.0;
};

enum class MhRelease {
  // One post-burn-in draw: the conditioned mechanism itself.
  kDraw,
  // Mean of the post-burn-in chain. This is a different mechanism, kept for
  // exploration only.
  kChainMean,
};

struct MhBenchOptions {
  int64_t burn_in = 10000;
  int64_t chain_mean_samples = 1000;
  // Step = factor * lambda per leaf. 0 picks 2.38 / sqrt(leaves), the usual
  // random-walk scaling; a fixed factor of 1 barely moves once the hierarchy
  // has more than a handful of leaves.
  double proposal_scale_factor = 0.0;
  // Chains start at a random feasible point. Starting at the query value
  // would publish it unchanged whenever the chain fails to move.
  MhInit init = MhInit::kRandomFeasible;
  MhRelease release = MhRelease::kDraw;
  MhTarget target = MhTarget::kFullProduct;
};

struct ExperimentConfig {
  std::vector<double> epsilons;
  std::vector<BenchMechanism> mechanisms;
  int repetitions = 20;
  uint64_t seed = 0;
  // Either both paths, or a synthetic spec.
  std::string hierarchy_path;
  std::string counts_path;
  std::optional<SynthSpec> synth;
  bool nonneg = false;      // add z >= 0 to the invariant (not for topdown)
  bool zero_noise = false;  // testing hook: releases equal the input
  MhBenchOptions mh;
  int64_t rejection_max_tries = 10'000'000;
  int threads = 0;  // 0: hardware concurrency, capped by CDP_THREADS

  absl::Status Validate() const;
  // Relative paths are resolved against `base_dir`.
  static absl::StatusOr<ExperimentConfig> FromJson(std::string_view text,
                                                   const std::string& base_dir);
  static absl::StatusOr<ExperimentConfig> Load(const std::string& path);
};

// Counts on every node of a hierarchy, internal nodes the sums of their
// children, in hierarchy coordinate order.
struct HierarchicalData {
  Vector x;
  Hierarchy hierarchy;
};

// Counts CSV with header `node,count`, one row per leaf. InvalidArgument
// ("ParseError", "NegativeCount", "HierarchyMismatch").
absl::StatusOr<HierarchicalData> LoadCounts(const std::string& counts_path,
                                            const std::string& hierarchy_path);
absl::StatusOr<HierarchicalData> CountsFromCsv(std::istream& counts,
                                               Hierarchy hierarchy);
// InvalidArgument ("InvalidSpec").
absl::StatusOr<HierarchicalData> SynthData(const SynthSpec& spec,
                                           uint64_t seed);

struct ResultRow {
  double epsilon = 0.0;
  std::string level;  // "1" (root) ... "<depth>", or "all"
  std::string mechanism;
  double mean_l1 = 0.0;
  double std_l1 = 0.0;
  std::string note;  // reason when the cell failed (values are NaN)
};

struct ResultTable {
  std::vector<ResultRow> rows;
};

struct BenchResult {
  ResultTable table;
  int64_t releases = 0;
  int64_t failed_cells = 0;
  // Largest hierarchy-equality residual over all successful releases.
  double max_equality_residual = 0.0;
  std::vector<std::string> errors;
  bool partial_failure() const { return failed_cells > 0; }
};

// (1/m) sum |x_i - y_i| over `indices`.
double NormalizedL1(const Vector& x, const Vector& y,
                    const std::vector<int>& indices);

absl::StatusOr<HierarchicalData> LoadExperimentData(
    const ExperimentConfig& config);
absl::StatusOr<BenchResult> RunBenchmark(const ExperimentConfig& config);
absl::StatusOr<BenchResult> RunBenchmark(const ExperimentConfig& config,
                                         const HierarchicalData& data);

enum class TableFormat {
  kCsv,      // epsilon,level,mechanism,mean_l1,std_l1
  kJson,
  kGnuplot,  // one block per (level, mechanism): epsilon mean std
  kWide,     // epsilon, level, then one "mean (std)" column per mechanism
};

// InvalidArgument ("EmptyTable") for a table without rows.
absl::StatusOr<std::string> EmitTable(const ResultTable& table,
                                      TableFormat format);
// Internal ("IOError") when the file cannot be written.
absl::Status WriteTable(const ResultTable& table, TableFormat format,
                        const std::string& path);
absl::StatusOr<ResultTable> ParseTableCsv(std::string_view text);

}  // namespace cdp

#endif  // CDP_CORE_BENCH_H_
