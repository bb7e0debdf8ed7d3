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

#ifndef CDP_CORE_VERIFY_H_
#define CDP_CORE_VERIFY_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cdp/belief.h"
#include "cdp/quadrature.h"
#include "cdp/revision.h"
#include "cdp/types.h"

namespace cdp {

// Marginal variance of u_1 for Laplace(lambda) noise conditioned on
// u_1 + u_2 + u_3 = 0: 5 lambda^2 / 6. InvalidArgument ("InvalidScale").
absl::StatusOr<double> AnalyticConditionedVarianceN3(double lambda);
// Marginal variance of the imaged Laplace noise under one sum constraint in
// n coordinates: 2 lambda^2 (1 - 1/n). InvalidArgument ("InvalidScale").
absl::StatusOr<double> AnalyticImagingVariance(double lambda, int n);

// Grid points, one per row, plus a human-readable description.
struct AuditGrid {
  Matrix points;
  std::string description;

  // `count` evenly spaced points per axis over [lo, hi]^dim.
  static AuditGrid Regular(int dim, double lo, double hi, int count);
};

struct AuditReport {
  double max_log_ratio = 0.0;
  double epsilon_target = 0.0;
  std::string grid_spec;
  bool pass = false;
  // epsilon_target - max_log_ratio; negative when the bound is exceeded.
  double margin = 0.0;
  double slack = 0.0;
  int points_compared = 0;
};

using DensityFn = std::function<double(const Vector&)>;

// max over the grid of |log d1 - log d2|, against epsilon + slack. Points
// where both densities vanish are skipped. InvalidArgument
// ("SupportMismatch") where exactly one vanishes.
absl::StatusOr<AuditReport> PrivacyAudit(const DensityFn& d1,
                                         const DensityFn& d2, double epsilon,
                                         const AuditGrid& grid,
                                         double slack = 1e-6);

// Histogram audit of two samples on shared Freedman-Diaconis bins. A bin
// counts only when both samples put at least `min_count` draws in it; the
// bin passes when its |log ratio| is within epsilon plus three standard
// errors of the log ratio.
AuditReport EmpiricalAudit(std::span<const double> sample1,
                           std::span<const double> sample2, double epsilon,
                           int min_count = 50);

// KL(q || p) = sum q log(q / p) with 0 log 0 = 0. InvalidArgument when the
// states have different worlds; FailedPrecondition
// ("AbsoluteContinuityViolation") when q > 0 where p = 0.
absl::StatusOr<double> KlDivergence(const FiniteBeliefState& q,
                                    const FiniteBeliefState& p);

struct McmcSummary {
  double acceptance_rate = 0.0;
  double ess = 0.0;
  Vector mean;
  Vector variance;
  std::vector<std::string> warnings;
};

// InvalidArgument ("TooFewSamples") below 100 draws.
absl::StatusOr<McmcSummary> McmcDiagnostics(const SampleSet& samples);

// Bin edges of width 2 IQR n^(-1/3) spanning the sample.
std::vector<double> FreedmanDiaconisEdges(std::span<const double> sample);
// Fractions of the sample in (-inf, e0), [e0, e1), ..., [e_last, inf).
std::vector<double> BinFractions(std::span<const double> sample,
                                 std::span<const double> edges);
// Half the L1 distance between two probability vectors of equal length.
double TotalVariation(std::span<const double> p, std::span<const double> q);

// Expectation of g over a measure-zero ConditionalDensity, by quadrature on
// its chart.
absl::StatusOr<double> ChartExpectation(
    const ConditionalDensity& density,
    const std::function<double(const Vector&)>& g,
    const QuadratureOptions& options);

// Monte Carlo comparison of conditioning and imaging for Laplace noise under
// u_1 + ... + u_n = 0, on the first coordinate.
struct ConditioningVsImaging {
  int n = 0;
  double conditioned_variance = 0.0;  // exact chart-rejection draws
  double imaged_variance = 0.0;       // projected draws
  double imaged_analytic = 0.0;
  bool conditioning_smaller = false;
};
absl::StatusOr<ConditioningVsImaging> CompareConditioningImaging(
    int n, double lambda, int64_t draws, uint64_t seed);

}  // namespace cdp

#endif  // CDP_CORE_VERIFY_H_
