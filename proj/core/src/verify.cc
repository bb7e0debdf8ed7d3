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

#include "cdp/verify.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "cdp/diagnostics.h"
#include "cdp/invariants.h"
#include "cdp/mechanisms.h"

namespace cdp {

absl::StatusOr<double> AnalyticConditionedVarianceN3(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    return absl::InvalidArgumentError(
        absl::StrCat("InvalidScale: lambda must be positive, got ", lambda));
  }
  return 5.0 * lambda * lambda / 6.0;
}

absl::StatusOr<double> AnalyticImagingVariance(double lambda, int n) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    return absl::InvalidArgumentError(
        absl::StrCat("InvalidScale: lambda must be positive, got ", lambda));
  }
  if (n < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("InvalidScale: n must be at least 2, got ", n));
  }
  return 2.0 * lambda * lambda * (1.0 - 1.0 / n);
}

AuditGrid AuditGrid::Regular(int dim, double lo, double hi, int count) {
  AuditGrid grid;
  int64_t total = 1;
  for (int d = 0; d < dim; ++d) total *= count;
  grid.points.resize(total, dim);
  const double step = count > 1 ? (hi - lo) / (count - 1) : 0.0;
  for (int64_t i = 0; i < total; ++i) {
    int64_t rest = i;
    for (int d = 0; d < dim; ++d) {
      grid.points(i, d) = lo + step * static_cast<double>(rest % count);
      rest /= count;
    }
  }
  grid.description = absl::StrCat(count, "^", dim, " regular grid on [", lo,
                                  ", ", hi, "]^", dim);
  return grid;
}

absl::StatusOr<AuditReport> PrivacyAudit(const DensityFn& d1,
                                         const DensityFn& d2, double epsilon,
                                         const AuditGrid& grid, double slack) {
  AuditReport report;
  report.epsilon_target = epsilon;
  report.grid_spec = grid.description;
  report.slack = slack;
  for (Eigen::Index i = 0; i < grid.points.rows(); ++i) {
    const Vector v = grid.points.row(i).transpose();
    const double a = d1(v);
    const double b = d2(v);
    if (a == 0.0 && b == 0.0) continue;
    if (a == 0.0 || b == 0.0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "SupportMismatch: one density vanishes at grid point ", i));
    }
    report.max_log_ratio =
        std::max(report.max_log_ratio, std::abs(std::log(a) - std::log(b)));
    ++report.points_compared;
  }
  report.margin = epsilon - report.max_log_ratio;
  report.pass = report.max_log_ratio <= epsilon + slack;
  return report;
}

std::vector<double> FreedmanDiaconisEdges(std::span<const double> sample) {
  if (sample.empty()) return {};
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const size_t n = sorted.size();
  auto quantile = [&](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const size_t lo = static_cast<size_t>(pos);
    const size_t hi = std::min(lo + 1, n - 1);
    return sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
  };
  const double lo = sorted.front();
  const double hi = sorted.back();
  const double width =
      2.0 * (quantile(0.75) - quantile(0.25)) / std::cbrt(static_cast<double>(n));
  if (!(width > 0.0) || !(hi > lo)) return {lo, hi};
  const int bins =
      static_cast<int>(std::min(10000.0, std::ceil((hi - lo) / width)));
  std::vector<double> edges(bins + 1);
  for (int k = 0; k <= bins; ++k) edges[k] = lo + (hi - lo) * k / bins;
  return edges;
}

std::vector<double> BinFractions(std::span<const double> sample,
                                 std::span<const double> edges) {
  std::vector<double> counts(edges.size() + 1, 0.0);
  for (double x : sample) {
    const size_t bin =
        std::upper_bound(edges.begin(), edges.end(), x) - edges.begin();
    counts[bin] += 1.0;
  }
  if (!sample.empty()) {
    for (double& c : counts) c /= static_cast<double>(sample.size());
  }
  return counts;
}

double TotalVariation(std::span<const double> p, std::span<const double> q) {
  double sum = 0.0;
  const size_t n = std::min(p.size(), q.size());
  for (size_t i = 0; i < n; ++i) sum += std::abs(p[i] - q[i]);
  for (size_t i = n; i < p.size(); ++i) sum += std::abs(p[i]);
  for (size_t i = n; i < q.size(); ++i) sum += std::abs(q[i]);
  return 0.5 * sum;
}

AuditReport EmpiricalAudit(std::span<const double> sample1,
                           std::span<const double> sample2, double epsilon,
                           int min_count) {
  AuditReport report;
  report.epsilon_target = epsilon;
  std::vector<double> pooled(sample1.begin(), sample1.end());
  pooled.insert(pooled.end(), sample2.begin(), sample2.end());
  const std::vector<double> edges = FreedmanDiaconisEdges(pooled);
  const std::vector<double> f1 = BinFractions(sample1, edges);
  const std::vector<double> f2 = BinFractions(sample2, edges);
  const double n1 = static_cast<double>(sample1.size());
  const double n2 = static_cast<double>(sample2.size());
  report.grid_spec = absl::StrCat(edges.size() > 0 ? edges.size() - 1 : 0,
                                  " Freedman-Diaconis bins, min count ",
                                  min_count);
  report.pass = true;
  double worst_excess = -std::numeric_limits<double>::infinity();
  for (size_t b = 0; b < f1.size(); ++b) {
    const double c1 = f1[b] * n1;
    const double c2 = f2[b] * n2;
    if (c1 < min_count || c2 < min_count) continue;
    const double ratio = std::abs(std::log(f1[b]) - std::log(f2[b]));
    const double se =
        std::sqrt(std::max(0.0, 1.0 / c1 - 1.0 / n1 + 1.0 / c2 - 1.0 / n2));
    ++report.points_compared;
    report.max_log_ratio = std::max(report.max_log_ratio, ratio);
    if (ratio - 3.0 * se > worst_excess) {
      worst_excess = ratio - 3.0 * se;
      report.slack = 3.0 * se;
    }
    if (ratio > epsilon + 3.0 * se) report.pass = false;
  }
  report.margin = epsilon - report.max_log_ratio;
  return report;
}

absl::StatusOr<double> KlDivergence(const FiniteBeliefState& q,
                                    const FiniteBeliefState& p) {
  if (!q.SameWorlds(p)) {
    return absl::InvalidArgumentError(
        "KL divergence needs states over the same worlds");
  }
  double kl = 0.0;
  for (size_t i = 0; i < q.size(); ++i) {
    const double qi = q.probs()[i];
    const double pi = p.probs()[i];
    if (qi == 0.0) continue;
    if (pi == 0.0) {
      return absl::FailedPreconditionError(absl::StrCat(
          "AbsoluteContinuityViolation: q('", q.worlds()[i],
          "') > 0 but p vanishes there"));
    }
    kl += qi * std::log(qi / pi);
  }
  return std::max(0.0, kl);
}

absl::StatusOr<McmcSummary> McmcDiagnostics(const SampleSet& samples) {
  if (samples.draws.rows() < 100) {
    return absl::InvalidArgumentError(absl::StrCat(
        "TooFewSamples: ", samples.draws.rows(), " draws, need at least 100"));
  }
  McmcSummary s;
  s.acceptance_rate =
      samples.proposed == 0
          ? 0.0
          : static_cast<double>(samples.accepted) / samples.proposed;
  s.ess = MinColumnEss(samples.draws);
  s.mean = samples.draws.colwise().mean().transpose();
  const Matrix centered = samples.draws.rowwise() - s.mean.transpose();
  s.variance = centered.colwise().squaredNorm().transpose() /
               static_cast<double>(samples.draws.rows() - 1);
  s.warnings = samples.warnings;
  if (s.ess < 50.0 && s.warnings.empty()) {
    s.warnings.push_back(
        absl::StrCat("NonconvergenceWarning: effective sample size ", s.ess,
                     " is below 50"));
  }
  return s;
}

absl::StatusOr<double> ChartExpectation(
    const ConditionalDensity& density,
    const std::function<double(const Vector&)>& g,
    const QuadratureOptions& options) {
  const FreeParametrization* chart = density.chart();
  if (chart == nullptr) {
    return absl::FailedPreconditionError(
        "ChartExpectation needs a measure-zero conditional density");
  }
  const std::function<double(const Vector&)> integrand =
      [&](const Vector& w) {
        const double p = density.EvaluateChart(w);
        return p == 0.0 ? 0.0 : g(chart->Solve(w)) * p;
      };
  absl::StatusOr<QuadratureResult> r = IntegrateNd(
      integrand, chart->free_dim(), density.ChartKinks(), options);
  if (!r.ok()) return r.status();
  return r->value;
}

absl::StatusOr<ConditioningVsImaging> CompareConditioningImaging(
    int n, double lambda, int64_t draws, uint64_t seed) {
  absl::StatusOr<double> analytic = AnalyticImagingVariance(lambda, n);
  if (!analytic.ok()) return analytic.status();
  absl::StatusOr<NoiseSpec> noise = NoiseSpec::Laplace(lambda, n);
  if (!noise.ok()) return noise.status();
  absl::StatusOr<ConditionalSampler> sampler = ConditionalSampler::Create(
      Vector::Zero(n), *noise, Invariant(AffineEquality::SumEquals(n, 0.0)));
  if (!sampler.ok()) return sampler.status();

  Rng cond_rng = Rng(seed).Split(1);
  Rng image_rng = Rng(seed).Split(2);
  double cond_sum = 0.0, cond_sq = 0.0, image_sum = 0.0, image_sq = 0.0;
  for (int64_t i = 0; i < draws; ++i) {
    absl::StatusOr<Vector> v = sampler->Draw(cond_rng);
    if (!v.ok()) return v.status();
    cond_sum += (*v)[0];
    cond_sq += (*v)[0] * (*v)[0];
    const Vector y = DrawNoise(*noise, image_rng);
    const double x = y[0] - y.mean();
    image_sum += x;
    image_sq += x * x;
  }
  const double m = static_cast<double>(draws);
  ConditioningVsImaging out;
  out.n = n;
  out.conditioned_variance = (cond_sq - cond_sum * cond_sum / m) / (m - 1.0);
  out.imaged_variance = (image_sq - image_sum * image_sum / m) / (m - 1.0);
  out.imaged_analytic = *analytic;
  out.conditioning_smaller = out.conditioned_variance < out.imaged_variance;
  return out;
}

}  // namespace cdp
