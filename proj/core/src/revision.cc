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

#include "cdp/revision.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "cdp/diagnostics.h"

namespace cdp {
namespace {

absl::Status DimensionMismatch(absl::string_view what, Eigen::Index expected,
                               Eigen::Index got) {
  return absl::InvalidArgumentError(absl::StrCat(
      "DimensionMismatch: ", what, " has ", got, " coordinates, expected ",
      expected));
}

double ScaledTolerance(const Vector& v) {
  return kMembershipTolerance *
         std::max(1.0, v.size() > 0 ? v.lpNorm<Eigen::Infinity>() : 0.0);
}

bool OnEquality(const AffineEquality& eq, const Vector& v) {
  if (eq.rows() == 0) return true;
  return eq.Residual(v).lpNorm<Eigen::Infinity>() <= ScaledTolerance(v);
}

bool SatisfiesInequality(const Invariant& inv, const Vector& v) {
  return !inv.has_inequality() || inv.inequality()->Satisfied(v, 0.0);
}

// Importance-sampling estimate of the integral over the free noise
// coordinates of p_U(B w) * 1[fval + B w in ineq], with the one-dimensional
// noise law as proposal on each free coordinate. The weight reduces to the
// product of the noise density over the dependent coordinates.
Estimate ChartImportanceEstimate(const NoiseSpec& noise,
                                 const FreeParametrization& chart,
                                 const Vector& fval,
                                 const AffineInequality* ineq,
                                 int64_t samples, uint64_t seed) {
  Rng rng(seed);
  const int k = chart.free_dim();
  const Matrix& dep = chart.dependent_map();
  Vector w(k);
  Vector u(chart.dim());
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int64_t s = 0; s < samples; ++s) {
    for (int j = 0; j < k; ++j) w[j] = noise.Draw1D(rng);
    double log_weight = 0.0;
    if (dep.rows() > 0) {
      const Vector d = dep * w;
      for (Eigen::Index r = 0; r < d.size(); ++r) {
        log_weight += noise.LogDensity1D(d[r]);
      }
      if (ineq != nullptr) {
        for (int j = 0; j < k; ++j) u[chart.free_indices()[j]] = w[j];
        for (Eigen::Index r = 0; r < d.size(); ++r) {
          u[chart.pivot_indices()[r]] = d[r];
        }
      }
    } else if (ineq != nullptr) {
      u = w;
    }
    double weight = std::exp(log_weight);
    if (ineq != nullptr && !ineq->Satisfied(fval + u, 0.0)) weight = 0.0;
    sum += weight;
    sum_sq += weight * weight;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - mean * mean);
  return {mean, std::sqrt(var / n), EstimateMethod::kImportanceSampling};
}

}  // namespace

absl::StatusOr<Estimate> NormalizingConstant(const NoiseSpec& noise,
                                             const AffineEquality& eq,
                                             const ConditioningOptions& options) {
  if (noise.dim() != eq.dim()) {
    return DimensionMismatch("equality", noise.dim(), eq.dim());
  }
  absl::StatusOr<FreeParametrization> chart = SolveFreeParametrization(eq);
  if (!chart.ok()) return chart.status();
  const int k = chart->free_dim();
  if (k > 4) {
    return ChartImportanceEstimate(noise, *chart, Vector::Zero(noise.dim()),
                                   nullptr, options.importance_samples,
                                   options.seed);
  }
  const Matrix basis = chart->Basis();
  KinkSet kinks;
  if (noise.kind() == NoiseKind::kLaplace) {
    kinks.normals = basis;
    kinks.offsets = Vector::Zero(basis.rows());
  }
  QuadratureOptions q;
  q.rel_tol = k <= 2 ? 1e-6 : 1e-4;
  q.length_scale = noise.scale();
  q.max_intervals = options.max_quadrature_intervals;
  const std::function<double(const Vector&)> integrand =
      [&](const Vector& w) {
        return std::exp(noise.LogDensityUnchecked(basis * w));
      };
  absl::StatusOr<QuadratureResult> r = IntegrateNd(integrand, k, kinks, q);
  if (!r.ok()) return r.status();
  return Estimate{r->value, 0.0, EstimateMethod::kQuadrature};
}

absl::StatusOr<Estimate> InvariantMass(const Vector& fval,
                                       const NoiseSpec& noise,
                                       const AffineInequality& ineq,
                                       const ConditioningOptions& options) {
  if (fval.size() != noise.dim()) {
    return DimensionMismatch("query value", noise.dim(), fval.size());
  }
  if (ineq.dim() != noise.dim()) {
    return DimensionMismatch("inequality", noise.dim(), ineq.dim());
  }
  if (ineq.IsCoordinateBox()) {
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> lo(fval.size(), -inf);
    std::vector<double> hi(fval.size(), inf);
    for (int r = 0; r < ineq.rows(); ++r) {
      Eigen::Index c = 0;
      ineq.a().row(r).cwiseAbs().maxCoeff(&c);
      const double coef = ineq.a()(r, c);
      const double bound = ineq.lower()[r] / coef;
      if (coef > 0.0) {
        lo[c] = std::max(lo[c], bound);
      } else {
        hi[c] = std::min(hi[c], bound);
      }
    }
    double mass = 1.0;
    for (Eigen::Index i = 0; i < fval.size(); ++i) {
      if (!(lo[i] < hi[i])) return Estimate{0.0, 0.0, EstimateMethod::kAnalytic};
      mass *= noise.Cdf1D(hi[i] - fval[i]) - noise.Cdf1D(lo[i] - fval[i]);
    }
    return Estimate{mass, 0.0, EstimateMethod::kAnalytic};
  }
  Rng rng(options.seed);
  int64_t hits = 0;
  for (int64_t s = 0; s < options.mass_samples; ++s) {
    if (ineq.Satisfied(fval + DrawNoise(noise, rng), 0.0)) ++hits;
  }
  const double n = static_cast<double>(options.mass_samples);
  const double p = hits / n;
  return Estimate{p, std::sqrt(p * (1.0 - p) / n), EstimateMethod::kMonteCarlo};
}

absl::StatusOr<ConditionalDensity> ConditionalDensity::Create(
    Vector fval, NoiseSpec noise, Invariant invariant,
    const ConditioningOptions& options) {
  if (fval.size() != noise.dim()) {
    return DimensionMismatch("query value", noise.dim(), fval.size());
  }
  if (invariant.dim() != noise.dim()) {
    return DimensionMismatch("invariant", noise.dim(), invariant.dim());
  }
  ConditionalDensity d(std::move(fval), std::move(noise), std::move(invariant));
  if (d.invariant_.has_equality()) {
    const AffineEquality& eq = *d.invariant_.equality();
    if (!OnEquality(eq, d.fval_)) {
      return absl::FailedPreconditionError(
          "InfeasibleInvariant: the query value violates the equality "
          "invariant");
    }
    absl::StatusOr<FreeParametrization> chart = SolveFreeParametrization(eq);
    if (!chart.ok()) return chart.status();
    d.chart_ = *std::move(chart);
    d.case_ = ConditioningCase::kMeasureZero;
    if (d.invariant_.has_inequality()) {
      d.normalizer_ = ChartImportanceEstimate(
          d.noise_, *d.chart_, d.fval_, &*d.invariant_.inequality(),
          options.mass_samples, options.seed);
      if (!(d.normalizer_.value > 0.0)) {
        return absl::FailedPreconditionError(
            "ZeroMass: no mass of the chart density satisfies the "
            "inequalities");
      }
    } else {
      absl::StatusOr<Estimate> k = NormalizingConstant(d.noise_, eq, options);
      if (!k.ok()) return k.status();
      d.normalizer_ = *k;
    }
  } else {
    d.case_ = ConditioningCase::kPositiveMass;
    if (d.invariant_.has_inequality()) {
      absl::StatusOr<Estimate> mass = InvariantMass(
          d.fval_, d.noise_, *d.invariant_.inequality(), options);
      if (!mass.ok()) return mass.status();
      if (mass->value < 1e-12) {
        return absl::FailedPreconditionError(absl::StrCat(
            "ZeroMass: P(C) estimate ", mass->value, " is below 1e-12"));
      }
      d.normalizer_ = *mass;
    } else {
      d.normalizer_ = Estimate{1.0, 0.0, EstimateMethod::kExact};
    }
  }
  d.log_normalizer_ = std::log(d.normalizer_.value);
  return d;
}

double ConditionalDensity::Evaluate(const Vector& v) const {
  if (v.size() != fval_.size()) return 0.0;
  if (case_ == ConditioningCase::kMeasureZero &&
      !OnEquality(*invariant_.equality(), v)) {
    return 0.0;
  }
  if (!SatisfiesInequality(invariant_, v)) return 0.0;
  return std::exp(noise_.LogDensityUnchecked(v - fval_) - log_normalizer_);
}

double ConditionalDensity::EvaluateChart(const Vector& w) const {
  if (!chart_ || w.size() != chart_->free_dim()) return 0.0;
  const Vector v = chart_->Solve(w);
  if (!SatisfiesInequality(invariant_, v)) return 0.0;
  return std::exp(noise_.LogDensityUnchecked(v - fval_) - log_normalizer_);
}

KinkSet ConditionalDensity::ChartKinks() const {
  KinkSet kinks;
  if (!chart_ || noise_.kind() != NoiseKind::kLaplace) return kinks;
  kinks.normals = chart_->Basis();
  kinks.offsets = chart_->Solve(Vector::Zero(chart_->free_dim())) - fval_;
  return kinks;
}

absl::StatusOr<ConditionalSampler> ConditionalSampler::Create(
    Vector fval, NoiseSpec noise, Invariant invariant, int64_t max_tries) {
  if (fval.size() != noise.dim()) {
    return DimensionMismatch("query value", noise.dim(), fval.size());
  }
  if (invariant.dim() != noise.dim()) {
    return DimensionMismatch("invariant", noise.dim(), invariant.dim());
  }
  if (max_tries < 1) {
    return absl::InvalidArgumentError("max_tries must be positive");
  }
  ConditionalSampler s(std::move(fval), std::move(noise), std::move(invariant),
                       max_tries);
  if (s.invariant_.has_equality()) {
    const AffineEquality& eq = *s.invariant_.equality();
    if (!OnEquality(eq, s.fval_)) {
      return absl::FailedPreconditionError(
          "InfeasibleInvariant: the query value violates the equality "
          "invariant");
    }
    absl::StatusOr<FreeParametrization> chart = SolveFreeParametrization(eq);
    if (!chart.ok()) return chart.status();
    s.noise_chart_ = *std::move(chart);
  }
  return s;
}

absl::StatusOr<Vector> ConditionalSampler::Draw(Rng& rng) {
  const double log_peak = noise_.LogDensity1D(0.0);
  Vector u(fval_.size());
  for (int64_t attempt = 0; attempt < max_tries_; ++attempt) {
    ++proposals_;
    if (noise_chart_) {
      const FreeParametrization& chart = *noise_chart_;
      Vector w(chart.free_dim());
      for (Eigen::Index j = 0; j < w.size(); ++j) w[j] = noise_.Draw1D(rng);
      const Vector dep = chart.dependent_map() * w;
      double log_accept = 0.0;
      for (Eigen::Index r = 0; r < dep.size(); ++r) {
        log_accept += noise_.LogDensity1D(dep[r]) - log_peak;
      }
      if (std::log(rng.Uniform()) >= log_accept) continue;
      for (Eigen::Index j = 0; j < w.size(); ++j) {
        u[chart.free_indices()[j]] = w[j];
      }
      for (Eigen::Index r = 0; r < dep.size(); ++r) {
        u[chart.pivot_indices()[r]] = dep[r];
      }
    } else {
      u = DrawNoise(noise_, rng);
    }
    Vector v = fval_ + u;
    if (!SatisfiesInequality(invariant_, v)) continue;
    ++accepted_;
    return v;
  }
  return absl::ResourceExhaustedError(absl::StrCat(
      "AcceptanceTimeout: no draw landed in the invariant after ", max_tries_,
      " tries; P(C) is too small for rejection sampling, use mh_sample"));
}

absl::StatusOr<Vector> RejectionSample(const Vector& fval,
                                       const NoiseSpec& noise,
                                       const AffineInequality& ineq,
                                       uint64_t seed, int64_t max_tries) {
  absl::StatusOr<ConditionalSampler> sampler =
      ConditionalSampler::Create(fval, noise, Invariant(ineq), max_tries);
  if (!sampler.ok()) return sampler.status();
  Rng rng(seed);
  return sampler->Draw(rng);
}

namespace {

struct ChainSpec {
  Vector initial_free;
  std::function<void(const Vector& free, Vector& full)> reconstruct;
  std::vector<char> in_target;  // coordinates contributing to p(x)
};

double LogTarget(const NoiseSpec& noise, const Vector& fval, const Vector& x,
                 const std::vector<char>& in_target) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (in_target[i]) total += noise.LogDensity1D(x[i] - fval[i]);
  }
  return total;
}

absl::Status ValidateConfig(const MhConfig& config) {
  if (config.n_samples <= 0) {
    return absl::InvalidArgumentError("n_samples must be positive");
  }
  if (config.burn_in < 0) {
    return absl::InvalidArgumentError("burn_in must be nonnegative");
  }
  if (config.thinning < 1) {
    return absl::InvalidArgumentError("thinning must be at least 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<Vector> StartingPoint(const Vector& fval, const NoiseSpec& noise,
                                     const ChainSpec& spec,
                                     const std::optional<AffineInequality>& ineq,
                                     const MhConfig& config) {
  Vector full(fval.size());
  if (config.init == MhInit::kAtQueryValue) {
    spec.reconstruct(spec.initial_free, full);
    if (ineq && !ineq->Satisfied(full, 0.0)) {
      return absl::FailedPreconditionError(
          "InfeasibleStart: the query value violates the inequality "
          "constraints");
    }
    return spec.initial_free;
  }
  Rng rng = Rng(config.seed).Split(1);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    Vector free = spec.initial_free;
    for (Eigen::Index j = 0; j < free.size(); ++j) free[j] += noise.Draw1D(rng);
    spec.reconstruct(free, full);
    if (!ineq || ineq->Satisfied(full, 0.0)) return free;
  }
  return absl::FailedPreconditionError(
      "InfeasibleStart: no random feasible starting point in 1000 tries");
}

absl::StatusOr<SampleSet> RunChain(const Vector& fval, const NoiseSpec& noise,
                                   const ChainSpec& spec,
                                   const std::optional<AffineInequality>& ineq,
                                   const MhConfig& config) {
  if (absl::Status s = ValidateConfig(config); !s.ok()) return s;
  absl::StatusOr<Vector> start = StartingPoint(fval, noise, spec, ineq, config);
  if (!start.ok()) return start.status();

  const double step =
      config.proposal_scale > 0.0 ? config.proposal_scale : noise.scale();
  Rng rng(config.seed);
  Vector free = *start;
  Vector full(fval.size());
  spec.reconstruct(free, full);
  double log_p = LogTarget(noise, fval, full, spec.in_target);

  Vector candidate_free(free.size());
  Vector candidate(full.size());
  SampleSet out;
  out.seed = config.seed;
  out.draws.resize(config.n_samples, fval.size());
  const int64_t total = config.burn_in + config.n_samples * config.thinning;
  int64_t row = 0;
  for (int64_t it = 0; it < total; ++it) {
    for (Eigen::Index j = 0; j < free.size(); ++j) {
      candidate_free[j] = free[j] + step * rng.Gaussian();
    }
    spec.reconstruct(candidate_free, candidate);
    const double log_u = std::log(rng.Uniform());
    ++out.proposed;
    if (!ineq || ineq->Satisfied(candidate, 0.0)) {
      const double candidate_log_p =
          LogTarget(noise, fval, candidate, spec.in_target);
      if (log_u < candidate_log_p - log_p) {
        free.swap(candidate_free);
        full.swap(candidate);
        log_p = candidate_log_p;
        ++out.accepted;
      }
    }
    if (it >= config.burn_in && (it - config.burn_in) % config.thinning == 0) {
      out.draws.row(row++) = full.transpose();
    }
  }
  out.acceptance_rate = static_cast<double>(out.accepted) / out.proposed;
  out.ess = MinColumnEss(out.draws);
  if (out.acceptance_rate < 0.01) {
    out.warnings.push_back(absl::StrCat(
        "NonconvergenceWarning: acceptance rate ", out.acceptance_rate,
        " is below 1%"));
  }
  if (out.ess < 50.0) {
    out.warnings.push_back(absl::StrCat(
        "NonconvergenceWarning: effective sample size ", out.ess,
        " is below 50"));
  }
  return out;
}

}  // namespace

absl::StatusOr<SampleSet> MhSample(
    const Vector& fval, const NoiseSpec& noise, const Hierarchy& hierarchy,
    const std::optional<AffineInequality>& ineq, const MhConfig& config) {
  const int m = hierarchy.size();
  if (fval.size() != m) return DimensionMismatch("query value", m, fval.size());
  if (noise.dim() != m) return DimensionMismatch("noise", m, noise.dim());
  if (ineq && ineq->dim() != m) {
    return DimensionMismatch("inequality", m, ineq->dim());
  }
  const int leaves = hierarchy.num_leaves();
  const Vector consistent = hierarchy.Aggregate(fval.head(leaves));
  if ((consistent - fval).lpNorm<Eigen::Infinity>() > ScaledTolerance(fval)) {
    return absl::FailedPreconditionError(
        "InfeasibleInvariant: internal query values are not the sums of "
        "their children");
  }
  ChainSpec spec;
  spec.initial_free = fval.head(leaves);
  spec.reconstruct = [&hierarchy, leaves](const Vector& free, Vector& full) {
    full.head(leaves) = free;
    hierarchy.FillInternal(full);
  };
  spec.in_target.assign(m, 1);
  if (config.target == MhTarget::kLeafOnly) {
    for (int i = leaves; i < m; ++i) spec.in_target[i] = 0;
  }
  return RunChain(fval, noise, spec, ineq, config);
}

absl::StatusOr<SampleSet> MhSampleAffine(
    const Vector& fval, const NoiseSpec& noise, const AffineEquality& eq,
    const std::optional<AffineInequality>& ineq, const MhConfig& config) {
  const int n = eq.dim();
  if (fval.size() != n) return DimensionMismatch("query value", n, fval.size());
  if (noise.dim() != n) return DimensionMismatch("noise", n, noise.dim());
  if (ineq && ineq->dim() != n) {
    return DimensionMismatch("inequality", n, ineq->dim());
  }
  if (!OnEquality(eq, fval)) {
    return absl::FailedPreconditionError(
        "InfeasibleInvariant: the query value violates the equality "
        "invariant");
  }
  absl::StatusOr<FreeParametrization> chart = SolveFreeParametrization(eq);
  if (!chart.ok()) return chart.status();
  ChainSpec spec;
  spec.initial_free = chart->FreeCoordinates(fval);
  spec.reconstruct = [p = *chart](const Vector& free, Vector& full) {
    full = p.Solve(free);
  };
  spec.in_target.assign(n, 1);
  if (config.target == MhTarget::kLeafOnly) {
    for (int i : chart->pivot_indices()) spec.in_target[i] = 0;
  }
  return RunChain(fval, noise, spec, ineq, config);
}

double MhAcceptanceProbability(const NoiseSpec& noise, const Vector& fval,
                               const Vector& current, const Vector& proposed,
                               const std::optional<AffineInequality>& ineq) {
  if (ineq && !ineq->Satisfied(proposed, 0.0)) return 0.0;
  const std::vector<char> all(fval.size(), 1);
  const double log_ratio = LogTarget(noise, fval, proposed, all) -
                           LogTarget(noise, fval, current, all);
  return std::min(1.0, std::exp(log_ratio));
}

}  // namespace cdp
