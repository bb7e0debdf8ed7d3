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

#ifndef CDP_CORE_REVISION_H_
#define CDP_CORE_REVISION_H_

// Constrained mechanisms by conditioning: M(.|C)(D) is M(D) conditioned on
// landing in the invariant C.
//
// Two cases. If P[M(D) in C] > 0 (inequality invariants), the conditional
// density is the unconstrained one divided by that mass. If C is an affine
// equality, P[M(D) in C] = 0 and the density lives on a chart of C: the free
// coordinates of a FreeParametrization. On C it equals p_M(D)(v) / K_C with
//
//   K_C = integral over the free coordinates w of p_U(B w),
//
// where B is the chart basis of {A u = 0}. The Jacobian of the chart is a
// constant that cancels between numerator and K_C, so it is never formed.
// K_C depends on C and the noise law only, never on the data.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "cdp/hierarchy.h"
#include "cdp/invariants.h"
#include "cdp/mechanisms.h"
#include "cdp/quadrature.h"
#include "cdp/rng.h"
#include "cdp/types.h"

namespace cdp {

enum class ConditioningCase { kPositiveMass, kMeasureZero };

enum class EstimateMethod {
  kExact,
  kAnalytic,
  kQuadrature,
  kImportanceSampling,
  kMonteCarlo,
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;  // 0 for exact, analytic and quadrature results
  EstimateMethod method = EstimateMethod::kExact;
};

struct ConditioningOptions {
  // Monte Carlo draws for P(C) without a closed form, and for K_C above four
  // free coordinates.
  int64_t mass_samples = 100000;
  int64_t importance_samples = 100000;
  uint64_t seed = 0x5eed;
  // Iteration cap per one-dimensional quadrature pass.
  int max_quadrature_intervals = 4000;
};

// K_C for additive `noise` and the equality {A z = b}. Quadrature at relative
// tolerance 1e-6 with at most two free coordinates, 1e-4 with three or four,
// importance sampling with a reported standard error above that.
// InternalError ("QuadratureFailure") when quadrature misses its tolerance.
absl::StatusOr<Estimate> NormalizingConstant(
    const NoiseSpec& noise, const AffineEquality& eq,
    const ConditioningOptions& options = {});

// P[fval + U in C] for an inequality system. Exact for coordinate boxes,
// Monte Carlo otherwise.
absl::StatusOr<Estimate> InvariantMass(const Vector& fval,
                                       const NoiseSpec& noise,
                                       const AffineInequality& ineq,
                                       const ConditioningOptions& options = {});

class ConditionalDensity {
 public:
  // Equality invariants (with or without extra inequalities) give the
  // measure-zero case, anything else the positive-mass case.
  // FailedPrecondition ("InfeasibleInvariant") when fval violates an equality
  // invariant; FailedPrecondition ("ZeroMass") when the positive-mass
  // estimate is below 1e-12.
  static absl::StatusOr<ConditionalDensity> Create(
      Vector fval, NoiseSpec noise, Invariant invariant,
      const ConditioningOptions& options = {});

  ConditioningCase conditioning_case() const { return case_; }
  // P(C) in the positive-mass case, K_C (times the probability of any extra
  // inequalities) in the measure-zero case.
  const Estimate& normalizer() const { return normalizer_; }

  const Vector& fval() const { return fval_; }
  const NoiseSpec& noise() const { return noise_; }
  const Invariant& invariant() const { return invariant_; }

  // Density at an output v. Zero off C. In the measure-zero case this is a
  // density with respect to Lebesgue measure on the chart coordinates.
  double Evaluate(const Vector& v) const;

  // Measure-zero case only: the chart of C and the density at the point of C
  // with free coordinates w.
  const FreeParametrization* chart() const {
    return chart_ ? &*chart_ : nullptr;
  }
  double EvaluateChart(const Vector& w) const;
  // Creases of EvaluateChart for Laplace noise (|u_j| = 0), for quadrature.
  KinkSet ChartKinks() const;

 private:
  ConditionalDensity(Vector fval, NoiseSpec noise, Invariant invariant)
      : fval_(std::move(fval)),
        noise_(std::move(noise)),
        invariant_(std::move(invariant)) {}

  Vector fval_;
  NoiseSpec noise_;
  Invariant invariant_;
  ConditioningCase case_ = ConditioningCase::kPositiveMass;
  Estimate normalizer_;
  double log_normalizer_ = 0.0;
  std::optional<FreeParametrization> chart_;
};

// Exact sampler for M(D)|C.
//
// Inequality-only invariants: plain rejection, redrawing the unconstrained
// mechanism until it lands in C.
//
// Equality invariants: rejection on the chart. Free noise coordinates are
// drawn from the one-dimensional noise law and the draw is accepted with
// probability prod_dep p(u_j) / p(0) over the dependent coordinates, which
// targets prod_all p(u_j) on C exactly. Extra inequalities reject on top.
class ConditionalSampler {
 public:
  static absl::StatusOr<ConditionalSampler> Create(
      Vector fval, NoiseSpec noise, Invariant invariant,
      int64_t max_tries = 10'000'000);

  // ResourceExhausted ("AcceptanceTimeout") after max_tries rejections.
  absl::StatusOr<Vector> Draw(Rng& rng);

  int64_t proposals() const { return proposals_; }
  int64_t accepted() const { return accepted_; }
  double acceptance_rate() const {
    return proposals_ == 0 ? 0.0 : static_cast<double>(accepted_) / proposals_;
  }

 private:
  ConditionalSampler(Vector fval, NoiseSpec noise, Invariant invariant,
                     int64_t max_tries)
      : fval_(std::move(fval)),
        noise_(std::move(noise)),
        invariant_(std::move(invariant)),
        max_tries_(max_tries) {}

  Vector fval_;
  NoiseSpec noise_;
  Invariant invariant_;
  int64_t max_tries_;
  std::optional<FreeParametrization> noise_chart_;  // chart of {A u = 0}
  int64_t proposals_ = 0;
  int64_t accepted_ = 0;
};

// One exact draw of M(D)|C for an inequality invariant C with P(C) > 0.
// ResourceExhausted ("AcceptanceTimeout") after max_tries rejections; the
// caller should switch to mh_sample.
absl::StatusOr<Vector> RejectionSample(const Vector& fval,
                                       const NoiseSpec& noise,
                                       const AffineInequality& ineq,
                                       uint64_t seed,
                                       int64_t max_tries = 1'000'000);

enum class MhInit {
  // Start at the query value itself, which lies in C.
  kAtQueryValue,
  // Start at a random feasible point: query value plus noise on the free
  // coordinates, redrawn until inequalities hold.
  kRandomFeasible,
};

enum class MhTarget {
  // Product of the noise density over every coordinate.
  kFullProduct,
  // Product over the leaf (free) coordinates only.
  kLeafOnly,
};

struct MhConfig {
  // Random-walk step per free coordinate; <= 0 means the noise scale.
  double proposal_scale = 0.0;
  int64_t n_samples = 1000;
  int64_t burn_in = 10000;
  int64_t thinning = 1;
  uint64_t seed = 0;
  MhInit init = MhInit::kAtQueryValue;
  MhTarget target = MhTarget::kFullProduct;
};

struct SampleSet {
  Matrix draws;  // one draw per row
  int64_t proposed = 0;
  int64_t accepted = 0;
  double acceptance_rate = 0.0;  // accepted / proposed, burn-in included
  double ess = 0.0;
  uint64_t seed = 0;
  // Non-fatal NonconvergenceWarning messages.
  std::vector<std::string> warnings;
};

// Metropolis-Hastings on a hierarchy: propose all leaf values by a Gaussian
// random walk, rebuild every internal level by summing children, and accept
// with min{1, p(x') / p(x) * 1[A x' >= a]} (the symmetric proposal cancels).
// Rejected steps repeat the previous state. Every draw satisfies the
// hierarchy equalities by construction.
// FailedPrecondition ("InfeasibleInvariant") when fval is not consistent;
// FailedPrecondition ("InfeasibleStart") when the start violates `ineq`.
absl::StatusOr<SampleSet> MhSample(
    const Vector& fval, const NoiseSpec& noise, const Hierarchy& hierarchy,
    const std::optional<AffineInequality>& ineq, const MhConfig& config);

// Same chain for a general affine equality, walking on the free coordinates
// of its FreeParametrization.
absl::StatusOr<SampleSet> MhSampleAffine(
    const Vector& fval, const NoiseSpec& noise, const AffineEquality& eq,
    const std::optional<AffineInequality>& ineq, const MhConfig& config);

// The acceptance probability the chains use, for a symmetric proposal.
double MhAcceptanceProbability(const NoiseSpec& noise, const Vector& fval,
                               const Vector& current, const Vector& proposed,
                               const std::optional<AffineInequality>& ineq);

}  // namespace cdp

#endif  // CDP_CORE_REVISION_H_
