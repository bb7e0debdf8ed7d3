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

#ifndef CDP_CORE_COMPOSITION_H_
#define CDP_CORE_COMPOSITION_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "cdp/invariants.h"
#include "cdp/mechanisms.h"
#include "cdp/revision.h"
#include "cdp/rng.h"
#include "cdp/types.h"

namespace cdp {

// Draws one output for the query value `fval`. Deterministic in the seed.
using MechanismSampler =
    std::function<absl::StatusOr<Vector>(const Vector& fval, uint64_t seed)>;
// Density of the output distribution at `v` for the query value `fval`.
using MechanismDensity =
    std::function<double(const Vector& fval, const Vector& v)>;

// A mechanism as a value. Handles hold no mutable state, so they can be
// shared across threads. The budget is bookkeeping only.
struct MechanismHandle {
  int input_dim = 0;
  int output_dim = 0;
  MechanismSampler sampler;
  std::optional<MechanismDensity> density;
  PrivacyParams budget;
  std::optional<Invariant> invariant;
  // Set for plain additive-noise mechanisms, which the disjoint-union
  // sampler needs to condition.
  std::optional<NoiseSpec> additive_noise;
};

// fval + U.
MechanismHandle MakeAdditive(const NoiseSpec& noise, PrivacyParams budget);
// M(. | C) with the exact conditional sampler.
absl::StatusOr<MechanismHandle> MakeConditioned(const NoiseSpec& noise,
                                                PrivacyParams budget,
                                                Invariant invariant);
// M_C = f_L2 o M.
absl::StatusOr<MechanismHandle> MakeImaged(const NoiseSpec& noise,
                                           PrivacyParams budget,
                                           Invariant invariant);

// Joint mechanism (M_1, ..., M_k) on concatenated query values. Budgets add;
// the invariant is the product of the component invariants (components
// without one contribute an unconstrained block).
absl::StatusOr<MechanismHandle> ComposeBasic(
    std::span<const MechanismHandle> mechanisms);

struct DisjointUnionDraw {
  Vector sample;
  int branch = 0;  // 0 for C, 1 for C'
  double lambda = 0.0;
  double lambda_std_error = 0.0;
  bool analytic = false;
};

struct DisjointUnionOptions {
  int64_t mass_samples = 100000;   // Monte Carlo draws when no closed form
  int64_t overlap_checks = 1000;   // draws spot-checking C and C' are disjoint
  int64_t max_tries = 10'000'000;  // rejection budget per conditional draw
};

// M(. | C u C') for disjoint inequality invariants C, C' of an additive
// mechanism, as the mixture lambda M(. | C) + (1 - lambda) M(. | C') with
// lambda = P(C) / (P(C) + P(C')). lambda depends on fval. It is computed once
// at construction: in closed form when both sets are coordinate boxes,
// otherwise by Monte Carlo with its standard error reported.
class DisjointUnion {
 public:
  // InvalidArgument ("OverlappingInvariants") when a spot-check draw lands in
  // both sets; FailedPrecondition ("ZeroMass") when P(C) + P(C') < 1e-12;
  // Unimplemented for equality invariants, whose union has no positive mass.
  static absl::StatusOr<DisjointUnion> Create(
      const MechanismHandle& mechanism, const Vector& fval, Invariant c,
      Invariant c_prime, uint64_t seed, const DisjointUnionOptions& options = {});

  double lambda() const { return lambda_; }
  double lambda_std_error() const { return lambda_std_error_; }
  bool analytic() const { return analytic_; }

  absl::StatusOr<DisjointUnionDraw> Draw(Rng& rng);

 private:
  DisjointUnion(ConditionalSampler first, ConditionalSampler second)
      : first_(std::move(first)), second_(std::move(second)) {}

  ConditionalSampler first_;
  ConditionalSampler second_;
  double lambda_ = 0.0;
  double lambda_std_error_ = 0.0;
  bool analytic_ = false;
};

// One draw from a freshly built DisjointUnion.
absl::StatusOr<DisjointUnionDraw> DisjointUnionSampler(
    const MechanismHandle& mechanism, const Vector& fval, const Invariant& c,
    const Invariant& c_prime, uint64_t seed);

// Draws component i with probability weights[i], then samples it. The budget
// is the componentwise maximum. InvalidArgument ("WeightError") for negative
// weights or weights not summing to 1 within 1e-9.
absl::StatusOr<MechanismHandle> MixtureMechanism(
    std::span<const MechanismHandle> mechanisms,
    std::span<const double> weights);

// h o M with the same budget. The density is dropped; `output_invariant`
// describes where h lands, if known.
MechanismHandle Postprocess(const MechanismHandle& mechanism,
                            std::function<Vector(const Vector&)> h,
                            int output_dim,
                            std::optional<Invariant> output_invariant = {});

}  // namespace cdp

#endif  // CDP_CORE_COMPOSITION_H_
