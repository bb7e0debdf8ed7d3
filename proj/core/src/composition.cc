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

#include "cdp/composition.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "cdp/update.h"

namespace cdp {
namespace {

bool SameInvariant(const Invariant& x, const Invariant& y) {
  if (x.dim() != y.dim() || x.has_equality() != y.has_equality() ||
      x.has_inequality() != y.has_inequality()) {
    return false;
  }
  if (x.has_equality() && (x.equality()->a() != y.equality()->a() ||
                           x.equality()->b() != y.equality()->b())) {
    return false;
  }
  if (x.has_inequality() && (x.inequality()->a() != y.inequality()->a() ||
                             x.inequality()->lower() != y.inequality()->lower())) {
    return false;
  }
  return true;
}

absl::Status CheckQueryDim(const Vector& fval, int dim) {
  if (fval.size() == dim) return absl::OkStatus();
  return absl::InvalidArgumentError(absl::StrCat(
      "DimensionMismatch: query value has ", fval.size(),
      " coordinates, mechanism expects ", dim));
}

}  // namespace

MechanismHandle MakeAdditive(const NoiseSpec& noise, PrivacyParams budget) {
  return MechanismHandle{
      .input_dim = noise.dim(),
      .output_dim = noise.dim(),
      .sampler = [noise](const Vector& fval,
                         uint64_t seed) -> absl::StatusOr<Vector> {
        return SampleAdditive(fval, noise, seed);
      },
      .density = [noise](const Vector& fval, const Vector& v) {
        if (v.size() != fval.size() || fval.size() != noise.dim()) return 0.0;
        return std::exp(noise.LogDensityUnchecked(v - fval));
      },
      .budget = budget,
      .invariant = std::nullopt,
      .additive_noise = noise,
  };
}

absl::StatusOr<MechanismHandle> MakeConditioned(const NoiseSpec& noise,
                                                PrivacyParams budget,
                                                Invariant invariant) {
  if (invariant.dim() != noise.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "DimensionMismatch: invariant has ", invariant.dim(),
        " coordinates, noise ", noise.dim()));
  }
  return MechanismHandle{
      .input_dim = noise.dim(),
      .output_dim = noise.dim(),
      .sampler = [noise, invariant](const Vector& fval,
                                    uint64_t seed) -> absl::StatusOr<Vector> {
        absl::StatusOr<ConditionalSampler> s =
            ConditionalSampler::Create(fval, noise, invariant);
        if (!s.ok()) return s.status();
        Rng rng(seed);
        return s->Draw(rng);
      },
      // Each call re-derives the normalizer, which depends on fval in the
      // positive-mass case.
      .density = [noise, invariant](const Vector& fval, const Vector& v) {
        absl::StatusOr<ConditionalDensity> d =
            ConditionalDensity::Create(fval, noise, invariant);
        return d.ok() ? d->Evaluate(v) : 0.0;
      },
      .budget = budget,
      .invariant = invariant,
      .additive_noise = std::nullopt,
  };
}

absl::StatusOr<MechanismHandle> MakeImaged(const NoiseSpec& noise,
                                           PrivacyParams budget,
                                           Invariant invariant) {
  if (invariant.dim() != noise.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "DimensionMismatch: invariant has ", invariant.dim(),
        " coordinates, noise ", noise.dim()));
  }
  absl::StatusOr<Projector> projector = Projector::Create(invariant);
  if (!projector.ok()) return projector.status();
  auto shared = std::make_shared<const Projector>(*std::move(projector));
  return MechanismHandle{
      .input_dim = noise.dim(),
      .output_dim = noise.dim(),
      .sampler = [noise, shared](const Vector& fval,
                                 uint64_t seed) -> absl::StatusOr<Vector> {
        Rng rng(seed);
        return ImagedDraw(fval, noise, *shared, rng);
      },
      .density = std::nullopt,
      .budget = budget,
      .invariant = invariant,
      .additive_noise = std::nullopt,
  };
}

absl::StatusOr<MechanismHandle> ComposeBasic(
    std::span<const MechanismHandle> mechanisms) {
  if (mechanisms.empty()) {
    return absl::InvalidArgumentError("ComposeBasic needs at least one mechanism");
  }
  std::vector<MechanismHandle> parts(mechanisms.begin(), mechanisms.end());
  double epsilon = 0.0;
  double delta = 0.0;
  int input_dim = 0;
  int output_dim = 0;
  bool any_invariant = false;
  bool all_densities = true;
  for (const MechanismHandle& m : parts) {
    epsilon += m.budget.epsilon();
    delta += m.budget.delta();
    input_dim += m.input_dim;
    output_dim += m.output_dim;
    any_invariant = any_invariant || m.invariant.has_value();
    all_densities = all_densities && m.density.has_value();
  }
  absl::StatusOr<PrivacyParams> budget = PrivacyParams::Create(epsilon, delta);
  if (!budget.ok()) return budget.status();

  std::optional<Invariant> invariant;
  if (any_invariant) {
    for (const MechanismHandle& m : parts) {
      const Invariant block =
          m.invariant ? *m.invariant : Invariant::Unconstrained(m.output_dim);
      invariant = invariant ? Invariant::Product(*invariant, block) : block;
    }
  }

  auto shared = std::make_shared<const std::vector<MechanismHandle>>(parts);
  MechanismSampler sampler =
      [shared, input_dim, output_dim](const Vector& fval,
                                      uint64_t seed) -> absl::StatusOr<Vector> {
    if (absl::Status s = CheckQueryDim(fval, input_dim); !s.ok()) return s;
    Vector out(output_dim);
    int in_at = 0;
    int out_at = 0;
    for (size_t i = 0; i < shared->size(); ++i) {
      const MechanismHandle& m = (*shared)[i];
      absl::StatusOr<Vector> part =
          m.sampler(fval.segment(in_at, m.input_dim), DeriveSeed(seed, i + 1));
      if (!part.ok()) return part.status();
      out.segment(out_at, m.output_dim) = *part;
      in_at += m.input_dim;
      out_at += m.output_dim;
    }
    return out;
  };
  std::optional<MechanismDensity> density;
  if (all_densities) {
    density = [shared](const Vector& fval, const Vector& v) {
      double product = 1.0;
      int in_at = 0;
      int out_at = 0;
      for (const MechanismHandle& m : *shared) {
        product *= (*m.density)(fval.segment(in_at, m.input_dim),
                                v.segment(out_at, m.output_dim));
        in_at += m.input_dim;
        out_at += m.output_dim;
      }
      return product;
    };
  }
  return MechanismHandle{
      .input_dim = input_dim,
      .output_dim = output_dim,
      .sampler = std::move(sampler),
      .density = std::move(density),
      .budget = *budget,
      .invariant = std::move(invariant),
      .additive_noise = std::nullopt,
  };
}

absl::StatusOr<DisjointUnion> DisjointUnion::Create(
    const MechanismHandle& mechanism, const Vector& fval, Invariant c,
    Invariant c_prime, uint64_t seed, const DisjointUnionOptions& options) {
  if (!mechanism.additive_noise) {
    return absl::InvalidArgumentError(
        "disjoint-union sampling needs an additive-noise mechanism");
  }
  const NoiseSpec& noise = *mechanism.additive_noise;
  if (absl::Status s = CheckQueryDim(fval, noise.dim()); !s.ok()) return s;
  if (c.dim() != noise.dim() || c_prime.dim() != noise.dim()) {
    return absl::InvalidArgumentError(
        "DimensionMismatch: invariants must match the mechanism dimension");
  }
  if (c.has_equality() || c_prime.has_equality()) {
    return absl::UnimplementedError(
        "disjoint-union sampling supports positive-mass (inequality) "
        "invariants only");
  }

  Rng check(DeriveSeed(seed, 1));
  auto inside = [](const Invariant& inv, const Vector& v) {
    return !inv.has_inequality() || inv.inequality()->Satisfied(v, 0.0);
  };
  for (int64_t i = 0; i < options.overlap_checks; ++i) {
    const Vector v = fval + DrawNoise(noise, check);
    if (inside(c, v) && inside(c_prime, v)) {
      return absl::InvalidArgumentError(
          "OverlappingInvariants: a spot-check draw lies in both sets");
    }
  }

  double lambda = 0.0;
  double std_error = 0.0;
  bool analytic = false;
  const bool boxes =
      (!c.has_inequality() || c.inequality()->IsCoordinateBox()) &&
      (!c_prime.has_inequality() || c_prime.inequality()->IsCoordinateBox());
  if (boxes) {
    auto mass = [&](const Invariant& inv) -> absl::StatusOr<double> {
      if (!inv.has_inequality()) return 1.0;
      absl::StatusOr<Estimate> e =
          InvariantMass(fval, noise, *inv.inequality());
      if (!e.ok()) return e.status();
      return e->value;
    };
    absl::StatusOr<double> p = mass(c);
    if (!p.ok()) return p.status();
    absl::StatusOr<double> p_prime = mass(c_prime);
    if (!p_prime.ok()) return p_prime.status();
    if (*p + *p_prime < 1e-12) {
      return absl::FailedPreconditionError(absl::StrCat(
          "ZeroMass: P(C) + P(C') = ", *p + *p_prime, " is below 1e-12"));
    }
    lambda = *p / (*p + *p_prime);
    analytic = true;
  } else {
    Rng mc(DeriveSeed(seed, 2));
    int64_t hits = 0;
    int64_t hits_prime = 0;
    for (int64_t i = 0; i < options.mass_samples; ++i) {
      const Vector v = fval + DrawNoise(noise, mc);
      if (inside(c, v)) ++hits;
      if (inside(c_prime, v)) ++hits_prime;
    }
    const int64_t total = hits + hits_prime;
    if (total == 0) {
      return absl::FailedPreconditionError(absl::StrCat(
          "ZeroMass: no Monte Carlo draw out of ", options.mass_samples,
          " landed in C or C'"));
    }
    lambda = static_cast<double>(hits) / total;
    std_error = std::sqrt(lambda * (1.0 - lambda) / total);
  }

  absl::StatusOr<ConditionalSampler> first =
      ConditionalSampler::Create(fval, noise, std::move(c), options.max_tries);
  if (!first.ok()) return first.status();
  absl::StatusOr<ConditionalSampler> second = ConditionalSampler::Create(
      fval, noise, std::move(c_prime), options.max_tries);
  if (!second.ok()) return second.status();
  DisjointUnion u(*std::move(first), *std::move(second));
  u.lambda_ = lambda;
  u.lambda_std_error_ = std_error;
  u.analytic_ = analytic;
  return u;
}

absl::StatusOr<DisjointUnionDraw> DisjointUnion::Draw(Rng& rng) {
  DisjointUnionDraw out;
  out.lambda = lambda_;
  out.lambda_std_error = lambda_std_error_;
  out.analytic = analytic_;
  out.branch = rng.Uniform() < lambda_ ? 0 : 1;
  absl::StatusOr<Vector> v =
      out.branch == 0 ? first_.Draw(rng) : second_.Draw(rng);
  if (!v.ok()) return v.status();
  out.sample = *std::move(v);
  return out;
}

absl::StatusOr<DisjointUnionDraw> DisjointUnionSampler(
    const MechanismHandle& mechanism, const Vector& fval, const Invariant& c,
    const Invariant& c_prime, uint64_t seed) {
  absl::StatusOr<DisjointUnion> u =
      DisjointUnion::Create(mechanism, fval, c, c_prime, seed);
  if (!u.ok()) return u.status();
  Rng rng(seed);
  return u->Draw(rng);
}

absl::StatusOr<MechanismHandle> MixtureMechanism(
    std::span<const MechanismHandle> mechanisms,
    std::span<const double> weights) {
  if (mechanisms.empty() || mechanisms.size() != weights.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "WeightError: ", weights.size(), " weights for ", mechanisms.size(),
        " mechanisms"));
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      return absl::InvalidArgumentError(
          absl::StrCat("WeightError: weight ", w, " is not a probability"));
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    return absl::InvalidArgumentError(
        absl::StrCat("WeightError: weights sum to ", total));
  }
  const MechanismHandle& head = mechanisms.front();
  double epsilon = 0.0;
  double delta = 0.0;
  bool shared_invariant = head.invariant.has_value();
  bool all_densities = true;
  for (const MechanismHandle& m : mechanisms) {
    if (m.input_dim != head.input_dim || m.output_dim != head.output_dim) {
      return absl::InvalidArgumentError(
          "DimensionMismatch: mixture components differ in dimension");
    }
    epsilon = std::max(epsilon, m.budget.epsilon());
    delta = std::max(delta, m.budget.delta());
    shared_invariant = shared_invariant && m.invariant &&
                       SameInvariant(*m.invariant, *head.invariant);
    all_densities = all_densities && m.density.has_value();
  }
  absl::StatusOr<PrivacyParams> budget = PrivacyParams::Create(epsilon, delta);
  if (!budget.ok()) return budget.status();

  auto parts = std::make_shared<const std::vector<MechanismHandle>>(
      mechanisms.begin(), mechanisms.end());
  auto probs =
      std::make_shared<const std::vector<double>>(weights.begin(), weights.end());
  MechanismSampler sampler =
      [parts, probs](const Vector& fval,
                     uint64_t seed) -> absl::StatusOr<Vector> {
    Rng rng(seed);
    const double u = rng.Uniform();
    size_t pick = probs->size() - 1;
    double cumulative = 0.0;
    for (size_t i = 0; i < probs->size(); ++i) {
      cumulative += (*probs)[i];
      if (u < cumulative) {
        pick = i;
        break;
      }
    }
    while ((*probs)[pick] == 0.0 && pick > 0) --pick;  // rounding at the top
    return (*parts)[pick].sampler(fval, rng.NextU64());
  };
  std::optional<MechanismDensity> density;
  if (all_densities) {
    density = [parts, probs](const Vector& fval, const Vector& v) {
      double sum = 0.0;
      for (size_t i = 0; i < parts->size(); ++i) {
        if ((*probs)[i] > 0.0) sum += (*probs)[i] * (*(*parts)[i].density)(fval, v);
      }
      return sum;
    };
  }
  return MechanismHandle{
      .input_dim = head.input_dim,
      .output_dim = head.output_dim,
      .sampler = std::move(sampler),
      .density = std::move(density),
      .budget = *budget,
      .invariant = shared_invariant ? head.invariant : std::nullopt,
      .additive_noise = std::nullopt,
  };
}

MechanismHandle Postprocess(const MechanismHandle& mechanism,
                            std::function<Vector(const Vector&)> h,
                            int output_dim,
                            std::optional<Invariant> output_invariant) {
  MechanismSampler inner = mechanism.sampler;
  return MechanismHandle{
      .input_dim = mechanism.input_dim,
      .output_dim = output_dim,
      .sampler = [inner = std::move(inner), h = std::move(h)](
                     const Vector& fval,
                     uint64_t seed) -> absl::StatusOr<Vector> {
        absl::StatusOr<Vector> v = inner(fval, seed);
        if (!v.ok()) return v.status();
        return h(*v);
      },
      .density = std::nullopt,
      .budget = mechanism.budget,
      .invariant = std::move(output_invariant),
      .additive_noise = std::nullopt,
  };
}

}  // namespace cdp
