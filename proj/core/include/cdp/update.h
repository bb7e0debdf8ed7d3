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

#ifndef CDP_CORE_UPDATE_H_
#define CDP_CORE_UPDATE_H_

// Imaging: move an unconstrained release to the closest point of the
// invariant in L2, and the TopDown baseline for hierarchies.

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "cdp/hierarchy.h"
#include "cdp/invariants.h"
#include "cdp/mechanisms.h"
#include "cdp/rng.h"
#include "cdp/types.h"

namespace cdp {

// Orthogonal projection onto {A z = b}: z = y - A^T (A A^T)^{-1} (A y - b).
// The factorization of A A^T is computed once.
class AffineProjector {
 public:
  // FailedPrecondition ("SingularSystem") when A A^T is numerically singular.
  static absl::StatusOr<AffineProjector> Create(AffineEquality eq);

  const AffineEquality& equality() const { return eq_; }
  Vector Apply(const Vector& y) const;

 private:
  explicit AffineProjector(AffineEquality eq) : eq_(std::move(eq)) {}

  AffineEquality eq_;
  Eigen::LDLT<Matrix> gram_;
};

absl::StatusOr<Vector> ProjectAffine(const Vector& y, const AffineEquality& eq);

struct DykstraOptions {
  double tol = 1e-8;
  int64_t max_iter = 100000;  // sweeps over all constraint sets
};

// L2 projection onto {A z = b} intersected with {G z >= h} by Dykstra's
// alternating projections. Each sweep visits every halfspace and ends on the
// affine set, so the equality residual of the result is at rounding level.
// Internal ("NoConvergence") after max_iter sweeps, which usually means the
// intersection is empty.
absl::StatusOr<Vector> ProjectConvex(const Vector& y, const AffineEquality& eq,
                                     const AffineInequality& ineq,
                                     const DykstraOptions& options = {});

enum class ProjectionMethod { kClosedFormAffine, kDykstraIterative };

// f_L2 for a fixed invariant. Immutable once built, so one instance can be
// shared across threads.
class Projector {
 public:
  static absl::StatusOr<Projector> Create(Invariant constraint,
                                          const DykstraOptions& options = {});

  const Invariant& constraint() const { return constraint_; }
  ProjectionMethod method() const { return method_; }
  double tol() const { return options_.tol; }
  int64_t max_iter() const { return options_.max_iter; }

  absl::StatusOr<Vector> Apply(const Vector& y) const;

 private:
  Projector(Invariant constraint, const DykstraOptions& options)
      : constraint_(std::move(constraint)), options_(options) {}

  Invariant constraint_;
  DykstraOptions options_;
  ProjectionMethod method_ = ProjectionMethod::kClosedFormAffine;
  std::optional<AffineProjector> affine_;
};

// One draw of M_C(D) = f_L2(M(D)): sample the unconstrained mechanism, then
// project. FailedPrecondition ("InfeasibleInvariant") when fval lies off C.
absl::StatusOr<Vector> ImagedMechanism(const Vector& fval,
                                       const NoiseSpec& noise,
                                       const Invariant& invariant,
                                       uint64_t seed);
// Repeated draws with a prebuilt projector.
absl::StatusOr<Vector> ImagedDraw(const Vector& fval, const NoiseSpec& noise,
                                  const Projector& projector, Rng& rng);

// Equal-share TopDown: keep the noisy root, then level by level add
// (parent - sum of children) / k to each of the k children of every parent.
// InvalidArgument ("MalformedHierarchy") on a length mismatch.
absl::StatusOr<Vector> TopDown(const Hierarchy& hierarchy, const Vector& noisy);

}  // namespace cdp

#endif  // CDP_CORE_UPDATE_H_
