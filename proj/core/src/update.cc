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

#include "cdp/update.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace cdp {

absl::StatusOr<AffineProjector> AffineProjector::Create(AffineEquality eq) {
  AffineProjector p(std::move(eq));
  if (p.eq_.rows() == 0) return p;
  const Matrix& a = p.eq_.a();
  p.gram_.compute(a * a.transpose());
  const Vector pivots = p.gram_.vectorD().cwiseAbs();
  if (p.gram_.info() != Eigen::Success ||
      pivots.minCoeff() <= 1e-12 * pivots.maxCoeff()) {
    return absl::FailedPreconditionError(
        "SingularSystem: A A^T is numerically singular");
  }
  return p;
}

Vector AffineProjector::Apply(const Vector& y) const {
  if (eq_.rows() == 0) return y;
  const Matrix& a = eq_.a();
  return y - a.transpose() * gram_.solve(a * y - eq_.b());
}

absl::StatusOr<Vector> ProjectAffine(const Vector& y, const AffineEquality& eq) {
  if (y.size() != eq.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "DimensionMismatch: vector has ", y.size(), " coordinates, equality ",
        eq.dim()));
  }
  absl::StatusOr<AffineProjector> p = AffineProjector::Create(eq);
  if (!p.ok()) return p.status();
  return p->Apply(y);
}

namespace {

struct Halfspace {
  std::vector<int> index;
  std::vector<double> coef;
  double lower = 0.0;
  double norm_sq = 0.0;

  double Dot(const Vector& z) const {
    double s = 0.0;
    for (size_t k = 0; k < index.size(); ++k) s += coef[k] * z[index[k]];
    return s;
  }
};

std::vector<Halfspace> SparseRows(const AffineInequality& ineq) {
  std::vector<Halfspace> rows(ineq.rows());
  for (int r = 0; r < ineq.rows(); ++r) {
    for (int c = 0; c < ineq.dim(); ++c) {
      const double v = ineq.a()(r, c);
      if (v == 0.0) continue;
      rows[r].index.push_back(c);
      rows[r].coef.push_back(v);
      rows[r].norm_sq += v * v;
    }
    rows[r].lower = ineq.lower()[r];
  }
  return rows;
}

absl::StatusOr<Vector> Dykstra(const Vector& y, const AffineProjector& affine,
                               const AffineInequality& ineq,
                               const DykstraOptions& options) {
  const std::vector<Halfspace> rows = SparseRows(ineq);
  const bool has_affine = affine.equality().rows() > 0;
  const double scale = 1.0 + y.lpNorm<Eigen::Infinity>();

  Vector x = has_affine ? affine.Apply(y) : y;
  // The affine projection already meets the inequalities, to the same
  // tolerance the iteration stops at.
  if (ineq.MaxViolation(x) <= options.tol) return x;

  x = y;
  // Dykstra increments: one scalar multiple of the row normal per halfspace,
  // a full vector for the affine set.
  std::vector<double> half_inc(rows.size(), 0.0);
  Vector affine_inc = Vector::Zero(y.size());
  Vector prev(y.size());
  Vector shifted(y.size());
  double change = 0.0;
  for (int64_t sweep = 0; sweep < options.max_iter; ++sweep) {
    prev = x;
    // The iterate can sit still for a whole sweep while the increments are
    // still moving, so convergence also watches the increments.
    double inc_change = 0.0;
    for (size_t r = 0; r < rows.size(); ++r) {
      const Halfspace& h = rows[r];
      if (h.norm_sq == 0.0) continue;
      // x + inc * a, projected onto {a.z >= lower}; the new increment is the
      // multiple of a removed by the projection.
      const double t = h.Dot(x) + half_inc[r] * h.norm_sq;
      const double step = std::max(0.0, (h.lower - t) / h.norm_sq);
      const double delta = half_inc[r] + step;
      for (size_t k = 0; k < h.index.size(); ++k) {
        x[h.index[k]] += delta * h.coef[k];
      }
      inc_change = std::max(inc_change, std::abs(half_inc[r] + step) *
                                            std::sqrt(h.norm_sq));
      half_inc[r] = -step;
    }
    if (has_affine) {
      shifted = x + affine_inc;
      x = affine.Apply(shifted);
      const Vector next_inc = shifted - x;
      inc_change = std::max(
          inc_change, (next_inc - affine_inc).lpNorm<Eigen::Infinity>());
      affine_inc = next_inc;
    }
    change = std::max((x - prev).lpNorm<Eigen::Infinity>(), inc_change);
    if (change <= options.tol * scale &&
        ineq.MaxViolation(x) <= options.tol &&
        (!has_affine ||
         affine.equality().Residual(x).lpNorm<Eigen::Infinity>() <=
             options.tol)) {
      return x;
    }
  }
  return absl::InternalError(absl::StrCat(
      "NoConvergence: Dykstra stopped after ", options.max_iter,
      " sweeps with last change ", change, " and inequality violation ",
      ineq.MaxViolation(x), "; the invariant may be infeasible"));
}

}  // namespace

absl::StatusOr<Vector> ProjectConvex(const Vector& y, const AffineEquality& eq,
                                     const AffineInequality& ineq,
                                     const DykstraOptions& options) {
  if (y.size() != eq.dim() || y.size() != ineq.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "DimensionMismatch: vector has ", y.size(), " coordinates, equality ",
        eq.dim(), ", inequality ", ineq.dim()));
  }
  if (!(options.tol > 0.0) || options.max_iter < 1) {
    return absl::InvalidArgumentError("tol and max_iter must be positive");
  }
  absl::StatusOr<AffineProjector> affine = AffineProjector::Create(eq);
  if (!affine.ok()) return affine.status();
  return Dykstra(y, *affine, ineq, options);
}

absl::StatusOr<Projector> Projector::Create(Invariant constraint,
                                            const DykstraOptions& options) {
  if (!(options.tol > 0.0) || options.max_iter < 1) {
    return absl::InvalidArgumentError("tol and max_iter must be positive");
  }
  Projector p(std::move(constraint), options);
  const AffineEquality eq = p.constraint_.has_equality()
                                ? *p.constraint_.equality()
                                : AffineEquality::None(p.constraint_.dim());
  absl::StatusOr<AffineProjector> affine = AffineProjector::Create(eq);
  if (!affine.ok()) return affine.status();
  p.affine_ = *std::move(affine);
  p.method_ = p.constraint_.has_inequality()
                  ? ProjectionMethod::kDykstraIterative
                  : ProjectionMethod::kClosedFormAffine;
  return p;
}

absl::StatusOr<Vector> Projector::Apply(const Vector& y) const {
  if (y.size() != constraint_.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "DimensionMismatch: vector has ", y.size(), " coordinates, invariant ",
        constraint_.dim()));
  }
  if (method_ == ProjectionMethod::kClosedFormAffine) return affine_->Apply(y);
  return Dykstra(y, *affine_, *constraint_.inequality(), options_);
}

absl::StatusOr<Vector> ImagedDraw(const Vector& fval, const NoiseSpec& noise,
                                  const Projector& projector, Rng& rng) {
  if (fval.size() != noise.dim()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "DimensionMismatch: query value has ", fval.size(),
        " coordinates, noise ", noise.dim()));
  }
  return projector.Apply(fval + DrawNoise(noise, rng));
}

absl::StatusOr<Vector> ImagedMechanism(const Vector& fval,
                                       const NoiseSpec& noise,
                                       const Invariant& invariant,
                                       uint64_t seed) {
  const double tol =
      kMembershipTolerance *
      std::max(1.0, fval.size() ? fval.lpNorm<Eigen::Infinity>() : 0.0);
  absl::StatusOr<bool> inside = Contains(invariant, fval, tol);
  if (!inside.ok()) return inside.status();
  if (!*inside) {
    return absl::FailedPreconditionError(
        "InfeasibleInvariant: the query value lies outside the invariant");
  }
  absl::StatusOr<Projector> projector = Projector::Create(invariant);
  if (!projector.ok()) return projector.status();
  Rng rng(seed);
  return ImagedDraw(fval, noise, *projector, rng);
}

absl::StatusOr<Vector> TopDown(const Hierarchy& hierarchy,
                               const Vector& noisy) {
  if (noisy.size() != hierarchy.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "MalformedHierarchy: ", noisy.size(), " values for ",
        hierarchy.size(), " nodes"));
  }
  Vector out = noisy;
  for (int level = 1; level < hierarchy.num_levels(); ++level) {
    for (int parent : hierarchy.LevelIndices(level)) {
      const std::vector<int>& kids = hierarchy.children(parent);
      if (kids.empty()) continue;
      double sum = 0.0;
      for (int c : kids) sum += out[c];
      const double share = (out[parent] - sum) / kids.size();
      for (int c : kids) out[c] += share;
    }
  }
  return out;
}

}  // namespace cdp
