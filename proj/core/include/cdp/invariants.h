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

#ifndef CDP_CORE_INVARIANTS_H_
#define CDP_CORE_INVARIANTS_H_

#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "cdp/types.h"

namespace cdp {

// Default membership tolerance for equality rows.
inline constexpr double kMembershipTolerance = 1e-9;
// Pivots smaller than this, relative to the largest pivot, count as zero.
inline constexpr double kRankTolerance = 1e-10;

// C = {z : A z = b} with A of full row rank and fewer rows than columns.
class AffineEquality {
 public:
  // InvalidArgument on shape errors or when rows >= columns;
  // FailedPrecondition ("RankDeficient") when A is not of full row rank.
  static absl::StatusOr<AffineEquality> Create(Matrix a, Vector b);
  // No rows: every vector in R^dim is feasible.
  static AffineEquality None(int dim);
  // {z : z_1 + ... + z_dim = total}.
  static AffineEquality SumEquals(int dim, double total);

  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  int rows() const { return static_cast<int>(a_.rows()); }
  int dim() const { return static_cast<int>(a_.cols()); }

  Vector Residual(const Vector& z) const { return a_ * z - b_; }

 private:
  friend class Invariant;
  AffineEquality(Matrix a, Vector b) : a_(std::move(a)), b_(std::move(b)) {}

  Matrix a_;
  Vector b_;
};

// C = {z : A z >= a}, row by row.
class AffineInequality {
 public:
  static absl::StatusOr<AffineInequality> Create(Matrix a, Vector lower);
  // {z : z >= 0}.
  static AffineInequality NonNegative(int dim);

  const Matrix& a() const { return a_; }
  const Vector& lower() const { return lower_; }
  int rows() const { return static_cast<int>(a_.rows()); }
  int dim() const { return static_cast<int>(a_.cols()); }

  // Largest violation max_i (lower_i - (A z)_i), or -inf with no rows.
  double MaxViolation(const Vector& z) const;
  bool Satisfied(const Vector& z, double tol = 0.0) const {
    return MaxViolation(z) <= tol;
  }
  // True when every row constrains a single coordinate.
  bool IsCoordinateBox() const;

 private:
  friend class Invariant;
  AffineInequality(Matrix a, Vector lower)
      : a_(std::move(a)), lower_(std::move(lower)) {}

  Matrix a_;
  Vector lower_;
};

// An affine equality, an affine inequality system, their intersection, or
// all of R^dim.
class Invariant {
 public:
  static Invariant Unconstrained(int dim);
  explicit Invariant(AffineEquality eq);
  explicit Invariant(AffineInequality ineq);
  static absl::StatusOr<Invariant> Intersection(AffineEquality eq,
                                                AffineInequality ineq);
  // Block-diagonal product C1 x C2 on concatenated coordinates.
  static Invariant Product(const Invariant& first, const Invariant& second);

  int dim() const { return dim_; }
  const std::optional<AffineEquality>& equality() const { return eq_; }
  const std::optional<AffineInequality>& inequality() const { return ineq_; }
  bool has_equality() const { return eq_.has_value() && eq_->rows() > 0; }
  bool has_inequality() const {
    return ineq_.has_value() && ineq_->rows() > 0;
  }

 private:
  Invariant(int dim, std::optional<AffineEquality> eq,
            std::optional<AffineInequality> ineq)
      : dim_(dim), eq_(std::move(eq)), ineq_(std::move(ineq)) {}

  int dim_;
  std::optional<AffineEquality> eq_;
  std::optional<AffineInequality> ineq_;
};

// Membership with tolerance: equality rows within tol in max-norm, inequality
// rows violated by at most tol. InvalidArgument ("DimensionMismatch") on size
// mismatch.
absl::StatusOr<bool> Contains(const AffineEquality& eq, const Vector& z,
                              double tol = kMembershipTolerance);
absl::StatusOr<bool> Contains(const AffineInequality& ineq, const Vector& z,
                              double tol = kMembershipTolerance);
absl::StatusOr<bool> Contains(const Invariant& inv, const Vector& z,
                              double tol = kMembershipTolerance);

// Chart on C = {A z = b}: the n - n' free coordinates determine the n'
// dependent (pivot) coordinates through z_dep = offset + D z_free.
class FreeParametrization {
 public:
  int dim() const { return dim_; }
  int free_dim() const { return static_cast<int>(free_indices_.size()); }
  const std::vector<int>& free_indices() const { return free_indices_; }
  const std::vector<int>& pivot_indices() const { return pivot_indices_; }
  // D, the linear part of the dependent coordinates (n' x free_dim).
  const Matrix& dependent_map() const { return dependent_map_; }
  const Vector& dependent_offset() const { return dependent_offset_; }

  // Full vector in C with the given free coordinates.
  Vector Solve(const Vector& free_values) const;
  // The free coordinates of z (no membership check).
  Vector FreeCoordinates(const Vector& z) const;
  // n x free_dim matrix B with Solve(w) = Solve(0) + B w.
  Matrix Basis() const;

 private:
  friend absl::StatusOr<FreeParametrization> SolveFreeParametrization(
      const AffineEquality& eq);

  int dim_ = 0;
  std::vector<int> free_indices_;
  std::vector<int> pivot_indices_;
  Matrix dependent_map_;
  Vector dependent_offset_;
};

// Gauss-Jordan elimination with partial pivoting. Columns are scanned from
// the last to the first, so for the leaves-first hierarchy ordering the
// internal nodes become the dependent coordinates and the leaves stay free.
// FailedPrecondition ("RankDeficient") when a pivot falls below
// kRankTolerance relative to the largest pivot.
absl::StatusOr<FreeParametrization> SolveFreeParametrization(
    const AffineEquality& eq);

}  // namespace cdp

#endif  // CDP_CORE_INVARIANTS_H_
