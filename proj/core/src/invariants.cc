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

#include "cdp/invariants.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace cdp {
namespace {

absl::Status DimensionMismatch(int expected, Eigen::Index got) {
  return absl::InvalidArgumentError(absl::StrCat(
      "DimensionMismatch: expected ", expected, " coordinates, got ", got));
}

struct Elimination {
  Matrix reduced;  // [A | b] after Gauss-Jordan, pivot rows normalised
  std::vector<int> pivot_column_of_row;
  int rank = 0;
};

// Column scan runs from the last column to the first. The threshold is
// relative to the largest pivot seen so far (or the largest entry of A
// before the first pivot).
Elimination Eliminate(const Matrix& a, const Vector& b) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  Elimination e;
  e.reduced.resize(rows, cols + 1);
  e.reduced << a, b;
  e.pivot_column_of_row.assign(rows, -1);
  if (rows == 0) return e;

  std::vector<bool> used(rows, false);
  double scale = a.cwiseAbs().maxCoeff();
  for (Eigen::Index c = cols - 1; c >= 0 && e.rank < rows; --c) {
    Eigen::Index best = -1;
    double best_abs = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (used[r]) continue;
      const double v = std::abs(e.reduced(r, c));
      if (v > best_abs) {
        best = r;
        best_abs = v;
      }
    }
    if (best < 0 || best_abs <= kRankTolerance * scale) continue;
    scale = std::max(scale, best_abs);
    used[best] = true;
    e.pivot_column_of_row[best] = static_cast<int>(c);
    ++e.rank;
    e.reduced.row(best) /= e.reduced(best, c);
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (r == best) continue;
      const double factor = e.reduced(r, c);
      if (factor != 0.0) e.reduced.row(r) -= factor * e.reduced.row(best);
    }
  }
  return e;
}

absl::Status RankDeficient(int rank, Eigen::Index rows) {
  return absl::FailedPreconditionError(
      absl::StrCat("RankDeficient: constraint matrix has numerical rank ",
                   rank, " but ", rows, " rows"));
}

}  // namespace

absl::StatusOr<AffineEquality> AffineEquality::Create(Matrix a, Vector b) {
  if (a.rows() != b.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "equality has ", a.rows(), " rows but b has ", b.size(), " entries"));
  }
  if (a.cols() < 1) {
    return absl::InvalidArgumentError("equality needs at least one column");
  }
  if (a.rows() >= a.cols()) {
    return absl::InvalidArgumentError(
        absl::StrCat("equality needs fewer rows than columns, got ", a.rows(),
                     "x", a.cols()));
  }
  if (!a.allFinite() || !b.allFinite()) {
    return absl::InvalidArgumentError("equality entries must be finite");
  }
  const Elimination e = Eliminate(a, b);
  if (e.rank < a.rows()) return RankDeficient(e.rank, a.rows());
  return AffineEquality(std::move(a), std::move(b));
}

AffineEquality AffineEquality::None(int dim) {
  return AffineEquality(Matrix(0, dim), Vector(0));
}

AffineEquality AffineEquality::SumEquals(int dim, double total) {
  return AffineEquality(Matrix::Ones(1, dim), Vector::Constant(1, total));
}

absl::StatusOr<AffineInequality> AffineInequality::Create(Matrix a,
                                                          Vector lower) {
  if (a.rows() != lower.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("inequality has ", a.rows(), " rows but ", lower.size(),
                     " bounds"));
  }
  if (a.cols() < 1) {
    return absl::InvalidArgumentError("inequality needs at least one column");
  }
  return AffineInequality(std::move(a), std::move(lower));
}

AffineInequality AffineInequality::NonNegative(int dim) {
  return AffineInequality(Matrix::Identity(dim, dim), Vector::Zero(dim));
}

double AffineInequality::MaxViolation(const Vector& z) const {
  if (a_.rows() == 0) return -std::numeric_limits<double>::infinity();
  return (lower_ - a_ * z).maxCoeff();
}

bool AffineInequality::IsCoordinateBox() const {
  for (Eigen::Index r = 0; r < a_.rows(); ++r) {
    if ((a_.row(r).array() != 0.0).count() != 1) return false;
  }
  return true;
}

Invariant Invariant::Unconstrained(int dim) {
  return Invariant(dim, std::nullopt, std::nullopt);
}

Invariant::Invariant(AffineEquality eq)
    : dim_(eq.dim()), eq_(std::move(eq)), ineq_(std::nullopt) {}

Invariant::Invariant(AffineInequality ineq)
    : dim_(ineq.dim()), eq_(std::nullopt), ineq_(std::move(ineq)) {}

absl::StatusOr<Invariant> Invariant::Intersection(AffineEquality eq,
                                                  AffineInequality ineq) {
  if (eq.dim() != ineq.dim()) {
    return DimensionMismatch(eq.dim(), ineq.dim());
  }
  const int dim = eq.dim();
  return Invariant(dim, std::move(eq), std::move(ineq));
}

Invariant Invariant::Product(const Invariant& first, const Invariant& second) {
  const int n1 = first.dim();
  const int n2 = second.dim();
  const auto block = [](const Matrix* m1, int c1, const Matrix* m2, int c2) {
    const Eigen::Index r1 = m1 ? m1->rows() : 0;
    const Eigen::Index r2 = m2 ? m2->rows() : 0;
    Matrix out = Matrix::Zero(r1 + r2, c1 + c2);
    if (r1 > 0) out.topLeftCorner(r1, c1) = *m1;
    if (r2 > 0) out.bottomRightCorner(r2, c2) = *m2;
    return out;
  };
  const auto stack = [](const Vector* v1, const Vector* v2) {
    const Eigen::Index k1 = v1 ? v1->size() : 0;
    const Eigen::Index k2 = v2 ? v2->size() : 0;
    Vector out(k1 + k2);
    if (k1 > 0) out.head(k1) = *v1;
    if (k2 > 0) out.tail(k2) = *v2;
    return out;
  };

  std::optional<AffineEquality> eq;
  if (first.has_equality() || second.has_equality()) {
    const AffineEquality* e1 = first.has_equality() ? &*first.eq_ : nullptr;
    const AffineEquality* e2 = second.has_equality() ? &*second.eq_ : nullptr;
    // Block-diagonal stacking of full-row-rank blocks keeps full row rank.
    eq = AffineEquality(block(e1 ? &e1->a() : nullptr, n1,
                              e2 ? &e2->a() : nullptr, n2),
                        stack(e1 ? &e1->b() : nullptr,
                              e2 ? &e2->b() : nullptr));
  }
  std::optional<AffineInequality> ineq;
  if (first.has_inequality() || second.has_inequality()) {
    const AffineInequality* i1 =
        first.has_inequality() ? &*first.ineq_ : nullptr;
    const AffineInequality* i2 =
        second.has_inequality() ? &*second.ineq_ : nullptr;
    ineq = AffineInequality(block(i1 ? &i1->a() : nullptr, n1,
                                  i2 ? &i2->a() : nullptr, n2),
                            stack(i1 ? &i1->lower() : nullptr,
                                  i2 ? &i2->lower() : nullptr));
  }
  return Invariant(n1 + n2, std::move(eq), std::move(ineq));
}

absl::StatusOr<bool> Contains(const AffineEquality& eq, const Vector& z,
                              double tol) {
  if (z.size() != eq.dim()) return DimensionMismatch(eq.dim(), z.size());
  if (eq.rows() == 0) return true;
  return eq.Residual(z).lpNorm<Eigen::Infinity>() <= tol;
}

absl::StatusOr<bool> Contains(const AffineInequality& ineq, const Vector& z,
                              double tol) {
  if (z.size() != ineq.dim()) return DimensionMismatch(ineq.dim(), z.size());
  return ineq.Satisfied(z, tol);
}

absl::StatusOr<bool> Contains(const Invariant& inv, const Vector& z,
                              double tol) {
  if (z.size() != inv.dim()) return DimensionMismatch(inv.dim(), z.size());
  if (inv.has_equality()) {
    absl::StatusOr<bool> in = Contains(*inv.equality(), z, tol);
    if (!in.ok() || !*in) return in;
  }
  if (inv.has_inequality()) return Contains(*inv.inequality(), z, tol);
  return true;
}

Vector FreeParametrization::Solve(const Vector& free_values) const {
  Vector z(dim_);
  for (int j = 0; j < free_dim(); ++j) z[free_indices_[j]] = free_values[j];
  if (!pivot_indices_.empty()) {
    const Vector dependent = dependent_offset_ + dependent_map_ * free_values;
    for (size_t r = 0; r < pivot_indices_.size(); ++r) {
      z[pivot_indices_[r]] = dependent[r];
    }
  }
  return z;
}

Vector FreeParametrization::FreeCoordinates(const Vector& z) const {
  Vector w(free_dim());
  for (int j = 0; j < free_dim(); ++j) w[j] = z[free_indices_[j]];
  return w;
}

Matrix FreeParametrization::Basis() const {
  Matrix basis = Matrix::Zero(dim_, free_dim());
  for (int j = 0; j < free_dim(); ++j) basis(free_indices_[j], j) = 1.0;
  for (size_t r = 0; r < pivot_indices_.size(); ++r) {
    basis.row(pivot_indices_[r]) = dependent_map_.row(r);
  }
  return basis;
}

absl::StatusOr<FreeParametrization> SolveFreeParametrization(
    const AffineEquality& eq) {
  const int n = eq.dim();
  const Elimination e = Eliminate(eq.a(), eq.b());
  if (e.rank < eq.rows()) return RankDeficient(e.rank, eq.rows());

  FreeParametrization p;
  p.dim_ = n;
  std::vector<bool> is_pivot(n, false);
  // Pivot rows sorted by pivot column for a stable layout.
  std::vector<std::pair<int, int>> pivots;  // (column, row)
  for (int r = 0; r < eq.rows(); ++r) {
    pivots.emplace_back(e.pivot_column_of_row[r], r);
    is_pivot[e.pivot_column_of_row[r]] = true;
  }
  std::sort(pivots.begin(), pivots.end());
  for (int c = 0; c < n; ++c) {
    if (!is_pivot[c]) p.free_indices_.push_back(c);
  }
  p.dependent_map_.resize(pivots.size(), p.free_indices_.size());
  p.dependent_offset_.resize(pivots.size());
  for (size_t k = 0; k < pivots.size(); ++k) {
    const auto [column, row] = pivots[k];
    p.pivot_indices_.push_back(column);
    p.dependent_offset_[k] = e.reduced(row, n);
    for (size_t j = 0; j < p.free_indices_.size(); ++j) {
      p.dependent_map_(k, j) = -e.reduced(row, p.free_indices_[j]);
    }
  }
  return p;
}

}  // namespace cdp
