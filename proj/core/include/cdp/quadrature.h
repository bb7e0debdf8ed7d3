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

#ifndef CDP_CORE_QUADRATURE_H_
#define CDP_CORE_QUADRATURE_H_

#include <functional>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "cdp/types.h"

namespace cdp {

struct QuadratureOptions {
  double rel_tol = 1e-6;
  double abs_tol = 0.0;
  // Interval budget for each one-dimensional adaptive integral.
  int max_intervals = 4000;
  // Semi-infinite pieces are mapped by t = b +/- length_scale * x / (1 - x).
  double length_scale = 1.0;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  long evaluations = 0;
};

// Adaptive 15-point Gauss-Kronrod on [lo, hi]; either end may be infinite.
// `breakpoints` inside the range split the integrand where it is not smooth.
// InternalError ("QuadratureFailure") when the interval budget runs out
// before the tolerance is met.
absl::StatusOr<QuadratureResult> Integrate1D(
    const std::function<double(double)>& f, double lo, double hi,
    std::vector<double> breakpoints, const QuadratureOptions& options);

// Hyperplanes {w : normals.row(j) . w + offsets(j) = 0} off which an
// integrand on R^d is smooth, e.g. the |u_j| = 0 creases of a Laplace density
// pulled back to a linear chart.
struct KinkSet {
  Matrix normals;
  Vector offsets;
};

// Iterated adaptive integration of f over a box (default R^d). At each level
// the breakpoints of the partially integrated function are found exactly: the
// remaining integral can only lose smoothness where a subset of the kink
// hyperplanes becomes concurrent in the remaining coordinates. Inner levels run
// at a tenth of the outer tolerance.
absl::StatusOr<QuadratureResult> IntegrateNd(
    const std::function<double(const Vector&)>& f, int dim,
    const KinkSet& kinks, const QuadratureOptions& options,
    std::vector<std::pair<double, double>> bounds = {});

}  // namespace cdp

#endif  // CDP_CORE_QUADRATURE_H_
