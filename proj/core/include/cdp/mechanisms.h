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

#ifndef CDP_CORE_MECHANISMS_H_
#define CDP_CORE_MECHANISMS_H_

#include <cstdint>
#include <functional>
#include <span>

#include "absl/status/statusor.h"
#include "cdp/rng.h"
#include "cdp/types.h"

namespace cdp {

enum class NoiseKind { kLaplace, kGaussian };

// I.i.d. additive noise: Laplace with scale lambda, or Gaussian with standard
// deviation sigma, in `dim` coordinates.
class NoiseSpec {
 public:
  static absl::StatusOr<NoiseSpec> Laplace(double scale, int dim);
  static absl::StatusOr<NoiseSpec> Gaussian(double sigma, int dim);

  NoiseKind kind() const { return kind_; }
  double scale() const { return scale_; }
  int dim() const { return dim_; }

  // Same law in a different number of coordinates.
  NoiseSpec WithDim(int dim) const;

  // One-coordinate density and its logarithm.
  double Density1D(double x) const;
  double LogDensity1D(double x) const;
  // Largest value of Density1D (attained at 0).
  double PeakDensity1D() const;
  double Cdf1D(double x) const;
  double Variance1D() const;
  double Draw1D(Rng& rng) const;

  // Product density; no dimension check (callers validate once).
  double LogDensityUnchecked(const Vector& u) const;

 private:
  NoiseSpec(NoiseKind kind, double scale, int dim)
      : kind_(kind), scale_(scale), dim_(dim) {}

  NoiseKind kind_;
  double scale_;
  int dim_;
};

// epsilon > 0, 0 <= delta < 1.
class PrivacyParams {
 public:
  static absl::StatusOr<PrivacyParams> Create(double epsilon,
                                              double delta = 0.0);

  double epsilon() const { return epsilon_; }
  double delta() const { return delta_; }

 private:
  PrivacyParams(double epsilon, double delta)
      : epsilon_(epsilon), delta_(delta) {}

  double epsilon_;
  double delta_;
};

// A dataset is a list of records, each the category index it falls into.
using Dataset = std::vector<int>;

struct QuerySpec {
  int dim = 0;
  double l1_sensitivity = 0.0;
  double l2_sensitivity = 0.0;
  std::function<Vector(const Dataset&)> eval;

  // Histogram over `bins` categories. Neighbouring datasets differ in at most
  // one record, so both sensitivities are 1.
  static QuerySpec Histogram(int bins);
};

// lambda = l1 / epsilon. InvalidArgument naming InvalidSensitivity or
// InvalidBudget on bad input.
absl::StatusOr<double> CalibrateLaplace(double l1_sensitivity, double epsilon);

enum class GaussianCalibration {
  // sigma = l2 * (1 + sqrt(1 + ln(1/delta))) / epsilon.
  kDefault,
  // sigma = l2 * sqrt(2 ln(1.25/delta)) / epsilon, for comparison only.
  kClassical,
};

absl::StatusOr<double> CalibrateGaussian(
    double l2_sensitivity, const PrivacyParams& params,
    GaussianCalibration method = GaussianCalibration::kDefault);

// fval + noise draw. Deterministic in `seed`; the noise vector depends only on
// (noise, seed), so shifting fval shifts the output by the same amount.
absl::StatusOr<Vector> SampleAdditive(const Vector& fval,
                                      const NoiseSpec& noise, uint64_t seed);
// Same, drawing from a caller-owned stream.
absl::StatusOr<Vector> SampleAdditive(const Vector& fval,
                                      const NoiseSpec& noise, Rng& rng);
Vector DrawNoise(const NoiseSpec& noise, Rng& rng);

// Product density of the noise vector u.
absl::StatusOr<double> Density(const NoiseSpec& noise, const Vector& u);
absl::StatusOr<double> LogDensity(const NoiseSpec& noise, const Vector& u);

}  // namespace cdp

#endif  // CDP_CORE_MECHANISMS_H_
