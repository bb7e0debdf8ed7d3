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

#include "cdp/mechanisms.h"

#include <cmath>
#include <numbers>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace cdp {
namespace {

absl::Status CheckDim(const NoiseSpec& noise, const Vector& v) {
  if (v.size() != noise.dim()) {
    return absl::InvalidArgumentError(
        absl::StrCat("DimensionMismatch: vector has ", v.size(),
                     " coordinates, noise has ", noise.dim()));
  }
  return absl::OkStatus();
}

absl::Status CheckScale(double scale, int dim) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise scale must be positive, got ", scale));
  }
  if (dim < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("noise dimension must be at least 1, got ", dim));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<NoiseSpec> NoiseSpec::Laplace(double scale, int dim) {
  if (absl::Status s = CheckScale(scale, dim); !s.ok()) return s;
  return NoiseSpec(NoiseKind::kLaplace, scale, dim);
}

absl::StatusOr<NoiseSpec> NoiseSpec::Gaussian(double sigma, int dim) {
  if (absl::Status s = CheckScale(sigma, dim); !s.ok()) return s;
  return NoiseSpec(NoiseKind::kGaussian, sigma, dim);
}

NoiseSpec NoiseSpec::WithDim(int dim) const {
  return NoiseSpec(kind_, scale_, dim);
}

double NoiseSpec::Density1D(double x) const {
  return std::exp(LogDensity1D(x));
}

double NoiseSpec::LogDensity1D(double x) const {
  if (kind_ == NoiseKind::kLaplace) {
    return -std::log(2.0 * scale_) - std::abs(x) / scale_;
  }
  const double z = x / scale_;
  return -0.5 * z * z - std::log(scale_) -
         0.5 * std::log(2.0 * std::numbers::pi);
}

double NoiseSpec::PeakDensity1D() const {
  if (kind_ == NoiseKind::kLaplace) return 1.0 / (2.0 * scale_);
  return 1.0 / (scale_ * std::sqrt(2.0 * std::numbers::pi));
}

double NoiseSpec::Cdf1D(double x) const {
  if (kind_ == NoiseKind::kLaplace) {
    return x < 0.0 ? 0.5 * std::exp(x / scale_)
                   : 1.0 - 0.5 * std::exp(-x / scale_);
  }
  return 0.5 * std::erfc(-x / (scale_ * std::numbers::sqrt2));
}

double NoiseSpec::Variance1D() const {
  return kind_ == NoiseKind::kLaplace ? 2.0 * scale_ * scale_
                                      : scale_ * scale_;
}

double NoiseSpec::Draw1D(Rng& rng) const {
  return kind_ == NoiseKind::kLaplace ? rng.Laplace(scale_)
                                      : scale_ * rng.Gaussian();
}

double NoiseSpec::LogDensityUnchecked(const Vector& u) const {
  const double n = static_cast<double>(u.size());
  if (kind_ == NoiseKind::kLaplace) {
    return -n * std::log(2.0 * scale_) - u.lpNorm<1>() / scale_;
  }
  return -0.5 * u.squaredNorm() / (scale_ * scale_) -
         n * (std::log(scale_) + 0.5 * std::log(2.0 * std::numbers::pi));
}

absl::StatusOr<PrivacyParams> PrivacyParams::Create(double epsilon,
                                                    double delta) {
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("InvalidBudget: epsilon must be positive, got ", epsilon));
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("InvalidBudget: delta must lie in [0, 1), got ", delta));
  }
  return PrivacyParams(epsilon, delta);
}

QuerySpec QuerySpec::Histogram(int bins) {
  QuerySpec q;
  q.dim = bins;
  q.l1_sensitivity = 1.0;
  q.l2_sensitivity = 1.0;
  q.eval = [bins](const Dataset& records) {
    Vector counts = Vector::Zero(bins);
    for (int r : records) {
      if (r >= 0 && r < bins) counts[r] += 1.0;
    }
    return counts;
  };
  return q;
}

absl::StatusOr<double> CalibrateLaplace(double l1_sensitivity, double epsilon) {
  if (!(l1_sensitivity > 0.0) || !std::isfinite(l1_sensitivity)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "InvalidSensitivity: L1 sensitivity must be positive, got ",
        l1_sensitivity));
  }
  if (!(epsilon > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("InvalidBudget: epsilon must be positive, got ", epsilon));
  }
  return l1_sensitivity / epsilon;
}

absl::StatusOr<double> CalibrateGaussian(double l2_sensitivity,
                                         const PrivacyParams& params,
                                         GaussianCalibration method) {
  if (!(l2_sensitivity > 0.0) || !std::isfinite(l2_sensitivity)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "InvalidSensitivity: L2 sensitivity must be positive, got ",
        l2_sensitivity));
  }
  const double delta = params.delta();
  if (!(delta > 0.0)) {
    return absl::InvalidArgumentError(
        "InvalidBudget: the Gaussian mechanism needs delta in (0, 1)");
  }
  const double log_inv_delta = std::log(1.0 / delta);
  if (method == GaussianCalibration::kClassical) {
    return l2_sensitivity * std::sqrt(2.0 * std::log(1.25 / delta)) /
           params.epsilon();
  }
  return l2_sensitivity * (1.0 + std::sqrt(1.0 + log_inv_delta)) /
         params.epsilon();
}

Vector DrawNoise(const NoiseSpec& noise, Rng& rng) {
  Vector u(noise.dim());
  for (int i = 0; i < noise.dim(); ++i) u[i] = noise.Draw1D(rng);
  return u;
}

absl::StatusOr<Vector> SampleAdditive(const Vector& fval,
                                      const NoiseSpec& noise, Rng& rng) {
  if (absl::Status s = CheckDim(noise, fval); !s.ok()) return s;
  return Vector(fval + DrawNoise(noise, rng));
}

absl::StatusOr<Vector> SampleAdditive(const Vector& fval,
                                      const NoiseSpec& noise, uint64_t seed) {
  Rng rng(seed);
  return SampleAdditive(fval, noise, rng);
}

absl::StatusOr<double> LogDensity(const NoiseSpec& noise, const Vector& u) {
  if (absl::Status s = CheckDim(noise, u); !s.ok()) return s;
  return noise.LogDensityUnchecked(u);
}

absl::StatusOr<double> Density(const NoiseSpec& noise, const Vector& u) {
  absl::StatusOr<double> log_density = LogDensity(noise, u);
  if (!log_density.ok()) return log_density.status();
  return std::exp(*log_density);
}

}  // namespace cdp
