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

#include "cdp/diagnostics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace cdp {
namespace {

double SampleVariance(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return ss / (xs.size() - 1);
}

}  // namespace

double BatchMeansEss(std::span<const double> series, int batches) {
  const size_t n = series.size();
  if (n == 0) return 0.0;
  const double variance = SampleVariance(series);
  if (!(variance > 0.0)) return 1.0;
  if (batches < 2 || n < 2 * static_cast<size_t>(batches)) {
    return static_cast<double>(n);
  }
  const size_t batch = n / batches;
  std::vector<double> means(batches);
  for (int k = 0; k < batches; ++k) {
    double sum = 0.0;
    for (size_t i = 0; i < batch; ++i) sum += series[k * batch + i];
    means[k] = sum / batch;
  }
  const double between = SampleVariance(means);
  const double used = static_cast<double>(batch) * batches;
  if (!(between > 0.0)) return used;
  return used * variance / (batch * between);
}

double MinColumnEss(const Matrix& draws, int batches) {
  if (draws.rows() == 0) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < draws.cols(); ++c) {
    const auto column = draws.col(c);
    if ((column.array() == column[0]).all()) continue;
    best = std::min(best, BatchMeansEss(std::span<const double>(
                                            column.data(), column.size()),
                                        batches));
  }
  return std::isfinite(best) ? best : 1.0;
}

}  // namespace cdp
