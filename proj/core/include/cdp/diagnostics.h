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

#ifndef CDP_CORE_DIAGNOSTICS_H_
#define CDP_CORE_DIAGNOSTICS_H_

#include <span>

#include "cdp/types.h"

namespace cdp {

inline constexpr int kDefaultEssBatches = 50;

// Batch-means effective sample size of one scalar series: the series is cut
// into `batches` equal batches and ESS = N * var(series) / (b * var(means)),
// with b the batch size. A constant series returns 1. Series shorter than
// 2 * batches fall back to their length.
double BatchMeansEss(std::span<const double> series,
                     int batches = kDefaultEssBatches);

// Minimum batch-means ESS over the columns of `draws` (one draw per row)
// that are not constant; 1 when every column is constant.
double MinColumnEss(const Matrix& draws, int batches = kDefaultEssBatches);

}  // namespace cdp

#endif  // CDP_CORE_DIAGNOSTICS_H_
