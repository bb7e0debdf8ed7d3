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

#ifndef CDP_CORE_RNG_H_
#define CDP_CORE_RNG_H_

#include <cstdint>
#include <random>

namespace cdp {

// Mixes `seed` and `stream` into an independent 64-bit seed (SplitMix64
// finalizer). Used to hand deterministic sub-streams to composed mechanisms,
// repetitions and worker threads.
uint64_t DeriveSeed(uint64_t seed, uint64_t stream);

// Seeded random source. There is no global generator anywhere in the
// library; every sampling routine takes either a seed or an Rng&.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t seed() const { return seed_; }

  uint64_t NextU64() { return engine_(); }

  // Uniform on the open interval (0, 1), 53-bit resolution.
  double Uniform();

  // Standard normal via Box-Muller; caches the second variate.
  double Gaussian();

  // Laplace(0, scale) by inverse-CDF transform of one uniform draw.
  double Laplace(double scale);

  // A child generator whose stream is a pure function of (seed, stream).
  Rng Split(uint64_t stream) const { return Rng(DeriveSeed(seed_, stream)); }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace cdp

#endif  // CDP_CORE_RNG_H_
