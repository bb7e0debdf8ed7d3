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

// Microbenchmarks for the hot paths: projection, the MH step, normalizing
// constants and TopDown.

#include <optional>

#include "benchmark/benchmark.h"
#include "cdp/hierarchy.h"
#include "cdp/invariants.h"
#include "cdp/mechanisms.h"
#include "cdp/revision.h"
#include "cdp/rng.h"
#include "cdp/update.h"

namespace cdp {
namespace {

Hierarchy MakeTree(int branching) {
  return *Hierarchy::Balanced({branching, branching});
}

void BM_AffineProjection(benchmark::State& state) {
  const Hierarchy h = MakeTree(static_cast<int>(state.range(0)));
  const AffineProjector proj = *AffineProjector::Create(*HierarchyToEqualities(h));
  Rng rng(1);
  const Vector y = DrawNoise(*NoiseSpec::Laplace(10.0, h.size()), rng);
  for (auto _ : state) benchmark::DoNotOptimize(proj.Apply(y));
  state.counters["dim"] = h.size();
}
BENCHMARK(BM_AffineProjection)->Arg(4)->Arg(8)->Arg(16);

void BM_DykstraNonneg(benchmark::State& state) {
  const Hierarchy h = MakeTree(static_cast<int>(state.range(0)));
  const AffineEquality eq = *HierarchyToEqualities(h);
  const AffineInequality nonneg = AffineInequality::NonNegative(h.size());
  Rng rng(2);
  // Centred noise so a good share of coordinates start negative.
  const Vector y = DrawNoise(*NoiseSpec::Laplace(1.0, h.size()), rng);
  for (auto _ : state) benchmark::DoNotOptimize(ProjectConvex(y, eq, nonneg));
}
BENCHMARK(BM_DykstraNonneg)->Arg(4)->Arg(8);

void BM_MhStep(benchmark::State& state) {
  const Hierarchy h = MakeTree(static_cast<int>(state.range(0)));
  const Vector x = h.Aggregate(Vector::Constant(h.num_leaves(), 100.0));
  const NoiseSpec noise = *NoiseSpec::Laplace(2.0, h.size());
  MhConfig config;
  config.n_samples = 1;
  config.burn_in = 10000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(MhSample(x, noise, h, std::nullopt, config));
  }
  state.SetItemsProcessed(state.iterations() * (config.burn_in + 1));
}
BENCHMARK(BM_MhStep)->Arg(4)->Arg(8);

void BM_NormalizingConstantQuadrature(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const AffineEquality eq = AffineEquality::SumEquals(n, 0.0);
  const NoiseSpec noise = *NoiseSpec::Laplace(1.0, n);
  for (auto _ : state) benchmark::DoNotOptimize(NormalizingConstant(noise, eq));
}
BENCHMARK(BM_NormalizingConstantQuadrature)->Arg(2)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_TopDown(benchmark::State& state) {
  const Hierarchy h = MakeTree(static_cast<int>(state.range(0)));
  Rng rng(3);
  const Vector y = DrawNoise(*NoiseSpec::Laplace(2.0, h.size()), rng);
  for (auto _ : state) benchmark::DoNotOptimize(TopDown(h, y));
}
BENCHMARK(BM_TopDown)->Arg(4)->Arg(16)->Arg(64);

}  // namespace
}  // namespace cdp

BENCHMARK_MAIN();
