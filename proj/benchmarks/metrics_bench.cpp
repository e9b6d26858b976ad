// Copyright 2026 The Radial Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <vector>

#include <benchmark/benchmark.h>

#include "radial/metrics.hpp"
#include "radial/random.hpp"

namespace radial {
namespace {

void BM_KendallTau(benchmark::State& state) {
  Rng rng(6);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Vector xs = rng.normal_vector(n), ys = rng.normal_vector(n);
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau(xs, ys));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(8)->Range(64, 32768)->Complexity(benchmark::oNLogN);

void BM_Spearman(benchmark::State& state) {
  Rng rng(7);
  const auto n = static_cast<std::size_t>(state.range(0));
  const Vector xs = rng.normal_vector(n), ys = rng.normal_vector(n);
  for (auto _ : state) benchmark::DoNotOptimize(spearman(xs, ys));
}
BENCHMARK(BM_Spearman)->Arg(4096);

}  // namespace
}  // namespace radial
