// Copyright 2026 The fanocirc Authors
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


// Microbenchmarks for the hot paths of a frequency sweep.

#include <benchmark/benchmark.h>

#include "fanocirc/dynamics.hpp"

namespace {

using namespace fanocirc;

// Fitted chip at its clockwise operating point.
DeviceParams chip() {
  DeviceParams p;
  p.e_j_ghz = {14.73, 15.15, 15.22};
  p.c_x_ff = 76.0;
  return p;
}

const BiasPoint kBias{3.518722258080232, {1.01945962264241, 1.5895433145219815, 0.0}};
constexpr double kDrive = 7.278465667046631;

void BM_Eigensolve(benchmark::State& state) {
  auto p = chip();
  p.n_cut = static_cast<int>(state.range(0));
  const auto sector = QuasiparticleSector::from_id(0);
  for (auto _ : state) benchmark::DoNotOptimize(solve_loop(p, kBias, sector));
}
BENCHMARK(BM_Eigensolve)->Arg(5)->Arg(7)->Arg(9)->Unit(benchmark::kMillisecond);

void BM_SmatrixAdiabatic(benchmark::State& state) {
  const auto p = chip();
  const auto es = solve_loop(p, kBias, QuasiparticleSector::from_id(0));
  for (auto _ : state) benchmark::DoNotOptimize(smatrix_adiabatic(es, p, kDrive));
}
BENCHMARK(BM_SmatrixAdiabatic)->Unit(benchmark::kMicrosecond);

void BM_SmatrixFull(benchmark::State& state) {
  auto p = chip();
  p.n_levels = static_cast<int>(state.range(0));
  const auto es = solve_loop(p, kBias, QuasiparticleSector::from_id(0));
  for (auto _ : state) benchmark::DoNotOptimize(smatrix_full(es, p, kDrive));
}
BENCHMARK(BM_SmatrixFull)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMicrosecond);

void BM_SteadyState(benchmark::State& state) {
  auto p = chip();
  p.n_levels = static_cast<int>(state.range(0));
  const auto es = solve_loop(p, kBias, QuasiparticleSector::from_id(0));
  const auto lv = build_liouvillian(compose_device(es, p, kDrive, {1e-3, 0.0, 0.0}), kDrive);
  for (auto _ : state) benchmark::DoNotOptimize(steady_state(lv));
}
BENCHMARK(BM_SteadyState)->Arg(3)->Arg(5)->Arg(7)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
