// Copyright 2026 The perchsim Authors
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

// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "perchsim/experiments.hpp"

using namespace perch;

namespace {

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::Serial : Exec::Parallel;
}

void BM_PerchingMC(benchmark::State& state) {
  const ParameterSet ps = ParameterSet::defaults();
  PerchingConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_perching_mc(ps, cfg, 1, exec_of(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_PerchingMC)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CommandFuzz(benchmark::State& state) {
  const ParameterSet ps = ParameterSet::defaults();
  FuzzConfig cfg;
  cfg.commands = 50'000;
  cfg.streams = 16;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_command_fuzz(ps, cfg, 1, exec_of(state)));
  }
  state.SetItemsProcessed(state.iterations() * cfg.commands);
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_CommandFuzz)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_DrillingStudy(benchmark::State& state) {
  const ParameterSet ps = ParameterSet::defaults();
  DrillingConfig cfg;
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_drilling_study(ps, cfg, 1, exec_of(state)));
  }
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}
BENCHMARK(BM_DrillingStudy)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
