/*
Copyright 2026 The reverbkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS-IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "reverbkit/analysis.h"
#include "reverbkit/ism.h"
#include "reverbkit/metrics.h"
#include "reverbkit/mixer.h"
#include "reverbkit/scene.h"
#include "reverbkit/tracer.h"

namespace reverbkit {
namespace {

Scene bench_scene(double absorption) {
  return make_scene({7.5, 4.6, 3.1}, {2.25, 1.84, 1.5}, {4.875, 2.53, 1.2}, {absorption, 0.0});
}

std::vector<double> noise(std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = d(gen);
  return v;
}

void BM_SimulateIsm(benchmark::State& state) {
  const Scene scene = bench_scene(0.3);
  IsmConfig cfg = default_ism_config(scene);
  cfg.max_order = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_ism(scene, cfg));
}
BENCHMARK(BM_SimulateIsm)->Arg(5)->Arg(15)->Arg(30)->Unit(benchmark::kMillisecond);

void BM_TraceRays(benchmark::State& state) {
  Scene scene = bench_scene(0.3);
  for (auto& w : scene.walls) w.scattering = 0.5;
  TracerConfig cfg = default_tracer_config(scene, 1);
  cfg.num_rays = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(trace_rays(scene, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TraceRays)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_Convolve(benchmark::State& state) {
  const auto x = noise(16000, 1);
  const auto h = noise(static_cast<std::size_t>(state.range(0)), 2);
  const auto method = state.range(1) == 0 ? ConvolutionMethod::kDirect : ConvolutionMethod::kFft;
  for (auto _ : state) benchmark::DoNotOptimize(convolve(x, h, method));
}
BENCHMARK(BM_Convolve)
    ->Args({64, 0})
    ->Args({64, 1})
    ->Args({4000, 0})
    ->Args({4000, 1})
    ->Unit(benchmark::kMillisecond);

void BM_SiSdr(benchmark::State& state) {
  const auto r = noise(32000, 3), e = noise(32000, 4);
  for (auto _ : state) benchmark::DoNotOptimize(si_sdr(e, r));
}
BENCHMARK(BM_SiSdr);

void BM_Sdr(benchmark::State& state) {
  const auto r = noise(32000, 5), e = noise(32000, 6);
  for (auto _ : state) benchmark::DoNotOptimize(sdr(e, r));
}
BENCHMARK(BM_Sdr)->Unit(benchmark::kMillisecond);

void BM_EstimateT60(benchmark::State& state) {
  const Scene scene = bench_scene(0.3);
  const ImpulseResponse rir = simulate_ism(scene, default_ism_config(scene));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_t60(rir));
}
BENCHMARK(BM_EstimateT60);

}  // namespace
}  // namespace reverbkit

BENCHMARK_MAIN();
