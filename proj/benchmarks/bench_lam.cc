/* Copyright 2026 The LAM Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include <random>

#include <benchmark/benchmark.h>

#include "lam/annotator.h"
#include "lam/sca.h"
#include "lam/trainer.h"

namespace lam {
namespace {

FeatureTensor random_features(int c, int h, int w) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FeatureTensor t(c, h, w);
  for (double& v : t.data()) v = u(rng);
  return t;
}

// args: input channels, classes, side length
void BM_ScaForward(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0)), c = static_cast<int>(state.range(1));
  const int side = static_cast<int>(state.range(2));
  const FeatureTensor f = random_features(n, side, side);
  const ScaParams p = init_sca_params(n, c, 1);
  for (auto _ : state) benchmark::DoNotOptimize(sca_forward(f, p));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_ScaForward)->Args({256, 19, 128})->Args({256, 19, 512})->Unit(benchmark::kMillisecond);

// args: classes, layers, side length, guidance mode
void BM_CascadeApply(benchmark::State& state) {
  const int c = static_cast<int>(state.range(0)), k = static_cast<int>(state.range(1));
  const int side = static_cast<int>(state.range(2));
  const auto mode = static_cast<GuidanceMode>(state.range(3));
  const FeatureTensor f = random_features(c, side, side);
  const OptouParams p = OptouParams::uniform(k, 1.0, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(cascade_apply(f, p, nullptr, mode));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_CascadeApply)
    ->Args({19, 10, 512, static_cast<int>(GuidanceMode::kSelf)})
    ->Args({19, 10, 512, static_cast<int>(GuidanceMode::kScaleOnly)})
    ->Unit(benchmark::kMillisecond);

void BM_CascadeForwardTraced(benchmark::State& state) {
  const FeatureTensor f = random_features(19, 128, 128);
  const OptouParams p = OptouParams::uniform(10, 1.0, 0.1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(cascade_forward(f, p, nullptr, GuidanceMode::kSelf));
  }
  state.SetItemsProcessed(state.iterations() * 128 * 128);
}
BENCHMARK(BM_CascadeForwardTraced)->Unit(benchmark::kMillisecond);

void BM_AnnotateFrame(benchmark::State& state) {
  const FeatureTensor f = random_features(256, 512, 512);
  const LamModel m = init_model(256, 19, TrainConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(annotate(f, m, GuidanceMode::kSelf));
}
BENCHMARK(BM_AnnotateFrame)->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const FeatureTensor f = random_features(16, side, side);
  LabelMap gt(side, side);
  for (std::size_t i = 0; i < gt.pixel_count(); ++i) gt[i] = static_cast<std::uint16_t>(i % 12);
  const LamModel m = init_model(16, 12, TrainConfig{});
  for (auto _ : state) benchmark::DoNotOptimize(loss_and_gradient(m, f, gt));
}
BENCHMARK(BM_TrainStep)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace lam

BENCHMARK_MAIN();
