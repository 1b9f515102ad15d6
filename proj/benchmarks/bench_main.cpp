// Copyright 2026 The hgens Authors.
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

#include <benchmark/benchmark.h>

#include <vector>

#include "hgens/fusion.hpp"
#include "hgens/kernels.hpp"
#include "hgens/optimizer.hpp"
#include "hgens/pipeline.hpp"
#include "hgens/rng.hpp"
#include "hgens/synth.hpp"
#include "hgens/trainer.hpp"

namespace {

using namespace hgens;

DenseMatrix filled(std::size_t r, std::size_t c, std::uint64_t seed) {
  Rng rng(seed);
  DenseMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < c; ++j) m(i, j) = 2.0 * uniform01(rng) - 1.0;
  }
  return m;
}

void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto a = filled(n, 64, 1), b = filled(64, 64, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n) * 64 * 64);
}
BENCHMARK(BM_Matmul)->Arg(256)->Arg(4096);

void BM_MinmaxAttention(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto theta = filled(n, 4, 3);
  for (auto _ : state) benchmark::DoNotOptimize(minmax_normalize(theta));
}
BENCHMARK(BM_MinmaxAttention)->Arg(256)->Arg(4096);

// One full forward/backward/update on the default synthetic graph.
void BM_TrainingEpoch(benchmark::State& state) {
  TrainConfig c;
  c.hidden_dim = static_cast<std::size_t>(state.range(0));
  const auto g = generate_synthetic(SynthConfig{});
  const Pipeline pipe = make_pipeline(c, g);
  ModelParams params = init_model(c, pipe);
  AdamState adam = adam_init(params);
  std::size_t epoch = 0;
  for (auto _ : state) {
    const auto tape = forward(pipe, params, epoch_seed(c, epoch++));
    const auto grads = backward(pipe, params, tape);
    adam_step(params, grads, adam, {c.lr, c.weight_decay});
  }
}
BENCHMARK(BM_TrainingEpoch)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
