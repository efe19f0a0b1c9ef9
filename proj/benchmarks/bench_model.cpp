// Copyright (c) 2026 The ovkws Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>

#include "ovkws/bcresnet.hpp"
#include "ovkws/ops.hpp"

namespace {

ovkws::Tensor<float> input(std::size_t batch, std::size_t channels) {
  std::mt19937_64 rng(5);
  std::normal_distribution<float> d(0.0f, 1.0f);
  ovkws::Tensor<float> x({batch, channels, 40, 98});
  for (auto& v : x.data) v = d(rng);
  return x;
}

void BM_Forward(benchmark::State& state) {
  ovkws::ModelConfig cfg;
  cfg.tau = static_cast<double>(state.range(0));
  cfg.in_channels = static_cast<std::size_t>(state.range(1));
  ovkws::BcResNet<float> model(cfg, 1);
  const auto x = input(1, cfg.in_channels);
  for (auto _ : state) benchmark::DoNotOptimize(model.infer(x));
}
BENCHMARK(BM_Forward)->Args({1, 1})->Args({3, 1})->Args({3, 2})->Args({3, 3})->Unit(benchmark::kMillisecond);

void BM_TrainStep(benchmark::State& state) {
  ovkws::ModelConfig cfg;
  cfg.tau = 1.0;
  ovkws::BcResNet<float> model(cfg, 1);
  const auto x = input(static_cast<std::size_t>(state.range(0)), 1);
  std::vector<int> labels(x.dim(0), 0);
  for (auto _ : state) {
    ovkws::Graph<float> g(ovkws::Mode::kTrain, 1);
    const auto loss = ovkws::cross_entropy(g, model.forward(g, g.input(x)), labels);
    g.backward(loss);
  }
}
BENCHMARK(BM_TrainStep)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
