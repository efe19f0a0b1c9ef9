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
#include <vector>

#include "ovkws/dsp.hpp"
#include "ovkws/mel.hpp"

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 0.1);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

void BM_ConvolveDirect(benchmark::State& state) {
  const auto a = noise(16000, 1), b = noise(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(ovkws::convolve_direct(a, b, a.size()));
}
BENCHMARK(BM_ConvolveDirect)->Arg(64)->Arg(256)->Arg(1024);

void BM_ConvolveOverlapAdd(benchmark::State& state) {
  const auto a = noise(16000, 1), b = noise(static_cast<std::size_t>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(ovkws::convolve_overlap_add(a, b, a.size()));
}
BENCHMARK(BM_ConvolveOverlapAdd)->Arg(64)->Arg(256)->Arg(1024);

void BM_LogMel(benchmark::State& state) {
  const ovkws::AudioBuffer x(noise(16000, 3));
  for (auto _ : state) benchmark::DoNotOptimize(ovkws::log_mel(x));
}
BENCHMARK(BM_LogMel);

void BM_ActiveSpeechLevel(benchmark::State& state) {
  const ovkws::AudioBuffer x(noise(16000, 4));
  for (auto _ : state) benchmark::DoNotOptimize(ovkws::active_speech_level(x));
}
BENCHMARK(BM_ActiveSpeechLevel);

}  // namespace
