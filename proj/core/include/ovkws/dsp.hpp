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

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ovkws/audio.hpp"

namespace ovkws {

// First out_len samples of the full linear convolution a * b.
// Dispatches to the direct sum for short operands and to overlap-add
// otherwise. Throws DataError("empty operand") / DataError("non-finite
// input"), and ConfigError when out_len exceeds the full length.
std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b, std::size_t out_len);

AudioBuffer convolve(const AudioBuffer& signal, std::span<const double> ir,
                     std::size_t out_len);

// Full-length convolution, len(a) + len(b) - 1 samples.
std::vector<double> convolve_full(std::span<const double> a,
                                  std::span<const double> b);

// Explicit methods, exposed for testing and benchmarking. Same contract as
// convolve().
std::vector<double> convolve_direct(std::span<const double> a,
                                    std::span<const double> b,
                                    std::size_t out_len);
std::vector<double> convolve_overlap_add(std::span<const double> a,
                                         std::span<const double> b,
                                         std::size_t out_len);

// 10*log10(mean square). All-zero input yields LevelDb::silence().
LevelDb rms_level_db(std::span<const double> x);
inline LevelDb rms_level_db(const AudioBuffer& x) { return rms_level_db(x.view()); }

// ITU-T P.56 method B active speech level.
struct P56Options {
  double envelope_time_constant_s = 0.03;
  double hangover_s = 0.2;
  double margin_db = 15.9;
  int num_thresholds = 40;  // thresholds 2^-(n-1) .. 2^0
};

LevelDb active_speech_level(const AudioBuffer& signal,
                            const P56Options& options = {});

}  // namespace ovkws
