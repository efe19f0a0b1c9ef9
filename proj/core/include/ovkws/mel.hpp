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

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

#include "ovkws/audio.hpp"
#include "ovkws/tf_lab.hpp"

namespace ovkws {

struct MelOptions {
  int sample_rate = kSampleRate;
  std::size_t window = 480;  // 30 ms
  std::size_t hop = 160;     // 10 ms
  std::size_t fft_size = 512;
  std::size_t num_bins = 40;
  double f_min = 0.0;
  double f_max = 8000.0;
  double log_floor = 1e-10;
  double pre_emphasis = 0.0;  // 0 disables
};

// Channel-major feature tensor: values[(c * bins + b) * frames + t].
struct FeatureMap {
  std::size_t channels = 0;
  std::size_t bins = 0;
  std::size_t frames = 0;
  std::vector<float> values;

  float at(std::size_t c, std::size_t b, std::size_t t) const {
    return values[(c * bins + b) * frames + t];
  }
  float& at(std::size_t c, std::size_t b, std::size_t t) {
    return values[(c * bins + b) * frames + t];
  }
};

std::size_t num_frames(std::size_t num_samples, const MelOptions& options = {});

double hz_to_mel(double hz);
double mel_to_hz(double mel);

// Triangular filters on the HTK mel scale, edges equally spaced in mel from
// f_min to f_max; weights are evaluated at the FFT bin frequencies.
class MelFilterbank {
 public:
  explicit MelFilterbank(const MelOptions& options = {});

  std::size_t num_filters() const { return weights_.size(); }
  const std::vector<double>& weights(std::size_t filter) const { return weights_[filter]; }
  double center_hz(std::size_t filter) const { return centers_[filter]; }
  double lower_edge_hz(std::size_t filter) const { return edges_[filter]; }
  double upper_edge_hz(std::size_t filter) const { return edges_[filter + 2]; }

 private:
  std::vector<std::vector<double>> weights_;  // [filter][fft bin]
  std::vector<double> centers_;
  std::vector<double> edges_;
};

// Default-configured filterbank, built once.
const MelFilterbank& default_filterbank();

// Log power mel energies: Hann window, |FFT|^2, mel filters, natural log
// with a floor. Throws DataError for inputs shorter than one window.
FeatureMap log_mel(const AudioBuffer& signal, const MelOptions& options = {});

// Concatenates single- or multi-channel maps along the channel axis, in the
// given order. Throws DataError("shape mismatch") on differing bins/frames.
FeatureMap stack_channels(const std::vector<FeatureMap>& maps);

// Extracts features for each mic and stacks the requested subset in
// canonical (iec, front, rear) order.
FeatureMap stack_mics(const std::array<FeatureMap, 3>& per_mic,
                      const std::vector<Mic>& subset);

// Feature cache: 16-byte header (magic "OVFM", uint32 channels, bins,
// frames) followed by little-endian float32 values.
void write_feature_cache(const std::filesystem::path& path, const FeatureMap& map);
FeatureMap read_feature_cache(const std::filesystem::path& path);

}  // namespace ovkws
