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

#include "ovkws/mel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <numbers>
#include <optional>

#include "ovkws/error.hpp"
#include "ovkws/fft.hpp"

namespace ovkws {

std::size_t num_frames(std::size_t num_samples, const MelOptions& options) {
  if (num_samples < options.window) return 0;
  return 1 + (num_samples - options.window) / options.hop;
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank::MelFilterbank(const MelOptions& options) {
  const std::size_t n = options.num_bins;
  if (n == 0 || !(options.f_max > options.f_min) ||
      options.f_max > options.sample_rate / 2.0) {
    throw ConfigError("invalid mel filterbank range");
  }
  const double mel_lo = hz_to_mel(options.f_min);
  const double mel_hi = hz_to_mel(options.f_max);
  edges_.resize(n + 2);
  for (std::size_t i = 0; i < n + 2; ++i) {
    edges_[i] = mel_to_hz(mel_lo + (mel_hi - mel_lo) * static_cast<double>(i) /
                                       static_cast<double>(n + 1));
  }
  edges_.front() = options.f_min;
  edges_.back() = options.f_max;

  const std::size_t bins = options.fft_size / 2 + 1;
  weights_.assign(n, std::vector<double>(bins, 0.0));
  centers_.resize(n);
  for (std::size_t f = 0; f < n; ++f) {
    const double lo = edges_[f], mid = edges_[f + 1], hi = edges_[f + 2];
    centers_[f] = mid;
    for (std::size_t k = 0; k < bins; ++k) {
      const double hz = static_cast<double>(k) * options.sample_rate /
                        static_cast<double>(options.fft_size);
      double w = 0.0;
      if (hz > lo && hz <= mid) w = (hz - lo) / (mid - lo);
      else if (hz > mid && hz < hi) w = (hi - hz) / (hi - mid);
      weights_[f][k] = w;
    }
  }
}

const MelFilterbank& default_filterbank() {
  static const MelFilterbank bank{MelOptions{}};
  return bank;
}

FeatureMap log_mel(const AudioBuffer& signal, const MelOptions& options) {
  validate(signal);
  if (signal.sample_rate != options.sample_rate) {
    throw DataError("log-mel expects " + std::to_string(options.sample_rate) + " Hz input");
  }
  if (signal.size() < options.window) throw DataError("input shorter than one analysis window");
  if (options.fft_size < options.window) throw ConfigError("FFT size smaller than window");

  const MelOptions defaults{};
  const bool is_default = options.window == defaults.window && options.hop == defaults.hop &&
                          options.fft_size == defaults.fft_size &&
                          options.num_bins == defaults.num_bins &&
                          options.f_min == defaults.f_min && options.f_max == defaults.f_max &&
                          options.sample_rate == defaults.sample_rate;
  std::optional<MelFilterbank> custom;
  if (!is_default) custom.emplace(options);
  const MelFilterbank& bank = is_default ? default_filterbank() : *custom;

  std::vector<double> x = signal.samples;
  if (options.pre_emphasis != 0.0) {
    for (std::size_t i = x.size() - 1; i > 0; --i) x[i] -= options.pre_emphasis * x[i - 1];
  }

  // Periodic Hann window.
  std::vector<double> window(options.window);
  for (std::size_t i = 0; i < options.window; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(options.window));
  }

  FeatureMap out;
  out.channels = 1;
  out.bins = options.num_bins;
  out.frames = num_frames(x.size(), options);
  out.values.resize(out.bins * out.frames);

  RealFft fft(options.fft_size);
  std::vector<double> frame(options.window);
  std::vector<std::complex<double>> spec(fft.bins());
  std::vector<double> power(fft.bins());
  const double log_floor = std::log(options.log_floor);

  for (std::size_t t = 0; t < out.frames; ++t) {
    const double* src = x.data() + t * options.hop;
    for (std::size_t i = 0; i < options.window; ++i) frame[i] = src[i] * window[i];
    fft.forward(frame, spec);
    for (std::size_t k = 0; k < spec.size(); ++k) power[k] = std::norm(spec[k]);
    for (std::size_t b = 0; b < out.bins; ++b) {
      const auto& w = bank.weights(b);
      double e = 0.0;
      for (std::size_t k = 0; k < w.size(); ++k) e += w[k] * power[k];
      out.values[b * out.frames + t] = static_cast<float>(
          e > options.log_floor ? std::log(e) : log_floor);
    }
  }
  return out;
}

FeatureMap stack_channels(const std::vector<FeatureMap>& maps) {
  if (maps.empty()) throw DataError("nothing to stack");
  FeatureMap out;
  out.bins = maps.front().bins;
  out.frames = maps.front().frames;
  for (const auto& m : maps) {
    if (m.bins != out.bins || m.frames != out.frames) throw DataError("shape mismatch");
    out.channels += m.channels;
    out.values.insert(out.values.end(), m.values.begin(), m.values.end());
  }
  return out;
}

FeatureMap stack_mics(const std::array<FeatureMap, 3>& per_mic,
                      const std::vector<Mic>& subset) {
  if (subset.empty()) throw ConfigError("empty microphone subset");
  std::vector<FeatureMap> maps;
  for (Mic m : kAllMics) {
    if (std::find(subset.begin(), subset.end(), m) != subset.end()) {
      maps.push_back(per_mic[static_cast<int>(m)]);
    }
  }
  return stack_channels(maps);
}

namespace {
constexpr char kMagic[4] = {'O', 'V', 'F', 'M'};
}

void write_feature_cache(const std::filesystem::path& path, const FeatureMap& map) {
  if (map.values.size() != map.channels * map.bins * map.frames) {
    throw DataError("feature map size does not match its shape");
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  const std::uint32_t header[3] = {static_cast<std::uint32_t>(map.channels),
                                   static_cast<std::uint32_t>(map.bins),
                                   static_cast<std::uint32_t>(map.frames)};
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(header), sizeof(header));
  out.write(reinterpret_cast<const char*>(map.values.data()),
            static_cast<std::streamsize>(map.values.size() * sizeof(float)));
  if (!out) throw DataError("short write to " + path.string());
}

FeatureMap read_feature_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  char magic[4];
  std::uint32_t header[3];
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  if (!in || std::memcmp(magic, kMagic, 4) != 0) {
    throw DataError("not a feature cache: " + path.string());
  }
  FeatureMap map;
  map.channels = header[0];
  map.bins = header[1];
  map.frames = header[2];
  map.values.resize(map.channels * map.bins * map.frames);
  in.read(reinterpret_cast<char*>(map.values.data()),
          static_cast<std::streamsize>(map.values.size() * sizeof(float)));
  if (!in) throw DataError("truncated feature cache: " + path.string());
  return map;
}

}  // namespace ovkws
