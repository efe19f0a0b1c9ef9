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

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "ovkws/dsp.hpp"
#include "ovkws/error.hpp"
#include "ovkws/fft.hpp"
#include "ovkws/scene.hpp"

namespace ovkws {

AudioBuffer make_ssn(const std::vector<double>& reference_spectrum,
                     std::size_t length, Rng& rng, int sample_rate) {
  const auto& ref = reference_spectrum;
  if (ref.size() < 2 || !all_finite(ref) ||
      std::any_of(ref.begin(), ref.end(), [](double v) { return v < 0.0; }) ||
      std::all_of(ref.begin(), ref.end(), [](double v) { return v == 0.0; })) {
    throw DataError("degenerate spectrum");
  }
  if (length == 0) throw ConfigError("SSN length must be positive");

  const std::size_t nfft = std::max<std::size_t>(next_pow2(length), 2);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> white(nfft);
  for (auto& v : white) v = normal(rng);

  RealFft fft(nfft);
  std::vector<std::complex<double>> white_spec(fft.bins()), spec(fft.bins());
  fft.forward(white, white_spec);

  // Linear interpolation of a target on the uniform 0..fs/2 grid.
  const double step = (sample_rate / 2.0) / static_cast<double>(ref.size() - 1);
  std::vector<double> shaped(nfft);
  auto shape = [&](const std::vector<double>& target) {
    for (std::size_t k = 0; k < spec.size(); ++k) {
      const double f = static_cast<double>(k) * sample_rate / static_cast<double>(nfft);
      const double pos = std::min(f / step, static_cast<double>(target.size() - 1));
      const auto lo = static_cast<std::size_t>(pos);
      const std::size_t hi = std::min(lo + 1, target.size() - 1);
      const double t = pos - static_cast<double>(lo);
      spec[k] = white_spec[k] * ((1.0 - t) * target[lo] + t * target[hi]);
    }
    fft.inverse(spec, shaped);
    shaped.resize(nfft);
  };

  // The Welch estimate smooths steep slopes, so the shaping target is
  // corrected until the estimate of the output follows the reference.
  const std::size_t welch = 2 * (ref.size() - 1);
  std::vector<double> target = ref;
  shape(target);
  if (length >= 4 * welch) {
    double ref_energy = 0.0;
    for (double v : ref) ref_energy += v * v;
    for (int pass = 0; pass < 4; ++pass) {
      const auto got = long_term_spectrum(
          {AudioBuffer(std::vector<double>(shaped.begin(), shaped.begin() + length), sample_rate)},
          welch);
      double got_energy = 0.0;
      for (double v : got) got_energy += v * v;
      const double norm = std::sqrt(got_energy / ref_energy);
      for (std::size_t k = 0; k < target.size(); ++k) {
        if (ref[k] > 0.0 && got[k] > 0.0) target[k] *= ref[k] * norm / got[k];
      }
      shape(target);
    }
  }
  shaped.resize(length);

  double sum = 0.0;
  for (double v : shaped) sum += v * v;
  if (sum == 0.0) throw DataError("degenerate spectrum");
  const double scale = 0.1 / std::sqrt(sum / static_cast<double>(length));
  for (auto& v : shaped) v *= scale;
  return AudioBuffer(std::move(shaped), sample_rate);
}

std::vector<double> long_term_spectrum(const std::vector<AudioBuffer>& signals,
                                       std::size_t fft_size) {
  RealFft fft(fft_size);
  std::vector<double> window(fft_size);
  for (std::size_t i = 0; i < fft_size; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                     static_cast<double>(fft_size));
  }
  std::vector<double> power(fft.bins(), 0.0);
  std::vector<double> frame(fft_size);
  std::vector<std::complex<double>> spec(fft.bins());
  std::size_t count = 0;
  const std::size_t hop = fft_size / 2;
  for (const auto& s : signals) {
    for (std::size_t start = 0; start + fft_size <= s.size(); start += hop) {
      for (std::size_t i = 0; i < fft_size; ++i) {
        frame[i] = s.samples[start + i] * window[i];
      }
      fft.forward(frame, spec);
      for (std::size_t k = 0; k < spec.size(); ++k) power[k] += std::norm(spec[k]);
      ++count;
    }
  }
  if (count == 0) throw DataError("signals shorter than one analysis frame");
  for (auto& p : power) p = std::sqrt(p / static_cast<double>(count));
  return power;
}

}  // namespace ovkws
