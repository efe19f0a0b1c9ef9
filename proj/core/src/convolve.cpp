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

#include "ovkws/dsp.hpp"
#include "ovkws/error.hpp"
#include "ovkws/fft.hpp"

namespace ovkws {
namespace {

void check_operands(std::span<const double> a, std::span<const double> b,
                    std::size_t out_len) {
  if (a.empty() || b.empty()) throw DataError("empty operand");
  if (!all_finite(a) || !all_finite(b)) throw DataError("non-finite input");
  if (out_len > a.size() + b.size() - 1) {
    throw ConfigError("out_len exceeds the full convolution length");
  }
}

}  // namespace

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(),
                     [](double v) { return std::isfinite(v); });
}

void validate(const AudioBuffer& buffer) {
  if (buffer.sample_rate <= 0) throw DataError("sample rate must be positive");
  if (!all_finite(buffer.samples)) throw DataError("non-finite input");
}

std::vector<double> convolve_direct(std::span<const double> a,
                                    std::span<const double> b,
                                    std::size_t out_len) {
  check_operands(a, b, out_len);
  std::vector<double> y(out_len, 0.0);
  for (std::size_t i = 0; i < a.size() && i < out_len; ++i) {
    const double ai = a[i];
    const std::size_t jmax = std::min(b.size(), out_len - i);
    for (std::size_t j = 0; j < jmax; ++j) y[i + j] += ai * b[j];
  }
  return y;
}

std::vector<double> convolve_overlap_add(std::span<const double> a,
                                         std::span<const double> b,
                                         std::size_t out_len) {
  check_operands(a, b, out_len);
  // Blocks are cut from the longer operand and filtered by the shorter one.
  std::span<const double> x = a.size() >= b.size() ? a : b;
  std::span<const double> h = a.size() >= b.size() ? b : a;

  const std::size_t m = h.size();
  const std::size_t nfft = std::max<std::size_t>(next_pow2(2 * m), 64);
  const std::size_t block = nfft - m + 1;

  RealFft fft(nfft);
  std::vector<std::complex<double>> hspec(fft.bins());
  fft.forward(h, hspec);

  std::vector<std::complex<double>> xspec(fft.bins());
  std::vector<double> chunk(nfft);
  std::vector<double> y(out_len, 0.0);
  const double scale = 1.0 / static_cast<double>(nfft);

  for (std::size_t start = 0; start < x.size() && start < out_len;
       start += block) {
    const std::size_t len = std::min(block, x.size() - start);
    fft.forward(x.subspan(start, len), xspec);
    for (std::size_t k = 0; k < xspec.size(); ++k) xspec[k] *= hspec[k];
    fft.inverse(xspec, chunk);
    const std::size_t valid = std::min(len + m - 1, out_len - start);
    for (std::size_t i = 0; i < valid; ++i) y[start + i] += chunk[i] * scale;
  }
  return y;
}

std::vector<double> convolve(std::span<const double> a,
                             std::span<const double> b, std::size_t out_len) {
  const std::size_t shorter = std::min(a.size(), b.size());
  if (shorter <= 32) return convolve_direct(a, b, out_len);
  return convolve_overlap_add(a, b, out_len);
}

std::vector<double> convolve_full(std::span<const double> a,
                                  std::span<const double> b) {
  if (a.empty() || b.empty()) throw DataError("empty operand");
  return convolve(a, b, a.size() + b.size() - 1);
}

AudioBuffer convolve(const AudioBuffer& signal, std::span<const double> ir,
                     std::size_t out_len) {
  return AudioBuffer(convolve(signal.view(), ir, out_len), signal.sample_rate);
}

}  // namespace ovkws
