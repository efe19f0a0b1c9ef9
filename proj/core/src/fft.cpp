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

#include "ovkws/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "ovkws/error.hpp"

namespace ovkws {
namespace {

// The FFTW planner is not thread-safe; plan execution on distinct arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

struct RealFft::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(real);
    fftw_free(spec);
  }
};

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

RealFft::RealFft(std::size_t n) : n_(n), plans_(std::make_unique<Plans>()) {
  if (n < 2 || (n & (n - 1)) != 0) {
    throw ConfigError("FFT size must be a power of two >= 2");
  }
  plans_->real = fftw_alloc_real(n);
  plans_->spec = fftw_alloc_complex(n / 2 + 1);
  std::lock_guard lock(planner_mutex());
  // FFTW_ESTIMATE keeps planning deterministic (no timing measurements).
  plans_->fwd = fftw_plan_dft_r2c_1d(static_cast<int>(n), plans_->real,
                                     plans_->spec, FFTW_ESTIMATE);
  plans_->inv = fftw_plan_dft_c2r_1d(static_cast<int>(n), plans_->spec,
                                     plans_->real, FFTW_ESTIMATE);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in,
                      std::span<std::complex<double>> out) {
  std::copy(in.begin(), in.end(), plans_->real);
  std::fill(plans_->real + in.size(), plans_->real + n_, 0.0);
  fftw_execute(plans_->fwd);
  const auto* spec = reinterpret_cast<const std::complex<double>*>(plans_->spec);
  std::copy(spec, spec + bins(), out.begin());
}

void RealFft::inverse(std::span<const std::complex<double>> in,
                      std::span<double> out) {
  // c2r transforms overwrite their input, so the spectrum is copied in.
  std::copy(in.begin(), in.end(),
            reinterpret_cast<std::complex<double>*>(plans_->spec));
  fftw_execute(plans_->inv);
  std::copy(plans_->real, plans_->real + out.size(), out.begin());
}

}  // namespace ovkws
