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

#include "ovkws/tf_lab.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>

#include "ovkws/dsp.hpp"
#include "ovkws/error.hpp"
#include "ovkws/fft.hpp"

namespace ovkws {

std::string_view mic_name(Mic m) {
  switch (m) {
    case Mic::kIec: return "iec";
    case Mic::kFront: return "front";
    case Mic::kRear: return "rear";
  }
  return "?";
}

char mic_code(Mic m) { return mic_name(m)[0]; }

Mic parse_mic(std::string_view s) {
  std::string lower(s);
  for (auto& c : lower) c = static_cast<char>(std::tolower(c));
  if (lower == "i" || lower == "iec") return Mic::kIec;
  if (lower == "f" || lower == "front") return Mic::kFront;
  if (lower == "r" || lower == "rear") return Mic::kRear;
  throw ConfigError("unknown microphone '" + std::string(s) + "'");
}

std::vector<Mic> parse_mic_subset(std::string_view s) {
  std::array<bool, 3> used{};
  const bool letters_only =
      !s.empty() && s.find_first_not_of("ifrIFR") == std::string_view::npos;
  if (letters_only) {
    for (char c : s) used[static_cast<int>(parse_mic(std::string_view(&c, 1)))] = true;
  } else {
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t end = std::min(s.find_first_of("+, ", start), s.size());
      if (end > start) used[static_cast<int>(parse_mic(s.substr(start, end - start)))] = true;
      start = end + 1;
    }
  }
  std::vector<Mic> out;
  for (Mic m : kAllMics) {
    if (used[static_cast<int>(m)]) out.push_back(m);
  }
  if (out.empty()) throw ConfigError("microphone subset must be non-empty");
  return out;
}

std::string mic_subset_name(const std::vector<Mic>& mics) {
  if (mics.size() == 1) {
    switch (mics[0]) {
      case Mic::kIec: return "IEC";
      case Mic::kFront: return "Front";
      case Mic::kRear: return "Rear";
    }
  }
  std::string out;
  for (Mic m : mics) {
    if (!out.empty()) out += '+';
    out += static_cast<char>(std::toupper(mic_code(m)));
  }
  return out;
}

const ImpulseResponse& TransferFunctionSet::head_related(int loudspeaker,
                                                         Mic m) const {
  if (loudspeaker < 1 || loudspeaker > kNumLoudspeakers) {
    throw DataError("missing HRTF entry: loudspeaker " +
                    std::to_string(loudspeaker));
  }
  const auto& ir = hrtf[loudspeaker - 1][static_cast<int>(m)];
  if (ir.taps.empty()) {
    throw DataError("missing HRTF entry: loudspeaker " +
                    std::to_string(loudspeaker) + ", mic " +
                    std::string(mic_name(m)));
  }
  return ir;
}

void TransferFunctionSet::validate() const {
  const int rate = ovtf[0].sample_rate;
  auto check = [&](const ImpulseResponse& ir, const std::string& what) {
    if (ir.taps.empty()) throw DataError("missing " + what);
    if (!all_finite(ir.taps)) throw DataError("non-finite taps in " + what);
    if (ir.sample_rate != rate) {
      throw DataError("sample rate mismatch in " + what);
    }
  };
  for (Mic m : kAllMics) {
    check(own_voice(m), "own-voice IR for mic " + std::string(mic_name(m)));
  }
  for (int l = 1; l <= kNumLoudspeakers; ++l) {
    for (Mic m : kAllMics) {
      check(hrtf[l - 1][static_cast<int>(m)],
            "HRTF entry for loudspeaker " + std::to_string(l) + ", mic " +
                std::string(mic_name(m)));
    }
  }
}

// ---------------------------------------------------------------------------

ImpulseResponse estimate_ir_lms(const AudioBuffer& input,
                                const AudioBuffer& output,
                                const LmsOptions& options) {
  validate(input);
  validate(output);
  if (input.size() != output.size()) {
    throw ConfigError("input and output lengths differ");
  }
  if (input.sample_rate != output.sample_rate) {
    throw ConfigError("input and output sample rates differ");
  }
  if (options.taps == 0 || options.passes == 0) {
    throw ConfigError("taps and passes must be positive");
  }
  const auto& x = input.samples;
  const auto& d = output.samples;
  const std::size_t n = x.size();
  const std::size_t taps = options.taps;

  const double energy = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
  if (energy == 0.0) throw DataError("insufficient excitation");
  const double power = energy / static_cast<double>(n);

  const double mu = options.step_size;
  if (mu <= 0.0) throw ConfigError("step size must be positive");
  if (options.normalized && mu >= 2.0) throw ConfigError("NLMS step must be < 2");

  // Small regularizer keeps the normalization finite at the very start,
  // when the regressor holds only a few nonzero samples.
  const double eps = 1e-6 * power * static_cast<double>(taps);

  std::vector<double> w(taps, 0.0);
  for (std::size_t pass = 0; pass < options.passes; ++pass) {
    // Running |regressor|^2 over the sliding window x[k-taps+1 .. k].
    double reg_energy = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      reg_energy += x[k] * x[k];
      if (k >= taps) reg_energy -= x[k - taps] * x[k - taps];
      if (reg_energy < 0.0) reg_energy = 0.0;

      const std::size_t span = std::min(taps, k + 1);
      double y = 0.0;
      for (std::size_t j = 0; j < span; ++j) y += w[j] * x[k - j];
      const double e = d[k] - y;
      const double g = options.normalized ? mu * e / (eps + reg_energy) : mu * e;
      for (std::size_t j = 0; j < span; ++j) w[j] += g * x[k - j];
    }
    double norm = 0.0;
    for (double v : w) norm += v * v;
    if (!std::isfinite(norm) || norm > 1e12) {
      throw DivergenceError("step size too large");
    }
  }
  return ImpulseResponse{std::move(w), input.sample_rate, IrKind::kOwnVoice};
}

double ir_error_db(const std::vector<double>& estimate,
                   const std::vector<double>& truth) {
  const std::size_t n = std::max(estimate.size(), truth.size());
  double err = 0.0, ref = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = i < estimate.size() ? estimate[i] : 0.0;
    const double t = i < truth.size() ? truth[i] : 0.0;
    err += (e - t) * (e - t);
    ref += t * t;
  }
  if (ref == 0.0) throw DataError("reference IR has zero energy");
  if (err == 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(err / ref);
}

// ---------------------------------------------------------------------------

double sweep_frequency(double f_start, double f_end, double duration_s,
                       double t) {
  return f_start * std::exp(t / duration_s * std::log(f_end / f_start));
}

SweepPair generate_exp_sweep(double f_start, double f_end, double duration_s,
                             int sample_rate) {
  if (!(f_start > 0.0) || !(f_start < f_end) ||
      f_end > sample_rate / 2.0) {
    throw ConfigError("invalid sweep frequencies: need 0 < f_start < f_end <= fs/2");
  }
  if (!(duration_s > 0.0)) throw ConfigError("sweep duration must be positive");

  const auto n = static_cast<std::size_t>(std::llround(duration_s * sample_rate));
  const double rate = std::log(f_end / f_start);
  const double k = 2.0 * std::numbers::pi * f_start * duration_s / rate;

  std::vector<double> sweep(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / sample_rate;
    sweep[i] = std::sin(k * (std::exp(t * rate / duration_s) - 1.0));
  }
  const std::size_t fade =
      std::min<std::size_t>(n / 4, static_cast<std::size_t>(0.01 * sample_rate));
  for (std::size_t i = 0; i < fade; ++i) {
    const double w =
        0.5 - 0.5 * std::cos(std::numbers::pi * static_cast<double>(i) / fade);
    sweep[i] *= w;
    sweep[n - 1 - i] *= w;
  }

  // Regularized spectral inverse delayed by n - 1 samples: the reciprocal
  // of the sweep spectrum wherever the sweep carries energy. In time it is
  // the reversed sweep with a 6 dB/octave tilt.
  const std::size_t nfft = next_pow2(4 * n);
  RealFft fft(nfft);
  std::vector<std::complex<double>> spec(fft.bins());
  fft.forward(sweep, spec);
  double peak = 0.0;
  for (const auto& v : spec) peak = std::max(peak, std::norm(v));
  const double eps = 1e-8 * peak;
  const double delay = static_cast<double>(n - 1);
  for (std::size_t b = 0; b < spec.size(); ++b) {
    const double phase = -2.0 * std::numbers::pi * static_cast<double>(b) * delay / nfft;
    spec[b] = std::conj(spec[b]) / (std::norm(spec[b]) + eps) *
              std::polar(1.0, phase) / static_cast<double>(nfft);
  }
  std::vector<double> full(nfft);
  fft.inverse(spec, full);
  std::vector<double> inverse(full.begin(), full.begin() + static_cast<std::ptrdiff_t>(n));

  return SweepPair{AudioBuffer(std::move(sweep), sample_rate),
                   AudioBuffer(std::move(inverse), sample_rate), f_start,
                   f_end};
}

Deconvolution deconvolve_sweep(const AudioBuffer& recording,
                               const AudioBuffer& inverse_filter,
                               std::size_t ir_len) {
  validate(recording);
  validate(inverse_filter);
  if (recording.sample_rate != inverse_filter.sample_rate) {
    throw ConfigError("recording and inverse filter sample rates differ");
  }
  if (recording.empty() || inverse_filter.empty()) {
    throw DataError("empty operand");
  }
  const std::size_t lag = inverse_filter.size() - 1;
  const std::size_t full = recording.size() + inverse_filter.size() - 1;
  if (ir_len == 0 || lag + ir_len > full) {
    throw ConfigError("ir_len larger than deconvolved support");
  }

  Deconvolution out;
  out.ir.sample_rate = recording.sample_rate;
  out.ir.kind = IrKind::kHrtf;

  const LevelDb level = rms_level_db(recording.view());
  if (level.is_silence() || level.value() < -120.0) {
    out.low_energy = true;
    out.ir.taps.assign(ir_len, 0.0);
    if (level.is_silence()) return out;
  }
  const auto y = convolve(recording.view(), inverse_filter.view(), lag + ir_len);
  out.ir.taps.assign(y.begin() + static_cast<std::ptrdiff_t>(lag), y.end());
  return out;
}

// ---------------------------------------------------------------------------

ImpulseResponse perturb_tf(const ImpulseResponse& ir,
                           const PerturbationParams& params, Rng& rng) {
  if (params.sigma_mult < 0.0 || params.sigma_add < 0.0) {
    throw ConfigError("perturbation sigmas must be non-negative");
  }
  ImpulseResponse out = ir;
  const bool mult = params.sigma_mult > 0.0;
  const bool add = params.sigma_add > 0.0;
  if (!mult && !add) return out;

  std::normal_distribution<double> gamma(0.0, mult ? params.sigma_mult : 1.0);
  std::normal_distribution<double> delta(0.0, add ? params.sigma_add : 1.0);
  auto draw = [&](double& g, double& d) {
    g = mult ? gamma(rng) : 0.0;
    d = add ? delta(rng) : 0.0;
  };

  double g = 0.0, d = 0.0;
  if (!params.per_tap) draw(g, d);
  for (auto& tap : out.taps) {
    if (params.per_tap) draw(g, d);
    tap = (1.0 + g) * tap + d;
  }
  return out;
}

}  // namespace ovkws
