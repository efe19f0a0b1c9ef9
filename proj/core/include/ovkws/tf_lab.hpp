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
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ovkws/audio.hpp"
#include "ovkws/rng.hpp"

namespace ovkws {

// Hearing-aid microphones: in-ear-canal, behind-the-ear front and rear.
enum class Mic : int { kIec = 0, kFront = 1, kRear = 2 };

inline constexpr std::array<Mic, 3> kAllMics = {Mic::kIec, Mic::kFront,
                                               Mic::kRear};
inline constexpr int kNumLoudspeakers = 16;

std::string_view mic_name(Mic m);   // "iec", "front", "rear"
char mic_code(Mic m);               // 'i', 'f', 'r'
Mic parse_mic(std::string_view s);  // accepts either form

// Parses a subset such as "i", "i+f", "ifr" or "iec,front". Result is in
// canonical (iec, front, rear) order without duplicates.
std::vector<Mic> parse_mic_subset(std::string_view s);
std::string mic_subset_name(const std::vector<Mic>& mics);  // e.g. "I+F"

enum class IrKind { kOwnVoice, kHrtf };

struct ImpulseResponse {
  std::vector<double> taps;
  int sample_rate = kSampleRate;
  IrKind kind = IrKind::kOwnVoice;
};

// Per-subject own-voice IRs (mouth -> mic) and HRTFs (loudspeaker -> mic).
// Loudspeakers are numbered 1..16 counter-clockwise from the one facing the
// user (azimuth 0 degrees), 22.5 degrees apart.
struct TransferFunctionSet {
  std::string subject_id;
  std::array<ImpulseResponse, 3> ovtf;
  std::array<std::array<ImpulseResponse, 3>, kNumLoudspeakers> hrtf;

  const ImpulseResponse& own_voice(Mic m) const {
    return ovtf[static_cast<int>(m)];
  }
  // loudspeaker is 1-based. Throws DataError("missing HRTF entry") when the
  // entry is empty or the index is out of range.
  const ImpulseResponse& head_related(int loudspeaker, Mic m) const;

  // Every entry present, finite, with one shared sample rate.
  void validate() const;
};

inline constexpr double loudspeaker_azimuth_deg(int loudspeaker) {
  return (loudspeaker - 1) * 360.0 / kNumLoudspeakers;
}

// ---------------------------------------------------------------------------
// LMS system identification

struct LmsOptions {
  std::size_t taps = 64;
  // Normalized (NLMS) step in (0, 2); for plain LMS the bound is
  // 2 / (taps * input power).
  double step_size = 0.5;
  std::size_t passes = 1;
  bool normalized = true;
};

// Adapts an FIR model of the system mapping input -> output.
// Errors: DataError("insufficient excitation") for zero-energy input,
// DivergenceError("step size too large") when the weights blow up.
ImpulseResponse estimate_ir_lms(const AudioBuffer& input,
                                const AudioBuffer& output,
                                const LmsOptions& options);

// 10*log10(|estimate - truth|^2 / |truth|^2), with the shorter one
// zero-padded.
double ir_error_db(const std::vector<double>& estimate,
                   const std::vector<double>& truth);

// ---------------------------------------------------------------------------
// Exponential sine sweep

struct SweepPair {
  AudioBuffer sweep;
  AudioBuffer inverse_filter;
  double f_start = 0.0;
  double f_end = 0.0;
};

// Exponential sweep f_start -> f_end with 10 ms raised-cosine fades, and a
// regularized inverse filter of the same length: sweep * inverse is a unit
// impulse at lag len(sweep) - 1.
SweepPair generate_exp_sweep(double f_start, double f_end, double duration_s,
                             int sample_rate = kSampleRate);

// Instantaneous frequency of the sweep at time t.
double sweep_frequency(double f_start, double f_end, double duration_s,
                       double t);

struct Deconvolution {
  ImpulseResponse ir;
  bool low_energy = false;
};

// Convolves the recording with the inverse filter and keeps ir_len taps
// starting at the sweep/inverse peak lag (len(inverse) - 1).
Deconvolution deconvolve_sweep(const AudioBuffer& recording,
                               const AudioBuffer& inverse_filter,
                               std::size_t ir_len);

// ---------------------------------------------------------------------------
// Transfer-function perturbation

struct PerturbationParams {
  double sigma_mult = 0.1;
  double sigma_add = 1e-5;
  // Draw gamma/delta per tap; when false one pair is drawn per call and
  // applied to every tap.
  bool per_tap = true;
};

// Each output tap is (1 + gamma) * tap + delta with gamma ~ N(0, sigma_mult)
// and delta ~ N(0, sigma_add) (standard deviations). Zero sigmas return the
// input unchanged and consume no random numbers.
ImpulseResponse perturb_tf(const ImpulseResponse& ir,
                           const PerturbationParams& params, Rng& rng);

// ---------------------------------------------------------------------------
// Persistence: 32-bit float WAV plus a key=value sidecar (<name>.txt).

struct IrMetadata {
  std::string subject_id;
  Mic mic = Mic::kIec;
  int loudspeaker = 0;  // 0 for own-voice IRs
  IrKind kind = IrKind::kOwnVoice;
};

void save_ir(const std::filesystem::path& wav_path, const ImpulseResponse& ir,
             const IrMetadata& meta);
ImpulseResponse load_ir(const std::filesystem::path& wav_path,
                        IrMetadata* meta = nullptr);

// Directory layout: ovtf_<mic>.wav and hrtf_<NN>_<mic>.wav (+ sidecars).
void save_tf_set(const std::filesystem::path& dir,
                 const TransferFunctionSet& tfs);
TransferFunctionSet load_tf_set(const std::filesystem::path& dir);

}  // namespace ovkws
