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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ovkws/audio.hpp"
#include "ovkws/rng.hpp"
#include "ovkws/tf_lab.hpp"

namespace ovkws {

// ---------------------------------------------------------------------------
// Class taxonomy: 10 keywords, filler (any other word), ambient noise.

inline constexpr int kNumClasses = 12;
inline constexpr int kFillerClass = 10;
inline constexpr int kAmbientClass = 11;
inline constexpr std::array<std::string_view, 10> kKeywords = {
    "yes", "no", "up", "down", "left", "right", "on", "off", "stop", "go"};

std::string_view class_name(int label);  // keyword, "_filler_" or "_ambient_"
int parse_class_name(std::string_view name);
// Keyword index for the 10 keywords, kAmbientClass for "_background_noise_"
// and kFillerClass for anything else.
int class_of_word(std::string_view word);

// ---------------------------------------------------------------------------
// Noise material and scenarios

enum class NoiseType { kBabble, kMusic, kSsn, kInterferer, kTv };

inline constexpr std::array<NoiseType, 5> kAllNoiseTypes = {
    NoiseType::kBabble, NoiseType::kMusic, NoiseType::kSsn,
    NoiseType::kInterferer, NoiseType::kTv};

std::string_view noise_type_name(NoiseType t);
NoiseType parse_noise_type(std::string_view s);
// Babble, music and SSN occur in training; interferer and TV are test-only.
bool is_seen_noise(NoiseType t);

enum class Sex { kFemale, kMale };

struct NoiseSignal {
  std::string id;
  AudioBuffer audio;
  Sex sex = Sex::kFemale;
};

struct MusicTrack {
  std::string id;
  AudioBuffer left;
  AudioBuffer right;
};

// Noise material for one dataset split. Speech serves babble and interfering
// speakers; the SSN spectrum is a long-term magnitude spectrum sampled at
// uniformly spaced frequencies from 0 to fs/2.
struct NoiseBank {
  std::vector<NoiseSignal> speech;
  std::vector<MusicTrack> music;
  std::vector<NoiseSignal> tv;
  std::vector<double> ssn_spectrum;
  int sample_rate = kSampleRate;
};

struct NoiseSource {
  std::string ref;       // bank id (plus channel) or generated SSN id
  int loudspeaker = 1;   // 1..16
  AudioBuffer segment;   // the cut (or generated) source signal
};

// One noise condition: L = sources.size() point sources around the user.
struct NoiseScenario {
  NoiseType type = NoiseType::kBabble;
  std::vector<NoiseSource> sources;

  std::size_t num_sources() const { return sources.size(); }
  // 1 <= L <= 16, valid loudspeaker indices and the per-type layout.
  void validate() const;
};

struct ScenarioOptions {
  std::size_t segment_length = kSampleRate;  // samples cut per source
  // SSN: independent realization per loudspeaker (default) or one shared.
  bool ssn_independent = true;
};

inline constexpr int kFrontLoudspeaker = 1;  // azimuth 0 degrees

// Draws a scenario of the given type from the bank. Throws
// DataError("insufficient bank material") when the bank cannot supply it.
NoiseScenario compose_scenario(NoiseType type, const NoiseBank& bank, Rng& rng,
                               const ScenarioOptions& options = {});

// Unscaled noise at one mic: sum over sources of g_l^m * v_l, truncated.
AudioBuffer render_noise_at_mic(const NoiseScenario& scenario,
                                const TransferFunctionSet& tfs, Mic mic,
                                std::size_t length);

// ---------------------------------------------------------------------------
// Level calibration and synthesis

// Noise scaling so that ASL(front speech) - level(alpha * noise) equals the
// target. DataError on a silent input.
double compute_alpha(LevelDb speech_level, LevelDb noise_level,
                     double target_snr_db);
double compute_alpha(const AudioBuffer& x_front_clean,
                     const AudioBuffer& noise_front_unscaled,
                     double target_snr_db);

struct MixSpec {
  double target_snr_db = 0.0;
  std::optional<double> alpha_override;
  bool perturb = false;
  PerturbationParams perturbation;
  // Items without own voice (ambient class) are calibrated against this
  // nominal active speech level.
  bool speech_present = true;
  double nominal_asl_db = -26.0;
};

struct SynthesisResult {
  std::array<AudioBuffer, 3> mix;    // y_m
  std::array<AudioBuffer, 3> clean;  // x_m
  std::array<AudioBuffer, 3> noise;  // alpha * rendered noise
  double alpha = 0.0;
  LevelDb speech_level;         // ASL of the clean front signal
  LevelDb noise_level_unscaled; // level of the unscaled front noise

  const AudioBuffer& at(Mic m) const { return mix[static_cast<int>(m)]; }
};

// y_m = h_m * x + alpha * sum_l g_l^m * v_l for every mic, with one alpha
// calibrated at the front mic. With perturbation enabled, every IR used is
// perturbed independently (own-voice IRs first, then HRTFs by source order).
SynthesisResult synthesize_utterance(const AudioBuffer& x,
                                     const TransferFunctionSet& tfs,
                                     const NoiseScenario& scenario,
                                     const MixSpec& spec, Rng& rng);

// ---------------------------------------------------------------------------
// Clean-subset filtering

struct SnrEstimatorOptions {
  double frame_s = 0.03;
  double floor_fraction = 0.1;     // lowest decile of frame energies
  double activity_factor = 10.0;   // active: energy > factor * floor
  double cap_db = 100.0;
};

// Frame-energy SNR estimate. Silence sentinel for an all-zero signal.
LevelDb a_posteriori_snr(const AudioBuffer& signal,
                         const SnrEstimatorOptions& options = {});

// ---------------------------------------------------------------------------
// Speech-shaped noise

// White Gaussian noise shaped in the frequency domain to the reference
// magnitude spectrum (uniform grid 0..fs/2), scaled to -20 dB RMS.
AudioBuffer make_ssn(const std::vector<double>& reference_spectrum,
                     std::size_t length, Rng& rng,
                     int sample_rate = kSampleRate);

// Welch-averaged long-term magnitude spectrum (Hann, 50% overlap),
// fft_size / 2 + 1 points.
std::vector<double> long_term_spectrum(const std::vector<AudioBuffer>& signals,
                                       std::size_t fft_size = 512);

}  // namespace ovkws
