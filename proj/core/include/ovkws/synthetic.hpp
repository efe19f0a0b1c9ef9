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

#include <cstdint>
#include <string>
#include <vector>

#include "ovkws/dataset.hpp"
#include "ovkws/scene.hpp"
#include "ovkws/tf_lab.hpp"

namespace ovkws {

// Synthetic stand-ins for the measured assets. The IEC path is band-limited
// (own voice and noise alike) and its noise HRTFs are attenuated to mimic
// the occluding seal; the BTE paths are full-band.
struct SyntheticTfOptions {
  std::size_t ir_len = 256;
  double iec_cutoff_hz = 2200.0;
  double iec_noise_attenuation_db = 20.0;
};

TransferFunctionSet synthetic_transfer_functions(
    const std::string& subject_id, std::uint64_t seed,
    const SyntheticTfOptions& options = {});

SubjectPool synthetic_subject_pool(std::uint64_t seed,
                                   const SyntheticTfOptions& options = {});

// The 25 non-keyword speech-commands words.
const std::vector<std::string>& filler_words();

struct SyntheticCorpusOptions {
  std::vector<std::string> words;  // empty: keywords + filler words
  std::array<std::size_t, 3> speakers{12, 3, 3};  // train / val / test
  std::size_t takes = 1;           // utterances per (speaker, word)
  double corrupted_fraction = 0.05;  // items with a raised noise floor
  double duration_s = 1.0;
  int sample_rate = kSampleRate;
};

// Formant-synthesized word utterances. Each word has a fixed spectro-
// temporal template; speakers vary pitch, vocal-tract scale, tempo and
// onset.
std::vector<CleanUtterance> synthetic_corpus(const SyntheticCorpusOptions& options,
                                             std::uint64_t seed);

struct SyntheticBankOptions {
  std::size_t female = 6;
  std::size_t male = 6;
  std::size_t music = 3;
  std::size_t tv = 2;
  double speech_s = 4.0;
  double music_s = 6.0;
  double tv_s = 6.0;
};

// Per-split material; different splits never share a source signal.
NoiseBank synthetic_noise_bank(Split split, std::uint64_t seed,
                               const SyntheticBankOptions& options = {});
NoiseBanks synthetic_noise_banks(std::uint64_t seed,
                                 const SyntheticBankOptions& options = {});

}  // namespace ovkws
