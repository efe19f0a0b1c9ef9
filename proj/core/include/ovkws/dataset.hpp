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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ovkws/audio.hpp"
#include "ovkws/scene.hpp"
#include "ovkws/tf_lab.hpp"
#include "ovkws/wav.hpp"

namespace ovkws {

enum class Split { kTrain = 0, kVal = 1, kTest = 2 };

std::string_view split_name(Split s);  // "train", "val", "test"
Split parse_split(std::string_view s);

// A clean mouth-reference utterance. Audio is either held in memory
// (synthetic corpora) or read from `path` on demand.
struct CleanUtterance {
  std::string id;
  std::string word;
  int label = 0;
  std::string speaker;
  Split split = Split::kTrain;
  std::filesystem::path path;
  std::optional<AudioBuffer> audio;

  AudioBuffer load() const;
};

// Speech-commands style directory: <word>/<speaker>_nohash_<n>.wav, with
// optional validation_list.txt / testing_list.txt. Without the lists, the
// split is derived from a hash of the speaker id (80/10/10).
std::vector<CleanUtterance> load_speech_commands(const std::filesystem::path& dir);

// Noise bank directory: female/*.wav, male/*.wav, music/<id>_L.wav +
// <id>_R.wav, tv/*.wav. The SSN spectrum is estimated from the speech.
NoiseBank load_noise_bank(const std::filesystem::path& dir);

// Transfer-function subjects per split: 3 train, 1 val, 1 test.
struct SubjectPool {
  std::vector<TransferFunctionSet> train;
  TransferFunctionSet val;
  TransferFunctionSet test;

  void validate() const;
};

struct NoiseBanks {
  std::array<NoiseBank, 3> by_split;  // indexed by Split
  const NoiseBank& at(Split s) const { return by_split[static_cast<int>(s)]; }
};

struct DatasetConfig {
  std::uint64_t seed = 1;
  std::vector<double> train_snrs{-15, -5, 5, 15, 25};
  std::vector<double> val_snrs{-15, -5, 5, 15, 25};
  std::vector<double> test_snrs{-18, -9, 0, 9, 18};
  std::vector<NoiseType> train_noises{NoiseType::kBabble, NoiseType::kMusic,
                                      NoiseType::kSsn};
  std::vector<NoiseType> val_noises{NoiseType::kBabble, NoiseType::kMusic,
                                    NoiseType::kSsn};
  std::vector<NoiseType> test_noises{NoiseType::kBabble, NoiseType::kMusic,
                                     NoiseType::kSsn, NoiseType::kInterferer,
                                     NoiseType::kTv};
  double clean_snr_threshold_db = 40.0;
  SnrEstimatorOptions snr_estimator;
  // Per-split cap on base utterances after balancing (0 = no cap).
  std::array<std::size_t, 3> max_utterances{0, 0, 0};
  // Subsample the filler class and size the ambient class to the mean
  // keyword-class count.
  bool balance_classes = true;
  // Add ambient-noise items (no own voice), as many as the mean keyword
  // class count.
  bool include_ambient = true;
  std::size_t utterance_samples = kSampleRate;  // clean items padded/trimmed
  PerturbationParams perturbation;
  bool ssn_independent = true;
  double nominal_asl_db = -26.0;
  WavFormat wav_format = WavFormat::kFloat32;
  std::size_t threads = 1;

  const std::vector<double>& snrs(Split s) const;
  const std::vector<NoiseType>& noises(Split s) const;
  void validate() const;
};

// One rendered multi-microphone item.
struct UtteranceRecord {
  std::string utt_id;
  int label = 0;
  std::string word;
  std::string source;       // clean utterance id, empty for ambient items
  std::string speaker;
  std::string subject;
  Split split = Split::kTrain;
  int partition = 0;
  NoiseType noise = NoiseType::kBabble;
  double snr_db = 0.0;
  double alpha = 0.0;
  std::uint64_t seed = 0;
  std::array<std::string, 3> paths;  // relative to the dataset root, by Mic

  const std::string& path(Mic m) const { return paths[static_cast<int>(m)]; }
};

using Manifest = std::vector<UtteranceRecord>;

// Line-delimited JSON, one record per line, fixed field order.
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);
Manifest read_manifest(const std::filesystem::path& path);
std::string manifest_line(const UtteranceRecord& record);

// Stream seed for one rendered item; independent of scheduling.
std::uint64_t record_seed(std::uint64_t global_seed, const std::string& utt_id,
                          double snr_db, int partition);

// Drops utterances whose a posteriori SNR does not exceed the threshold.
std::vector<CleanUtterance> filter_clean(const std::vector<CleanUtterance>& corpus,
                                         double threshold_db,
                                         const SnrEstimatorOptions& options = {},
                                         std::size_t threads = 1);

// Plans the records (no rendering): balancing, partitioning, subject
// assignment and SNR copies. The corpus must already be filtered.
Manifest plan_dataset(const DatasetConfig& config,
                      const std::vector<CleanUtterance>& corpus,
                      const SubjectPool& subjects);

// Renders one planned record. Deterministic given the record.
SynthesisResult render_record(const UtteranceRecord& record,
                              const DatasetConfig& config,
                              const CleanUtterance* clean,
                              const SubjectPool& subjects,
                              const NoiseBanks& banks);

// Filters, plans, renders and writes out_dir/<set>/<partition>/<snr>/
// <utt_id>_<mic>.wav plus out_dir/manifest.txt.
Manifest build_dataset(const DatasetConfig& config,
                       const std::vector<CleanUtterance>& corpus,
                       const SubjectPool& subjects, const NoiseBanks& banks,
                       const std::filesystem::path& out_dir);

// Runs fn(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace ovkws
