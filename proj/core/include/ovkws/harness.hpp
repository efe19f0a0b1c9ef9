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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ovkws/bcresnet.hpp"
#include "ovkws/dataset.hpp"
#include "ovkws/mel.hpp"
#include "ovkws/stats.hpp"

namespace ovkws {

// One labelled model input.
struct Example {
  FeatureMap features;
  int label = 0;
  double snr_db = 0.0;
  NoiseType noise = NoiseType::kBabble;
  std::string utt_id;
};

using ExampleSet = std::vector<Example>;

// Log-mel per selected mic, stacked in (iec, front, rear) order.
FeatureMap mic_features(const std::array<AudioBuffer, 3>& signals, const std::vector<Mic>& mics,
                        const MelOptions& options = {});

// Reads the rendered waveforms of every record under `root` and extracts
// features. With a cache directory, feature files are reused when present.
ExampleSet load_examples(const Manifest& manifest, const std::filesystem::path& root,
                         const std::vector<Mic>& mics, std::size_t threads = 1,
                         const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

// Packs examples [first, first + count) of `order` into an (N, C, bins, T)
// tensor; all examples must share one shape.
Tensor<float> make_batch(const ExampleSet& examples, const std::vector<std::size_t>& order,
                         std::size_t first, std::size_t count);

struct TrainConfig {
  std::size_t epochs = 200;
  std::size_t batch_size = 100;
  std::size_t warmup_epochs = 5;
  double peak_lr = 0.1;
  double momentum = 0.9;
  double weight_decay = 1e-3;
  std::uint64_t seed = 1;
  std::vector<Mic> mics{Mic::kIec};
  double tau = 3.0;
  std::size_t num_classes = 12;
  double dropout = 0.1;
  // Serial batch assembly and a fixed reduction order. Every code path in
  // this trainer already satisfies that, so the flag is informational.
  bool deterministic = true;
  // Where final.ckpt, best.ckpt and train_log.jsonl go; empty = nowhere.
  std::filesystem::path out_dir;

  void validate() const;
  ModelConfig model_config() const;
};

struct StepLog {
  std::size_t step = 0;
  double epoch = 0.0;  // fractional epoch at which lr was evaluated
  double lr = 0.0;
  double loss = 0.0;
};

struct EpochLog {
  std::size_t epoch = 0;
  std::size_t step = 0;  // steps completed so far
  double lr = 0.0;       // lr of the last step
  double loss = 0.0;     // mean training loss over the epoch
  std::optional<double> val_acc;
};

struct TrainResult {
  BcResNet<float> final_model;
  BcResNet<float> best_model;
  std::size_t best_epoch = 0;
  std::optional<double> best_val_acc;
  std::vector<EpochLog> epochs;
  std::vector<StepLog> steps;
};

// Mini-batch SGD with the warm-up plus cosine schedule evaluated at every
// step's fractional epoch. The best model is picked by validation accuracy
// averaged over the validation SNRs; without a validation set it is the
// final model. Throws DataError when a class is missing from the training
// set and DivergenceError on a non-finite loss.
TrainResult train(const TrainConfig& config, const ExampleSet& train_set,
                  const ExampleSet* val_set = nullptr, std::ostream* log = nullptr);

std::string epoch_log_line(const EpochLog& entry);

// Argmax labels; eval mode, batches processed in order.
std::vector<int> predict(BcResNet<float>& model, const ExampleSet& examples,
                         std::size_t batch_size = 100);

// Mean over SNR values of per-SNR accuracy (percent).
double snr_averaged_accuracy(const std::vector<int>& predictions, const ExampleSet& examples);

enum class NoiseGroup { kSeen = 0, kUnseen = 1 };

struct EvalCell {
  std::size_t correct = 0;
  std::size_t total = 0;
  // Percent; absent when the cell holds no items.
  std::optional<double> accuracy() const;
};

struct EvalReport {
  std::vector<double> snrs;
  std::map<double, std::array<EvalCell, 2>> cells;  // by SNR, then group
  EvalCell overall;

  const EvalCell& cell(double snr, NoiseGroup group) const;
};

// Top-1 accuracy per (SNR, seen/unseen) cell. Every grid SNR gets a row;
// items at other SNRs are counted only in the overall figure.
EvalReport evaluate(const std::vector<int>& predictions, const ExampleSet& examples,
                    const std::vector<double>& snr_grid);
EvalReport evaluate(BcResNet<float>& model, const ExampleSet& examples,
                    const std::vector<double>& snr_grid);

struct CellSummary {
  std::vector<double> per_seed;  // only seeds where the cell is present
  std::optional<double> mean;    // at least one seed
  std::optional<ConfidenceInterval> ci;  // at least two seeds
};

// Per-seed reports folded into mean and 95% interval per cell.
struct SeedReport {
  std::string label;  // e.g. "I+F"
  std::vector<double> snrs;
  std::map<double, std::array<CellSummary, 2>> cells;
  CellSummary overall;
  std::optional<double> rtf;

  std::string table() const;
  // One JSON object per cell, plus one for the overall row.
  std::string jsonl() const;
};

SeedReport summarize_seeds(const std::string& label, const std::vector<EvalReport>& reports,
                           std::optional<double> rtf = std::nullopt);

struct RtfOptions {
  std::size_t trials = 30;
  std::size_t warmup = 5;
};

struct RtfResult {
  double rtf = 0.0;                 // median
  std::vector<double> trial_rtfs;   // in measurement order
};

// Times feature extraction for each model input channel plus one forward
// pass on a single utterance, divided by the utterance duration.
RtfResult measure_rtf(BcResNet<float>& model, const std::vector<AudioBuffer>& mic_signals,
                      const RtfOptions& options = {});

}  // namespace ovkws
