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

#include "ovkws/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "ovkws/error.hpp"
#include "ovkws/ops.hpp"
#include "ovkws/optim.hpp"
#include "ovkws/checkpoint.hpp"

namespace ovkws {

namespace {

using json = nlohmann::ordered_json;

bool same_snr(double a, double b) { return std::abs(a - b) < 1e-9; }

std::string mic_codes(const std::vector<Mic>& mics) {
  std::string s;
  for (Mic m : kAllMics) {
    if (std::find(mics.begin(), mics.end(), m) != mics.end()) s += mic_code(m);
  }
  return s;
}

}  // namespace

FeatureMap mic_features(const std::array<AudioBuffer, 3>& signals, const std::vector<Mic>& mics,
                        const MelOptions& options) {
  if (mics.empty()) throw ConfigError("empty microphone subset");
  std::vector<FeatureMap> maps;
  for (Mic m : kAllMics) {
    if (std::find(mics.begin(), mics.end(), m) != mics.end()) {
      maps.push_back(log_mel(signals[static_cast<int>(m)], options));
    }
  }
  return stack_channels(maps);
}

ExampleSet load_examples(const Manifest& manifest, const std::filesystem::path& root,
                         const std::vector<Mic>& mics, std::size_t threads,
                         const std::optional<std::filesystem::path>& cache_dir) {
  if (mics.empty()) throw ConfigError("empty microphone subset");
  ExampleSet out(manifest.size());
  const std::string codes = mic_codes(mics);
  parallel_for(manifest.size(), threads, [&](std::size_t i) {
    const UtteranceRecord& r = manifest[i];
    Example& e = out[i];
    e.label = r.label;
    e.snr_db = r.snr_db;
    e.noise = r.noise;
    e.utt_id = r.utt_id;
    std::filesystem::path cache;
    if (cache_dir) {
      const auto rel = std::filesystem::path(r.path(Mic::kIec)).parent_path();
      cache = *cache_dir / rel / (r.utt_id + "_" + codes + ".feat");
      if (std::filesystem::exists(cache)) {
        e.features = read_feature_cache(cache);
        return;
      }
    }
    std::vector<FeatureMap> maps;
    for (Mic m : kAllMics) {
      if (std::find(mics.begin(), mics.end(), m) == mics.end()) continue;
      maps.push_back(log_mel(read_wav(root / r.path(m))));
    }
    e.features = stack_channels(maps);
    if (cache_dir) {
      std::filesystem::create_directories(cache.parent_path());
      write_feature_cache(cache, e.features);
    }
  });
  return out;
}

Tensor<float> make_batch(const ExampleSet& examples, const std::vector<std::size_t>& order,
                         std::size_t first, std::size_t count) {
  if (count == 0 || first + count > order.size()) throw ConfigError("batch outside the example set");
  const FeatureMap& ref = examples.at(order[first]).features;
  const std::size_t per = ref.values.size();
  Tensor<float> batch({count, ref.channels, ref.bins, ref.frames});
  for (std::size_t i = 0; i < count; ++i) {
    const FeatureMap& f = examples.at(order[first + i]).features;
    if (f.channels != ref.channels || f.bins != ref.bins || f.frames != ref.frames) {
      throw DataError("shape mismatch");
    }
    std::copy(f.values.begin(), f.values.end(), batch.ptr() + i * per);
  }
  return batch;
}

void TrainConfig::validate() const {
  if (epochs == 0 || batch_size == 0) throw ConfigError("epochs and batch size must be positive");
  if (warmup_epochs > epochs) throw ConfigError("warm-up longer than training");
  if (!(peak_lr > 0.0)) throw ConfigError("peak learning rate must be positive");
  if (mics.empty() || mics.size() > 3) throw ConfigError("mic subset must be a non-empty subset of {i,f,r}");
  for (std::size_t i = 0; i < mics.size(); ++i)
    for (std::size_t j = i + 1; j < mics.size(); ++j)
      if (mics[i] == mics[j]) throw ConfigError("duplicate microphone in subset");
  model_config().validate();
}

ModelConfig TrainConfig::model_config() const {
  ModelConfig m;
  m.tau = tau;
  m.in_channels = mics.size();
  m.num_classes = num_classes;
  m.dropout = dropout;
  return m;
}

std::string epoch_log_line(const EpochLog& e) {
  json j;
  j["epoch"] = e.epoch;
  j["step"] = e.step;
  j["lr"] = e.lr;
  j["loss"] = e.loss;
  j["val_acc"] = e.val_acc ? json(*e.val_acc) : json(nullptr);
  return j.dump();
}

TrainResult train(const TrainConfig& cfg, const ExampleSet& train_set, const ExampleSet* val_set,
                  std::ostream* log) {
  cfg.validate();
  if (train_set.empty()) throw DataError("empty training set");
  std::vector<std::size_t> counts(cfg.num_classes, 0);
  for (const auto& e : train_set) {
    if (e.label < 0 || static_cast<std::size_t>(e.label) >= cfg.num_classes) {
      throw DataError("label " + std::to_string(e.label) + " outside the class range");
    }
    if (e.features.channels != cfg.mics.size()) {
      throw DataError("features have " + std::to_string(e.features.channels) +
                      " channels, mic subset has " + std::to_string(cfg.mics.size()));
    }
    ++counts[static_cast<std::size_t>(e.label)];
  }
  for (std::size_t c = 0; c < counts.size(); ++c) {
    if (counts[c] == 0) {
      throw DataError("class coverage failure: no training items for class " + std::to_string(c));
    }
  }

  BcResNet<float> model(cfg.model_config(), derive_seed({cfg.seed, hash_string("init")}));
  std::optional<BcResNet<float>> best;
  Sgd<float> opt(model.parameters(), {cfg.momentum, cfg.weight_decay});
  const LrSchedule schedule{cfg.epochs, cfg.warmup_epochs, cfg.peak_lr, 0.0};

  std::ofstream file_log;
  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    file_log.open(cfg.out_dir / "train_log.jsonl", std::ios::trunc);
    if (!file_log) throw DataError("cannot write training log in " + cfg.out_dir.string());
  }

  const std::size_t n = train_set.size();
  const std::size_t steps_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  std::vector<StepLog> steps;
  std::vector<EpochLog> epochs;
  std::optional<double> best_val;
  std::size_t best_epoch = 0;
  std::vector<std::size_t> order(n);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng shuffle_rng(derive_seed({cfg.seed, hash_string("shuffle"), epoch}));
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    double lr = 0.0;
    for (std::size_t s = 0; s < steps_per_epoch; ++s) {
      const std::size_t step = epoch * steps_per_epoch + s;
      const double frac = static_cast<double>(epoch) +
                          static_cast<double>(s) / static_cast<double>(steps_per_epoch);
      lr = lr_at_epoch(frac, schedule);
      const std::size_t first = s * cfg.batch_size;
      const std::size_t count = std::min(cfg.batch_size, n - first);
      std::vector<int> labels(count);
      for (std::size_t i = 0; i < count; ++i) labels[i] = train_set[order[first + i]].label;

      Graph<float> g(Mode::kTrain, derive_seed({cfg.seed, hash_string("dropout"), step}));
      Var logits = model.forward(g, g.input(make_batch(train_set, order, first, count)));
      Var loss = cross_entropy(g, logits, labels);
      const double value = g.value(loss)[0];
      if (!std::isfinite(value)) throw DivergenceError("non-finite loss at step " + std::to_string(step));
      opt.zero_grad();
      g.backward(loss);
      opt.step(lr);
      loss_sum += value * static_cast<double>(count);
      steps.push_back({step, frac, lr, value});
    }

    EpochLog entry{epoch, (epoch + 1) * steps_per_epoch, lr, loss_sum / static_cast<double>(n), {}};
    if (val_set && !val_set->empty()) {
      entry.val_acc = snr_averaged_accuracy(predict(model, *val_set), *val_set);
      if (!best_val || *entry.val_acc > *best_val) {
        best_val = entry.val_acc;
        best_epoch = epoch;
        best = model;
      }
    }
    epochs.push_back(entry);
    const std::string line = epoch_log_line(entry);
    if (log) *log << line << "\n";
    if (file_log) file_log << line << "\n" << std::flush;
  }

  if (!best) {
    best = model;
    best_epoch = cfg.epochs - 1;
  }
  if (!cfg.out_dir.empty()) {
    CheckpointMeta meta{{"seed", std::to_string(cfg.seed)},
                        {"mics", mic_codes(cfg.mics)},
                        {"epochs", std::to_string(cfg.epochs)}};
    save_checkpoint(cfg.out_dir / "final.ckpt", model, meta);
    meta["best_epoch"] = std::to_string(best_epoch);
    save_checkpoint(cfg.out_dir / "best.ckpt", *best, meta);
  }
  return TrainResult{std::move(model), std::move(*best), best_epoch, best_val, std::move(epochs),
                     std::move(steps)};
}

std::vector<int> predict(BcResNet<float>& model, const ExampleSet& examples, std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<int> out;
  out.reserve(examples.size());
  for (std::size_t first = 0; first < examples.size(); first += batch_size) {
    const std::size_t count = std::min(batch_size, examples.size() - first);
    const Tensor<float> logits = model.infer(make_batch(examples, order, first, count));
    const std::size_t k = logits.dim(1);
    for (std::size_t i = 0; i < count; ++i) {
      const float* row = logits.ptr() + i * k;
      out.push_back(static_cast<int>(std::max_element(row, row + k) - row));
    }
  }
  return out;
}

double snr_averaged_accuracy(const std::vector<int>& predictions, const ExampleSet& examples) {
  if (predictions.size() != examples.size()) throw DataError("prediction count mismatch");
  std::map<double, std::pair<std::size_t, std::size_t>> by_snr;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto& [correct, total] = by_snr[examples[i].snr_db];
    correct += predictions[i] == examples[i].label;
    ++total;
  }
  if (by_snr.empty()) throw DataError("no validation items");
  double acc = 0.0;
  for (const auto& [snr, ct] : by_snr) {
    acc += 100.0 * static_cast<double>(ct.first) / static_cast<double>(ct.second);
  }
  return acc / static_cast<double>(by_snr.size());
}

std::optional<double> EvalCell::accuracy() const {
  if (total == 0) return std::nullopt;
  return 100.0 * static_cast<double>(correct) / static_cast<double>(total);
}

const EvalCell& EvalReport::cell(double snr, NoiseGroup group) const {
  for (const auto& [s, row] : cells) {
    if (same_snr(s, snr)) return row[static_cast<int>(group)];
  }
  throw DataError("SNR " + std::to_string(snr) + " not in the report grid");
}

EvalReport evaluate(const std::vector<int>& predictions, const ExampleSet& examples,
                    const std::vector<double>& snr_grid) {
  if (predictions.size() != examples.size()) throw DataError("prediction count mismatch");
  EvalReport report;
  report.snrs = snr_grid;
  std::sort(report.snrs.begin(), report.snrs.end());
  for (double s : report.snrs) report.cells[s];
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const bool hit = predictions[i] == examples[i].label;
    report.overall.correct += hit;
    ++report.overall.total;
    for (auto& [s, row] : report.cells) {
      if (!same_snr(s, examples[i].snr_db)) continue;
      EvalCell& c = row[is_seen_noise(examples[i].noise) ? 0 : 1];
      c.correct += hit;
      ++c.total;
    }
  }
  return report;
}

EvalReport evaluate(BcResNet<float>& model, const ExampleSet& examples,
                    const std::vector<double>& snr_grid) {
  return evaluate(predict(model, examples), examples, snr_grid);
}

namespace {

CellSummary summarize(const std::vector<std::optional<double>>& values) {
  CellSummary s;
  for (const auto& v : values) {
    if (v) s.per_seed.push_back(*v);
  }
  if (!s.per_seed.empty()) s.mean = mean(s.per_seed);
  if (s.per_seed.size() >= 2) s.ci = confidence_interval(s.per_seed);
  return s;
}

std::string format_cell(const CellSummary& c) {
  if (!c.mean) return "n/a";
  char buf[48];
  if (c.ci) {
    std::snprintf(buf, sizeof buf, "%6.2f +- %5.2f", c.ci->mean, c.ci->halfwidth);
  } else {
    std::snprintf(buf, sizeof buf, "%6.2f", *c.mean);
  }
  return buf;
}

json cell_json(const std::string& label, std::optional<double> snr, const char* group,
               const CellSummary& c) {
  json j;
  j["mics"] = label;
  j["snr_db"] = snr ? json(*snr) : json("all");
  j["group"] = group;
  j["present"] = c.mean.has_value();
  j["per_seed"] = c.per_seed;
  j["mean"] = c.mean ? json(*c.mean) : json(nullptr);
  j["ci_halfwidth"] = c.ci ? json(c.ci->halfwidth) : json(nullptr);
  return j;
}

}  // namespace

SeedReport summarize_seeds(const std::string& label, const std::vector<EvalReport>& reports,
                           std::optional<double> rtf) {
  if (reports.empty()) throw DataError("no evaluation reports");
  SeedReport out;
  out.label = label;
  out.snrs = reports.front().snrs;
  out.rtf = rtf;
  for (double s : out.snrs) {
    for (int gi = 0; gi < 2; ++gi) {
      std::vector<std::optional<double>> values;
      for (const auto& r : reports) values.push_back(r.cell(s, static_cast<NoiseGroup>(gi)).accuracy());
      out.cells[s][gi] = summarize(values);
    }
  }
  std::vector<std::optional<double>> overall;
  for (const auto& r : reports) overall.push_back(r.overall.accuracy());
  out.overall = summarize(overall);
  return out;
}

std::string SeedReport::table() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %-16s %-16s\n", ("[" + label + "]").c_str(), "seen", "unseen");
  os << line;
  for (double s : snrs) {
    const auto& row = cells.at(s);
    std::snprintf(line, sizeof line, "%7g dB %-16s %-16s\n", s, format_cell(row[0]).c_str(),
                  format_cell(row[1]).c_str());
    os << line;
  }
  std::snprintf(line, sizeof line, "%-10s %s\n", "overall", format_cell(overall).c_str());
  os << line;
  if (rtf) {
    std::snprintf(line, sizeof line, "%-10s %.4f\n", "RTF", *rtf);
    os << line;
  }
  return os.str();
}

std::string SeedReport::jsonl() const {
  std::string out;
  for (double s : snrs) {
    const auto& row = cells.at(s);
    out += cell_json(label, s, "seen", row[0]).dump() + "\n";
    out += cell_json(label, s, "unseen", row[1]).dump() + "\n";
  }
  json all = cell_json(label, std::nullopt, "all", overall);
  all["rtf"] = rtf ? json(*rtf) : json(nullptr);
  out += all.dump() + "\n";
  return out;
}

RtfResult measure_rtf(BcResNet<float>& model, const std::vector<AudioBuffer>& mic_signals,
                      const RtfOptions& options) {
  if (options.trials < 10) throw ConfigError("RTF needs at least 10 trials");
  if (mic_signals.size() != model.config().in_channels) {
    throw ConfigError("RTF input has " + std::to_string(mic_signals.size()) +
                      " signals, model expects " + std::to_string(model.config().in_channels));
  }
  for (const auto& s : mic_signals) {
    if (s.empty()) throw DataError("zero-length input");
  }
  const double duration = mic_signals.front().duration();
  using clock = std::chrono::steady_clock;
  if (std::chrono::duration<double>(clock::duration(1)).count() > 1e-6) {
    throw Error("timing resolution insufficient");
  }
  auto once = [&] {
    std::vector<FeatureMap> maps;
    for (const auto& s : mic_signals) maps.push_back(log_mel(s));
    const FeatureMap f = stack_channels(maps);
    Tensor<float> batch({1, f.channels, f.bins, f.frames},
                        std::vector<float>(f.values.begin(), f.values.end()));
    return model.infer(batch);
  };
  for (std::size_t i = 0; i < options.warmup; ++i) once();
  RtfResult result;
  for (std::size_t i = 0; i < options.trials; ++i) {
    const auto t0 = clock::now();
    const Tensor<float> logits = once();
    const auto t1 = clock::now();
    if (!logits.all_finite()) throw DivergenceError("non-finite logits");
    const double dt = std::chrono::duration<double>(t1 - t0).count();
    if (dt <= 0.0) throw Error("timing resolution insufficient");
    result.trial_rtfs.push_back(dt / duration);
  }
  result.rtf = median(result.trial_rtfs);
  return result;
}

}  // namespace ovkws
