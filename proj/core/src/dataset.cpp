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

#include "ovkws/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>
#include <unordered_map>

#include "ovkws/error.hpp"

namespace ovkws {

namespace fs = std::filesystem;

std::string_view split_name(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kVal: return "val";
    case Split::kTest: return "test";
  }
  return "?";
}

Split parse_split(std::string_view s) {
  if (s == "train") return Split::kTrain;
  if (s == "val" || s == "validation") return Split::kVal;
  if (s == "test") return Split::kTest;
  throw ConfigError("unknown split '" + std::string(s) + "'");
}

AudioBuffer CleanUtterance::load() const {
  if (audio) return *audio;
  return read_wav(path);
}

void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(threads, n); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Asset loading

std::vector<CleanUtterance> load_speech_commands(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("corpus directory not found: " + dir.string());

  auto read_list = [&](const char* name) {
    std::set<std::string> entries;
    std::ifstream in(dir / name);
    for (std::string line; std::getline(in, line);) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) entries.insert(line);
    }
    return entries;
  };
  const auto val_list = read_list("validation_list.txt");
  const auto test_list = read_list("testing_list.txt");
  const bool have_lists = !val_list.empty() || !test_list.empty();

  std::vector<CleanUtterance> out;
  std::vector<fs::path> word_dirs;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && e.path().filename().string().front() != '_') {
      word_dirs.push_back(e.path());
    }
  }
  std::sort(word_dirs.begin(), word_dirs.end());
  for (const auto& wd : word_dirs) {
    const std::string word = wd.filename().string();
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(wd)) {
      if (e.is_regular_file() && e.path().extension() == ".wav") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      CleanUtterance u;
      const std::string stem = f.stem().string();
      const std::string rel = word + "/" + f.filename().string();
      u.word = word;
      u.label = class_of_word(word);
      u.id = word + "_" + stem;
      const auto cut = stem.find("_nohash_");
      u.speaker = cut == std::string::npos ? stem : stem.substr(0, cut);
      u.path = f;
      if (have_lists) {
        u.split = val_list.contains(rel)    ? Split::kVal
                  : test_list.contains(rel) ? Split::kTest
                                            : Split::kTrain;
      } else {
        const auto bucket = hash_string(u.speaker) % 100;
        u.split = bucket < 10 ? Split::kVal : bucket < 20 ? Split::kTest : Split::kTrain;
      }
      out.push_back(std::move(u));
    }
  }
  if (out.empty()) throw DataError("no utterances found under " + dir.string());
  return out;
}

NoiseBank load_noise_bank(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("noise bank not found: " + dir.string());
  auto wavs = [&](const char* sub) {
    std::vector<fs::path> files;
    if (fs::is_directory(dir / sub)) {
      for (const auto& e : fs::directory_iterator(dir / sub)) {
        if (e.path().extension() == ".wav") files.push_back(e.path());
      }
    }
    std::sort(files.begin(), files.end());
    return files;
  };
  NoiseBank bank;
  bool rate_set = false;
  auto take = [&](const fs::path& p) {
    AudioBuffer a = read_wav(p);
    if (!rate_set) {
      bank.sample_rate = a.sample_rate;
      rate_set = true;
    } else if (a.sample_rate != bank.sample_rate) {
      throw DataError("sample rate mismatch in noise bank: " + p.string());
    }
    return a;
  };
  const std::string prefix = dir.filename().string() + "/";
  for (const auto& p : wavs("female")) {
    bank.speech.push_back({prefix + "female/" + p.stem().string(), take(p), Sex::kFemale});
  }
  for (const auto& p : wavs("male")) {
    bank.speech.push_back({prefix + "male/" + p.stem().string(), take(p), Sex::kMale});
  }
  for (const auto& p : wavs("music")) {
    const std::string stem = p.stem().string();
    if (stem.size() < 2 || stem.substr(stem.size() - 2) != "_L") continue;
    const auto base = stem.substr(0, stem.size() - 2);
    const auto right = p.parent_path() / (base + "_R.wav");
    if (!fs::exists(right)) throw DataError("music track without right channel: " + p.string());
    bank.music.push_back({prefix + "music/" + base, take(p), take(right)});
  }
  for (const auto& p : wavs("tv")) {
    bank.tv.push_back({prefix + "tv/" + p.stem().string(), take(p), Sex::kMale});
  }
  if (!bank.speech.empty()) {
    std::vector<AudioBuffer> speech;
    for (const auto& s : bank.speech) speech.push_back(s.audio);
    bank.ssn_spectrum = long_term_spectrum(speech);
  }
  return bank;
}

void SubjectPool::validate() const {
  if (train.size() != 3) throw DataError("expected 3 training subjects");
  std::set<std::string> ids;
  for (const auto& t : train) {
    t.validate();
    ids.insert(t.subject_id);
  }
  val.validate();
  test.validate();
  ids.insert(val.subject_id);
  ids.insert(test.subject_id);
  if (ids.size() != 5) throw DataError("subject ids must be distinct");
}

// ---------------------------------------------------------------------------
// Configuration

const std::vector<double>& DatasetConfig::snrs(Split s) const {
  switch (s) {
    case Split::kTrain: return train_snrs;
    case Split::kVal: return val_snrs;
    case Split::kTest: return test_snrs;
  }
  return test_snrs;
}

const std::vector<NoiseType>& DatasetConfig::noises(Split s) const {
  switch (s) {
    case Split::kTrain: return train_noises;
    case Split::kVal: return val_noises;
    case Split::kTest: return test_noises;
  }
  return test_noises;
}

void DatasetConfig::validate() const {
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
    if (snrs(s).empty()) throw ConfigError("empty SNR grid for " + std::string(split_name(s)));
    if (noises(s).empty()) throw ConfigError("no noise types for " + std::string(split_name(s)));
    for (double v : snrs(s)) {
      if (!std::isfinite(v)) throw ConfigError("non-finite SNR in grid");
    }
  }
  if (perturbation.sigma_mult < 0 || perturbation.sigma_add < 0) {
    throw ConfigError("perturbation sigmas must be non-negative");
  }
  if (utterance_samples == 0) throw ConfigError("utterance length must be positive");
}

std::uint64_t record_seed(std::uint64_t global_seed, const std::string& utt_id,
                          double snr_db, int partition) {
  return derive_seed({global_seed, hash_string(utt_id),
                      static_cast<std::uint64_t>(std::llround(snr_db * 1000.0)),
                      static_cast<std::uint64_t>(partition)});
}

// ---------------------------------------------------------------------------

std::vector<CleanUtterance> filter_clean(const std::vector<CleanUtterance>& corpus,
                                         double threshold_db,
                                         const SnrEstimatorOptions& options,
                                         std::size_t threads) {
  std::vector<char> keep(corpus.size(), 0);
  parallel_for(corpus.size(), threads, [&](std::size_t i) {
    if (corpus[i].label == kAmbientClass) return;
    const LevelDb snr = a_posteriori_snr(corpus[i].load(), options);
    keep[i] = !snr.is_silence() && snr.value() > threshold_db;
  });
  std::vector<CleanUtterance> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (keep[i]) out.push_back(corpus[i]);
  }
  return out;
}

namespace {

std::string snr_dir(double snr) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", snr);
  return buf;
}

struct PlannedItem {
  std::string id;
  int label = 0;
  std::string word;
  std::string source;
  std::string speaker;
};

}  // namespace

Manifest plan_dataset(const DatasetConfig& config,
                      const std::vector<CleanUtterance>& corpus,
                      const SubjectPool& subjects) {
  config.validate();
  subjects.validate();
  Manifest manifest;

  for (Split split : {Split::kTrain, Split::kVal, Split::kTest}) {
    const auto sidx = static_cast<std::uint64_t>(split);
    std::array<std::vector<PlannedItem>, kNumClasses> by_class;
    for (const auto& u : corpus) {
      if (u.split != split || u.label == kAmbientClass) continue;
      by_class[u.label].push_back({u.id, u.label, u.word, u.id, u.speaker});
    }
    for (auto& items : by_class) {
      std::sort(items.begin(), items.end(),
                [](const auto& a, const auto& b) { return a.id < b.id; });
      Rng rng(derive_seed({config.seed, 0x636C617373ull, sidx,
                           static_cast<std::uint64_t>(&items - by_class.data())}));
      std::shuffle(items.begin(), items.end(), rng);
    }

    std::size_t keyword_total = 0, keyword_classes = 0;
    for (int c = 0; c < 10; ++c) {
      if (!by_class[c].empty()) {
        keyword_total += by_class[c].size();
        ++keyword_classes;
      }
    }
    const std::size_t mean_keyword =
        keyword_classes == 0
            ? 0
            : static_cast<std::size_t>(std::llround(static_cast<double>(keyword_total) /
                                                    keyword_classes));
    if (config.balance_classes && mean_keyword > 0 &&
        by_class[kFillerClass].size() > mean_keyword) {
      by_class[kFillerClass].resize(mean_keyword);
    }
    if (config.include_ambient) {
      const std::size_t n_ambient = mean_keyword > 0 ? mean_keyword : by_class[kFillerClass].size();
      for (std::size_t k = 0; k < n_ambient; ++k) {
        const std::string id = "_ambient_" + std::string(split_name(split)) + "_" + std::to_string(k);
        by_class[kAmbientClass].push_back({id, kAmbientClass, "_ambient_", "", "none"});
      }
    }

    // Round-robin over classes keeps any cap balanced.
    std::vector<PlannedItem> items;
    const std::size_t cap = config.max_utterances[sidx];
    for (std::size_t round = 0;; ++round) {
      bool any = false;
      for (const auto& cls : by_class) {
        if (round < cls.size()) {
          any = true;
          if (cap == 0 || items.size() < cap) items.push_back(cls[round]);
        }
      }
      if (!any || (cap > 0 && items.size() >= cap)) break;
    }
    if (items.empty()) continue;

    Rng order_rng(derive_seed({config.seed, 0x6F72646572ull, sidx}));
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    std::shuffle(items.begin(), items.end(), order_rng);

    const auto& noises = config.noises(split);
    const int partitions = static_cast<int>(noises.size());
    std::vector<std::vector<PlannedItem>> parts(partitions);
    for (std::size_t k = 0; k < items.size(); ++k) parts[k % partitions].push_back(items[k]);

    for (int p = 0; p < partitions; ++p) {
      for (const auto& item : parts[p]) {
        std::string subject;
        switch (split) {
          case Split::kTrain: {
            const std::string& key = item.speaker == "none" ? item.id : item.speaker;
            const auto pick = derive_seed({config.seed, 0x7375626Aull, hash_string(key)}) %
                              subjects.train.size();
            subject = subjects.train[pick].subject_id;
            break;
          }
          case Split::kVal: subject = subjects.val.subject_id; break;
          case Split::kTest: subject = subjects.test.subject_id; break;
        }
        for (double snr : config.snrs(split)) {
          UtteranceRecord r;
          r.utt_id = item.id;
          r.label = item.label;
          r.word = item.word;
          r.source = item.source;
          r.speaker = item.speaker;
          r.subject = subject;
          r.split = split;
          r.partition = p;
          r.noise = noises[p];
          r.snr_db = snr;
          r.seed = record_seed(config.seed, item.id, snr, p);
          const std::string dir = std::string(split_name(split)) + "/" + std::to_string(p) +
                                  "/" + snr_dir(snr) + "/";
          for (Mic m : kAllMics) {
            r.paths[static_cast<int>(m)] = dir + item.id + "_" + std::string(mic_name(m)) + ".wav";
          }
          manifest.push_back(std::move(r));
        }
      }
    }
  }
  return manifest;
}

namespace {

const TransferFunctionSet& subject_for(const SubjectPool& pool, const UtteranceRecord& r) {
  switch (r.split) {
    case Split::kTrain:
      for (const auto& t : pool.train) {
        if (t.subject_id == r.subject) return t;
      }
      break;
    case Split::kVal:
      if (pool.val.subject_id == r.subject) return pool.val;
      break;
    case Split::kTest:
      if (pool.test.subject_id == r.subject) return pool.test;
      break;
  }
  throw DataError("unknown subject '" + r.subject + "' for " + r.utt_id);
}

}  // namespace

SynthesisResult render_record(const UtteranceRecord& record,
                              const DatasetConfig& config,
                              const CleanUtterance* clean,
                              const SubjectPool& subjects,
                              const NoiseBanks& banks) {
  const bool speech = record.label != kAmbientClass;
  if (speech && clean == nullptr) throw DataError("missing clean utterance for " + record.utt_id);

  AudioBuffer x = speech ? clean->load() : AudioBuffer(config.utterance_samples, kSampleRate);
  if (x.sample_rate != kSampleRate) {
    throw DataError("unsupported sample rate in " + record.utt_id);
  }
  x.samples.resize(config.utterance_samples, 0.0);

  Rng rng(record.seed);
  ScenarioOptions sopt;
  sopt.segment_length = x.size();
  sopt.ssn_independent = config.ssn_independent;
  const NoiseScenario scenario = compose_scenario(record.noise, banks.at(record.split), rng, sopt);

  MixSpec spec;
  spec.target_snr_db = record.snr_db;
  spec.perturb = record.split == Split::kTrain;
  spec.perturbation = config.perturbation;
  spec.speech_present = speech;
  spec.nominal_asl_db = config.nominal_asl_db;
  return synthesize_utterance(x, subject_for(subjects, record), scenario, spec, rng);
}

Manifest build_dataset(const DatasetConfig& config,
                       const std::vector<CleanUtterance>& corpus,
                       const SubjectPool& subjects, const NoiseBanks& banks,
                       const fs::path& out_dir) {
  const auto clean = filter_clean(corpus, config.clean_snr_threshold_db,
                                  config.snr_estimator, config.threads);
  Manifest manifest = plan_dataset(config, clean, subjects);

  std::unordered_map<std::string, const CleanUtterance*> by_id;
  for (const auto& u : clean) by_id.emplace(u.id, &u);

  std::set<fs::path> dirs;
  for (const auto& r : manifest) dirs.insert((out_dir / r.paths[0]).parent_path());
  for (const auto& d : dirs) fs::create_directories(d);

  parallel_for(manifest.size(), config.threads, [&](std::size_t i) {
    auto& r = manifest[i];
    const CleanUtterance* u = nullptr;
    if (r.label != kAmbientClass) {
      const auto it = by_id.find(r.source);
      if (it == by_id.end()) throw DataError("missing clean utterance " + r.source);
      u = it->second;
    }
    const SynthesisResult out = render_record(r, config, u, subjects, banks);
    r.alpha = out.alpha;
    for (Mic m : kAllMics) write_wav(out_dir / r.path(m), out.at(m), config.wav_format);
  });

  write_manifest(out_dir / "manifest.txt", manifest);
  return manifest;
}

}  // namespace ovkws
