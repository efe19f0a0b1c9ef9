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

#include "ovkws/scene.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "ovkws/dsp.hpp"
#include "ovkws/error.hpp"

namespace ovkws {

// ---------------------------------------------------------------------------

std::string_view class_name(int label) {
  if (label >= 0 && label < 10) return kKeywords[label];
  if (label == kFillerClass) return "_filler_";
  if (label == kAmbientClass) return "_ambient_";
  throw ConfigError("class label out of range: " + std::to_string(label));
}

int parse_class_name(std::string_view name) {
  for (int i = 0; i < kNumClasses; ++i) {
    if (class_name(i) == name) return i;
  }
  throw DataError("unknown class '" + std::string(name) + "'");
}

int class_of_word(std::string_view word) {
  for (int i = 0; i < 10; ++i) {
    if (kKeywords[i] == word) return i;
  }
  if (word == "_background_noise_" || word == "_ambient_") return kAmbientClass;
  return kFillerClass;
}

std::string_view noise_type_name(NoiseType t) {
  switch (t) {
    case NoiseType::kBabble: return "babble";
    case NoiseType::kMusic: return "music";
    case NoiseType::kSsn: return "ssn";
    case NoiseType::kInterferer: return "interferer";
    case NoiseType::kTv: return "tv";
  }
  return "?";
}

NoiseType parse_noise_type(std::string_view s) {
  for (NoiseType t : kAllNoiseTypes) {
    if (noise_type_name(t) == s) return t;
  }
  throw ConfigError("unknown noise type '" + std::string(s) + "'");
}

bool is_seen_noise(NoiseType t) {
  return t == NoiseType::kBabble || t == NoiseType::kMusic ||
         t == NoiseType::kSsn;
}

// ---------------------------------------------------------------------------

void NoiseScenario::validate() const {
  const std::size_t l = sources.size();
  if (l < 1 || l > kNumLoudspeakers) {
    throw DataError("scenario must have between 1 and 16 sources");
  }
  std::set<int> speakers;
  for (const auto& s : sources) {
    if (s.loudspeaker < 1 || s.loudspeaker > kNumLoudspeakers) {
      throw DataError("invalid loudspeaker index " +
                      std::to_string(s.loudspeaker));
    }
    speakers.insert(s.loudspeaker);
  }
  auto require = [&](bool ok, const char* what) {
    if (!ok) throw DataError(std::string("invalid ") + what + " scenario");
  };
  switch (type) {
    case NoiseType::kBabble:
      require(l == 10 && speakers.size() == 10, "babble");
      break;
    case NoiseType::kMusic: {
      require(l == 2, "music");
      const int a = sources[0].loudspeaker;
      const int b = sources[1].loudspeaker;
      require(b == a % kNumLoudspeakers + 1, "music");
      break;
    }
    case NoiseType::kSsn:
      require(l == kNumLoudspeakers && speakers.size() == kNumLoudspeakers, "ssn");
      break;
    case NoiseType::kInterferer:
      require(l == 1, "interferer");
      break;
    case NoiseType::kTv:
      require(l == 1 && sources[0].loudspeaker == kFrontLoudspeaker, "tv");
      break;
  }
}

namespace {

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// k distinct indices from [0, n), in draw order.
std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j =
        std::uniform_int_distribution<std::size_t>(i, n - 1)(rng);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

AudioBuffer cut_segment(const AudioBuffer& src, std::size_t length,
                        std::size_t offset) {
  const auto begin = src.samples.begin() + static_cast<std::ptrdiff_t>(offset);
  return AudioBuffer(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(length)),
                     src.sample_rate);
}

std::size_t random_offset(Rng& rng, std::size_t available, std::size_t length) {
  if (available < length) throw DataError("insufficient bank material");
  return std::uniform_int_distribution<std::size_t>(0, available - length)(rng);
}

[[noreturn]] void insufficient() { throw DataError("insufficient bank material"); }

}  // namespace

NoiseScenario compose_scenario(NoiseType type, const NoiseBank& bank, Rng& rng,
                               const ScenarioOptions& options) {
  const std::size_t len = options.segment_length;
  NoiseScenario sc;
  sc.type = type;

  auto speech_of = [&](Sex sex) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < bank.speech.size(); ++i) {
      if (bank.speech[i].sex == sex && bank.speech[i].audio.size() >= len) {
        idx.push_back(i);
      }
    }
    return idx;
  };
  auto add_speech = [&](std::size_t i, int loudspeaker) {
    const auto& s = bank.speech[i];
    const std::size_t off = random_offset(rng, s.audio.size(), len);
    sc.sources.push_back({s.id, loudspeaker, cut_segment(s.audio, len, off)});
  };

  switch (type) {
    case NoiseType::kBabble: {
      const auto female = speech_of(Sex::kFemale);
      const auto male = speech_of(Sex::kMale);
      if (female.size() < 5 || male.size() < 5) insufficient();
      const auto speakers = sample_distinct(rng, kNumLoudspeakers, 10);
      const auto fsel = sample_distinct(rng, female.size(), 5);
      const auto msel = sample_distinct(rng, male.size(), 5);
      for (int k = 0; k < 5; ++k) {
        add_speech(female[fsel[k]], static_cast<int>(speakers[k]) + 1);
      }
      for (int k = 0; k < 5; ++k) {
        add_speech(male[msel[k]], static_cast<int>(speakers[5 + k]) + 1);
      }
      break;
    }
    case NoiseType::kMusic: {
      if (bank.music.empty()) insufficient();
      const auto& track = bank.music[uniform_index(rng, bank.music.size())];
      const int left = static_cast<int>(uniform_index(rng, kNumLoudspeakers)) + 1;
      const int right = left % kNumLoudspeakers + 1;
      const std::size_t avail = std::min(track.left.size(), track.right.size());
      const std::size_t off = random_offset(rng, avail, len);
      sc.sources.push_back({track.id + ":L", left, cut_segment(track.left, len, off)});
      sc.sources.push_back({track.id + ":R", right, cut_segment(track.right, len, off)});
      break;
    }
    case NoiseType::kSsn: {
      if (bank.ssn_spectrum.empty()) insufficient();
      AudioBuffer shared;
      if (!options.ssn_independent) {
        shared = make_ssn(bank.ssn_spectrum, len, rng, bank.sample_rate);
      }
      for (int l = 1; l <= kNumLoudspeakers; ++l) {
        AudioBuffer seg = options.ssn_independent
                              ? make_ssn(bank.ssn_spectrum, len, rng, bank.sample_rate)
                              : shared;
        sc.sources.push_back({"ssn:" + std::to_string(l), l, std::move(seg)});
      }
      break;
    }
    case NoiseType::kInterferer: {
      const Sex sex = std::bernoulli_distribution(0.5)(rng) ? Sex::kFemale : Sex::kMale;
      const auto pool = speech_of(sex);
      if (pool.empty()) insufficient();
      const std::size_t pick = pool[uniform_index(rng, pool.size())];
      const int l = static_cast<int>(uniform_index(rng, kNumLoudspeakers)) + 1;
      add_speech(pick, l);
      break;
    }
    case NoiseType::kTv: {
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < bank.tv.size(); ++i) {
        if (bank.tv[i].audio.size() >= len) pool.push_back(i);
      }
      if (pool.empty()) insufficient();
      const auto& tv = bank.tv[pool[uniform_index(rng, pool.size())]];
      const std::size_t off = random_offset(rng, tv.audio.size(), len);
      sc.sources.push_back({tv.id, kFrontLoudspeaker, cut_segment(tv.audio, len, off)});
      break;
    }
  }
  sc.validate();
  return sc;
}

AudioBuffer render_noise_at_mic(const NoiseScenario& scenario,
                                const TransferFunctionSet& tfs, Mic mic,
                                std::size_t length) {
  if (scenario.sources.empty()) throw DataError("scenario has no sources");
  AudioBuffer out(length, tfs.own_voice(mic).sample_rate);
  for (const auto& src : scenario.sources) {
    const auto& g = tfs.head_related(src.loudspeaker, mic);
    if (src.segment.size() < length) {
      throw DataError("noise source shorter than requested length");
    }
    const auto part = convolve(src.segment.view(), g.taps, length);
    for (std::size_t i = 0; i < length; ++i) out.samples[i] += part[i];
  }
  return out;
}

// ---------------------------------------------------------------------------

double compute_alpha(LevelDb speech_level, LevelDb noise_level,
                     double target_snr_db) {
  if (speech_level.is_silence()) throw DataError("no speech activity");
  if (noise_level.is_silence()) throw DataError("noise has zero power");
  return std::pow(10.0, (speech_level.value() - noise_level.value() -
                         target_snr_db) / 20.0);
}

double compute_alpha(const AudioBuffer& x_front_clean,
                     const AudioBuffer& noise_front_unscaled,
                     double target_snr_db) {
  return compute_alpha(active_speech_level(x_front_clean),
                       rms_level_db(noise_front_unscaled), target_snr_db);
}

SynthesisResult synthesize_utterance(const AudioBuffer& x,
                                     const TransferFunctionSet& tfs,
                                     const NoiseScenario& scenario,
                                     const MixSpec& spec, Rng& rng) {
  validate(x);
  if (x.empty()) throw DataError("empty operand");
  tfs.validate();
  scenario.validate();
  const std::size_t n = x.size();

  TransferFunctionSet used = tfs;
  if (spec.perturb) {
    for (Mic m : kAllMics) {
      auto& h = used.ovtf[static_cast<int>(m)];
      h = perturb_tf(h, spec.perturbation, rng);
    }
    std::set<int> done;
    for (const auto& src : scenario.sources) {
      if (!done.insert(src.loudspeaker).second) continue;
      for (Mic m : kAllMics) {
        auto& g = used.hrtf[src.loudspeaker - 1][static_cast<int>(m)];
        g = perturb_tf(g, spec.perturbation, rng);
      }
    }
  }

  SynthesisResult r;
  for (Mic m : kAllMics) {
    const int i = static_cast<int>(m);
    if (spec.speech_present) {
      r.clean[i] = convolve(x, used.own_voice(m).taps, n);
    } else {
      r.clean[i] = AudioBuffer(n, x.sample_rate);
    }
    r.noise[i] = render_noise_at_mic(scenario, used, m, n);
  }

  const AudioBuffer& front_clean = r.clean[static_cast<int>(Mic::kFront)];
  r.speech_level = spec.speech_present ? active_speech_level(front_clean)
                                       : LevelDb(spec.nominal_asl_db);
  r.noise_level_unscaled = rms_level_db(r.noise[static_cast<int>(Mic::kFront)]);
  r.alpha = spec.alpha_override
                ? *spec.alpha_override
                : compute_alpha(r.speech_level, r.noise_level_unscaled,
                                spec.target_snr_db);
  if (!(r.alpha >= 0.0) || !std::isfinite(r.alpha)) {
    throw DataError("noise scaling factor must be finite and non-negative");
  }

  for (int i = 0; i < 3; ++i) {
    auto& noise = r.noise[i].samples;
    for (auto& v : noise) v *= r.alpha;
    r.mix[i] = AudioBuffer(n, x.sample_rate);
    for (std::size_t k = 0; k < n; ++k) {
      r.mix[i].samples[k] = r.clean[i].samples[k] + noise[k];
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

LevelDb a_posteriori_snr(const AudioBuffer& signal,
                         const SnrEstimatorOptions& options) {
  validate(signal);
  const auto frame = static_cast<std::size_t>(
      std::llround(options.frame_s * signal.sample_rate));
  if (signal.duration() < 0.2 || frame == 0) {
    throw ConfigError("a posteriori SNR needs at least 0.2 s of audio");
  }
  const std::size_t nframes = signal.size() / frame;
  std::vector<double> energy(nframes, 0.0);
  for (std::size_t f = 0; f < nframes; ++f) {
    double e = 0.0;
    for (std::size_t i = 0; i < frame; ++i) {
      const double v = signal.samples[f * frame + i];
      e += v * v;
    }
    energy[f] = e / static_cast<double>(frame);
  }
  if (std::all_of(energy.begin(), energy.end(), [](double e) { return e == 0.0; })) {
    return LevelDb::silence();
  }

  std::vector<double> sorted = energy;
  std::sort(sorted.begin(), sorted.end());
  const auto k = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::ceil(options.floor_fraction * nframes)));
  const double floor =
      std::accumulate(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
      static_cast<double>(k);
  if (floor == 0.0) return LevelDb(options.cap_db);

  double active_sum = 0.0;
  std::size_t active = 0;
  for (double e : energy) {
    if (e > options.activity_factor * floor) {
      active_sum += e;
      ++active;
    }
  }
  // Without any frame above the activity threshold the signal is treated as
  // stationary and the ratio falls back to the overall mean.
  const double num = active > 0
                         ? active_sum / static_cast<double>(active)
                         : std::accumulate(energy.begin(), energy.end(), 0.0) /
                               static_cast<double>(nframes);
  return LevelDb(std::min(options.cap_db, 10.0 * std::log10(num / floor)));
}

}  // namespace ovkws
