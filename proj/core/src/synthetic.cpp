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

#include "ovkws/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ovkws/dsp.hpp"
#include "ovkws/error.hpp"

namespace ovkws {
namespace {

constexpr double kPi = std::numbers::pi;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Blackman-windowed sinc low-pass with unit DC gain, (taps - 1) / 2 delay.
std::vector<double> lowpass_fir(double cutoff_hz, int fs, std::size_t taps) {
  std::vector<double> h(taps);
  const double fc = cutoff_hz / fs;
  const double mid = (static_cast<double>(taps) - 1.0) / 2.0;
  double sum = 0.0;
  for (std::size_t n = 0; n < taps; ++n) {
    const double x = static_cast<double>(n) - mid;
    const double sinc = x == 0.0 ? 2.0 * fc : std::sin(2.0 * kPi * fc * x) / (kPi * x);
    const double w = 0.42 - 0.5 * std::cos(2.0 * kPi * n / (taps - 1.0)) +
                     0.08 * std::cos(4.0 * kPi * n / (taps - 1.0));
    h[n] = sinc * w;
    sum += h[n];
  }
  for (auto& v : h) v /= sum;
  return h;
}

void add_reflections(std::vector<double>& ir, std::size_t start, double amp,
                     double decay_samples, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t n = start + 1; n < ir.size(); ++n) {
    ir[n] += amp * normal(rng) *
             std::exp(-static_cast<double>(n - start) / decay_samples);
  }
}

// Direct path with optional head shadow (one-pole low-pass share).
std::vector<double> direct_path(std::size_t len, std::size_t delay, double gain,
                                double shadow) {
  std::vector<double> ir(len, 0.0);
  constexpr double a = 0.6;
  ir[delay] += gain * (1.0 - shadow);
  double lp = gain * shadow * (1.0 - a);
  for (std::size_t n = delay; n < len && std::abs(lp) > 1e-12; ++n, lp *= a) {
    ir[n] += lp;
  }
  return ir;
}

std::vector<double> band_limit(const std::vector<double>& ir,
                               const std::vector<double>& lp, double gain) {
  auto y = convolve(ir, lp, ir.size());
  for (auto& v : y) v *= gain;
  return y;
}

// ---------------------------------------------------------------------------
// Formant synthesis

struct Segment {
  bool voiced = true;
  double f1 = 500, f2 = 1500, f3 = 2800;
  double fric_center = 4000;
  double duration = 0.15;
  double f0_start = 1.0, f0_end = 1.0;
};

using WordTemplate = std::vector<Segment>;

WordTemplate random_template(Rng& rng, int min_segments, int max_segments) {
  WordTemplate t;
  const int n = std::uniform_int_distribution<int>(min_segments, max_segments)(rng);
  for (int i = 0; i < n; ++i) {
    Segment s;
    s.voiced = i == 0 || uniform(rng, 0, 1) < 0.7;
    s.f1 = uniform(rng, 280, 850);
    s.f2 = uniform(rng, 850, 2400);
    s.f3 = uniform(rng, 2400, 3400);
    s.fric_center = uniform(rng, 2500, 6500);
    s.duration = uniform(rng, 0.10, 0.22);
    s.f0_start = uniform(rng, 0.9, 1.15);
    s.f0_end = uniform(rng, 0.75, 1.1);
    t.push_back(s);
  }
  return t;
}

WordTemplate word_template(std::string_view word) {
  Rng rng(derive_seed({hash_string(word), 0x776F7264ull}));
  return random_template(rng, 2, 3);
}

struct Talker {
  double f0 = 120;
  double formant_scale = 1.0;
  double tempo = 1.0;
};

Talker random_talker(Rng& rng, Sex sex) {
  Talker t;
  if (sex == Sex::kFemale) {
    t.f0 = uniform(rng, 175, 245);
    t.formant_scale = uniform(rng, 1.02, 1.14);
  } else {
    t.f0 = uniform(rng, 95, 145);
    t.formant_scale = uniform(rng, 0.88, 1.0);
  }
  t.tempo = uniform(rng, 0.85, 1.15);
  return t;
}

double resonance(double f, double center, double bandwidth) {
  const double x = (f - center) / bandwidth;
  return 1.0 / (1.0 + x * x);
}

// Renders the template into out starting at `start`; returns the end sample.
std::size_t render_template(const WordTemplate& tmpl, const Talker& talker,
                            std::size_t start, std::vector<double>& out,
                            int fs, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double nyq_limit = 0.48 * fs;
  std::size_t pos = start;
  double phase = 0.0;
  for (const auto& seg : tmpl) {
    const double dur = seg.duration * talker.tempo * uniform(rng, 0.9, 1.1);
    const auto len = static_cast<std::size_t>(dur * fs);
    const auto ramp = std::min<std::size_t>(len / 3, static_cast<std::size_t>(0.015 * fs));
    const double jitter = uniform(rng, 0.96, 1.04);
    const double f1 = seg.f1 * talker.formant_scale * jitter;
    const double f2 = seg.f2 * talker.formant_scale * jitter;
    const double f3 = seg.f3 * talker.formant_scale * jitter;

    // Fricative band-pass state (RBJ biquad, constant 0 dB peak gain).
    const double w0 = 2.0 * kPi * std::min(seg.fric_center * talker.formant_scale, nyq_limit) / fs;
    const double alpha = std::sin(w0) / (2.0 * 2.0);
    const double a0 = 1.0 + alpha;
    const double b0 = alpha / a0, b2 = -alpha / a0;
    const double a1 = -2.0 * std::cos(w0) / a0, a2 = (1.0 - alpha) / a0;
    double x1 = 0, x2 = 0, y1 = 0, y2 = 0;

    std::vector<double> amps;
    for (std::size_t i = 0; i < len && pos + i < out.size(); ++i) {
      const double frac = static_cast<double>(i) / static_cast<double>(len);
      double env = 1.0;
      if (i < ramp) env = 0.5 - 0.5 * std::cos(kPi * i / ramp);
      if (len - i <= ramp) env = 0.5 - 0.5 * std::cos(kPi * (len - i) / ramp);
      double v = 0.0;
      if (seg.voiced) {
        const double f0 =
            talker.f0 * (seg.f0_start + (seg.f0_end - seg.f0_start) * frac);
        phase += 2.0 * kPi * f0 / fs;
        if (phase > 2.0 * kPi) phase -= 2.0 * kPi;
        if (i % 32 == 0) {
          amps.clear();
          for (int h = 1; h * f0 < nyq_limit; ++h) {
            const double f = h * f0;
            const double a = resonance(f, f1, 80) + 0.7 * resonance(f, f2, 110) +
                             0.35 * resonance(f, f3, 160);
            amps.push_back(a / std::pow(h, 0.7));
          }
        }
        for (std::size_t h = 0; h < amps.size(); ++h) {
          v += amps[h] * std::sin(static_cast<double>(h + 1) * phase);
        }
      } else {
        const double x0 = normal(rng);
        const double y0 = b0 * x0 + b2 * x2 - a1 * y1 - a2 * y2;
        x2 = x1; x1 = x0; y2 = y1; y1 = y0;
        v = 0.6 * y0;
      }
      out[pos + i] += env * v;
    }
    pos += len;
  }
  return pos;
}

void scale_to_rms_db(std::vector<double>& x, std::size_t begin, std::size_t end,
                     double target_db) {
  double sum = 0.0;
  end = std::min(end, x.size());
  for (std::size_t i = begin; i < end; ++i) sum += x[i] * x[i];
  if (sum == 0.0 || end <= begin) return;
  const double rms = std::sqrt(sum / static_cast<double>(end - begin));
  const double g = std::pow(10.0, target_db / 20.0) / rms;
  for (auto& v : x) v *= g;
}

void add_white(std::vector<double>& x, double level_db, Rng& rng) {
  std::normal_distribution<double> normal(0.0, std::pow(10.0, level_db / 20.0));
  for (auto& v : x) v += normal(rng);
}

// Running speech from random syllable templates with short pauses.
AudioBuffer talker_stream(const Talker& talker, double seconds, int fs, Rng& rng) {
  std::vector<double> out(static_cast<std::size_t>(seconds * fs), 0.0);
  std::size_t pos = static_cast<std::size_t>(uniform(rng, 0.0, 0.1) * fs);
  while (pos < out.size()) {
    const auto tmpl = random_template(rng, 1, 3);
    pos = render_template(tmpl, talker, pos, out, fs, rng);
    pos += static_cast<std::size_t>(uniform(rng, 0.03, 0.2) * fs);
  }
  scale_to_rms_db(out, 0, out.size(), -20.0);
  return AudioBuffer(std::move(out), fs);
}

AudioBuffer melody(double seconds, int fs, const std::vector<double>& partials,
                   double note_s, Rng& rng) {
  static constexpr int kPentatonic[] = {0, 2, 4, 7, 9};
  std::vector<double> out(static_cast<std::size_t>(seconds * fs), 0.0);
  std::size_t pos = 0;
  while (pos < out.size()) {
    const int octave = std::uniform_int_distribution<int>(0, 2)(rng);
    const int step = kPentatonic[std::uniform_int_distribution<int>(0, 4)(rng)];
    const double f0 = 130.81 * std::pow(2.0, octave + step / 12.0);
    const auto len = static_cast<std::size_t>(note_s * uniform(rng, 0.7, 1.5) * fs);
    for (std::size_t i = 0; i < len && pos + i < out.size(); ++i) {
      const double t = static_cast<double>(i) / fs;
      const double env = std::min(1.0, t / 0.01) * std::exp(-t / 0.35);
      double v = 0.0;
      for (std::size_t h = 0; h < partials.size(); ++h) {
        const double f = f0 * static_cast<double>(h + 1);
        if (f < 0.45 * fs) v += partials[h] * std::sin(2.0 * kPi * f * t);
      }
      out[pos + i] += env * v;
    }
    pos += len;
  }
  scale_to_rms_db(out, 0, out.size(), -20.0);
  return AudioBuffer(std::move(out), fs);
}

}  // namespace

// ---------------------------------------------------------------------------

TransferFunctionSet synthetic_transfer_functions(const std::string& subject_id,
                                                 std::uint64_t seed,
                                                 const SyntheticTfOptions& options) {
  const int fs = kSampleRate;
  const std::size_t len = options.ir_len;
  if (len < 128) throw ConfigError("synthetic IRs need at least 128 taps");
  Rng rng(derive_seed({seed, hash_string(subject_id), 0x7466ull}));
  const auto lp = lowpass_fir(options.iec_cutoff_hz, fs, 101);
  const double seal = std::pow(10.0, -options.iec_noise_attenuation_db / 20.0);

  TransferFunctionSet tfs;
  tfs.subject_id = subject_id;

  // Own voice: the IEC picks up a band-limited bone-conducted component,
  // the BTE mics an attenuated full-band air path.
  {
    auto iec = direct_path(len, 2, uniform(rng, 0.85, 1.15), 0.0);
    add_reflections(iec, 2, 0.03, 12.0, rng);
    tfs.ovtf[0] = {band_limit(iec, lp, 1.0), fs, IrKind::kOwnVoice};
    for (int m = 1; m < 3; ++m) {
      const std::size_t d = 6 + static_cast<std::size_t>(m - 1);
      auto ir = direct_path(len, d, uniform(rng, 0.42, 0.55), 0.0);
      add_reflections(ir, d, 0.05, 20.0, rng);
      tfs.ovtf[m] = {std::move(ir), fs, IrKind::kOwnVoice};
    }
  }

  for (int l = 1; l <= kNumLoudspeakers; ++l) {
    const double az = loudspeaker_azimuth_deg(l) * kPi / 180.0;
    const double lateral = std::sin(az);  // +1: hearing-aid side
    const double shadow = 0.6 * std::max(0.0, -lateral);
    const double gain = 1.0 - 0.3 * std::max(0.0, -lateral);
    std::array<std::vector<double>, 2> bte;
    for (int m = 0; m < 2; ++m) {
      const double fb = m == 0 ? std::cos(az) : -std::cos(az);
      const auto d = static_cast<std::size_t>(48 - std::lround(4.0 * lateral + 1.0 * fb));
      auto ir = direct_path(len, d, gain * uniform(rng, 0.95, 1.05), shadow);
      add_reflections(ir, d, 0.08, 40.0, rng);
      bte[m] = std::move(ir);
    }
    auto& row = tfs.hrtf[l - 1];
    row[0] = {band_limit(bte[0], lp, seal), fs, IrKind::kHrtf};
    row[1] = {bte[0], fs, IrKind::kHrtf};
    row[2] = {bte[1], fs, IrKind::kHrtf};
  }
  tfs.validate();
  return tfs;
}

SubjectPool synthetic_subject_pool(std::uint64_t seed,
                                   const SyntheticTfOptions& options) {
  SubjectPool pool;
  for (const char* id : {"S1", "S2", "S3"}) {
    pool.train.push_back(synthetic_transfer_functions(id, seed, options));
  }
  pool.val = synthetic_transfer_functions("S4", seed, options);
  pool.test = synthetic_transfer_functions("S5", seed, options);
  return pool;
}

const std::vector<std::string>& filler_words() {
  static const std::vector<std::string> words = {
      "backward", "bed",   "bird",  "cat",   "dog",   "eight",  "five",
      "follow",   "forward", "four", "happy", "house", "learn",  "marvin",
      "nine",     "one",   "seven", "sheila", "six",  "three",  "tree",
      "two",      "visual", "wow",  "zero"};
  return words;
}

std::vector<CleanUtterance> synthetic_corpus(const SyntheticCorpusOptions& options,
                                             std::uint64_t seed) {
  std::vector<std::string> words = options.words;
  if (words.empty()) {
    words.assign(kKeywords.begin(), kKeywords.end());
    words.insert(words.end(), filler_words().begin(), filler_words().end());
  }
  const int fs = options.sample_rate;
  const auto n = static_cast<std::size_t>(options.duration_s * fs);

  std::vector<CleanUtterance> corpus;
  for (Split split : {Split::kTrain, Split::kVal, Split::kTest}) {
    const std::size_t speakers = options.speakers[static_cast<int>(split)];
    for (std::size_t s = 0; s < speakers; ++s) {
      const std::string speaker =
          std::string(split_name(split)) + "spk" + std::to_string(s);
      Rng spk_rng(derive_seed({seed, hash_string(speaker)}));
      const Sex sex = s % 2 == 0 ? Sex::kFemale : Sex::kMale;
      const Talker talker = random_talker(spk_rng, sex);
      for (const auto& word : words) {
        const auto tmpl = word_template(word);
        for (std::size_t take = 0; take < options.takes; ++take) {
          CleanUtterance u;
          u.word = word;
          u.label = class_of_word(word);
          u.speaker = speaker;
          u.split = split;
          u.id = word + "_" + speaker + "_nohash_" + std::to_string(take);
          Rng rng(derive_seed({seed, hash_string(u.id)}));

          std::vector<double> x(n, 0.0);
          double total = 0.0;
          for (const auto& seg : tmpl) total += seg.duration * talker.tempo;
          const double latest = std::max(0.06, options.duration_s - 1.15 * total - 0.05);
          const auto start = static_cast<std::size_t>(uniform(rng, 0.05, latest) * fs);
          const std::size_t end = render_template(tmpl, talker, start, x, fs, rng);
          scale_to_rms_db(x, start, end, -20.0);
          const bool corrupted = uniform(rng, 0, 1) < options.corrupted_fraction;
          add_white(x, corrupted ? -38.0 : -85.0, rng);
          u.audio = AudioBuffer(std::move(x), fs);
          corpus.push_back(std::move(u));
        }
      }
    }
  }
  return corpus;
}

NoiseBank synthetic_noise_bank(Split split, std::uint64_t seed,
                               const SyntheticBankOptions& options) {
  const int fs = kSampleRate;
  const std::string prefix = std::string(split_name(split)) + "/";
  Rng rng(derive_seed({seed, 0x6E6F697365ull, static_cast<std::uint64_t>(split)}));

  NoiseBank bank;
  bank.sample_rate = fs;
  auto add_talkers = [&](std::size_t count, Sex sex, const char* tag) {
    for (std::size_t i = 0; i < count; ++i) {
      const Talker t = random_talker(rng, sex);
      bank.speech.push_back({prefix + tag + std::to_string(i),
                             talker_stream(t, options.speech_s, fs, rng), sex});
    }
  };
  add_talkers(options.female, Sex::kFemale, "f");
  add_talkers(options.male, Sex::kMale, "m");

  for (std::size_t i = 0; i < options.music; ++i) {
    std::vector<double> pa, pb;
    for (int h = 1; h <= 8; ++h) {
      pa.push_back(uniform(rng, 0.2, 1.0) / h);
      pb.push_back(uniform(rng, 0.2, 1.0) / std::sqrt(static_cast<double>(h)));
    }
    bank.music.push_back({prefix + "music" + std::to_string(i),
                          melody(options.music_s, fs, pa, 0.25, rng),
                          melody(options.music_s, fs, pb, 0.4, rng)});
  }

  for (std::size_t i = 0; i < options.tv; ++i) {
    const Talker host = random_talker(rng, i % 2 == 0 ? Sex::kMale : Sex::kFemale);
    AudioBuffer tv = talker_stream(host, options.tv_s, fs, rng);
    std::vector<double> partials{1.0, 0.5, 0.3, 0.2};
    const AudioBuffer bed = melody(options.tv_s, fs, partials, 0.5, rng);
    std::normal_distribution<double> normal(0.0, 1.0);
    double lp = 0.0;
    for (std::size_t k = 0; k < tv.size(); ++k) {
      const double t = static_cast<double>(k) / fs;
      // Applause bursts: low-passed noise gated twice per few seconds.
      const double gate = std::sin(kPi * t / 1.7) > 0.85 ? 1.0 : 0.0;
      lp = 0.7 * lp + 0.3 * normal(rng);
      tv.samples[k] += 0.3 * bed.samples[k] + 0.05 * gate * lp;
    }
    scale_to_rms_db(tv.samples, 0, tv.size(), -20.0);
    bank.tv.push_back({prefix + "tv" + std::to_string(i), std::move(tv), Sex::kMale});
  }

  std::vector<AudioBuffer> speech;
  for (const auto& s : bank.speech) speech.push_back(s.audio);
  bank.ssn_spectrum = long_term_spectrum(speech);
  return bank;
}

NoiseBanks synthetic_noise_banks(std::uint64_t seed,
                                 const SyntheticBankOptions& options) {
  NoiseBanks banks;
  for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
    banks.by_split[static_cast<int>(s)] = synthetic_noise_bank(s, seed, options);
  }
  return banks;
}

}  // namespace ovkws
