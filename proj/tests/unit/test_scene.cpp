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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "ovkws/dsp.hpp"
#include "ovkws/error.hpp"
#include "ovkws/scene.hpp"
#include "ovkws/synthetic.hpp"
#include "test_util.hpp"

namespace ovkws {
namespace {

using test::direct_sum;
using test::rel_error;
using test::white_noise;

TransferFunctionSet identity_tfs() {
  TransferFunctionSet t;
  t.subject_id = "unit";
  const ImpulseResponse unit{{1.0}, kSampleRate, IrKind::kOwnVoice};
  for (Mic m : kAllMics) {
    t.ovtf[static_cast<int>(m)] = unit;
    for (auto& row : t.hrtf) row[static_cast<int>(m)] = {{1.0}, kSampleRate, IrKind::kHrtf};
  }
  return t;
}

AudioBuffer speech_like(std::uint64_t seed) {
  SyntheticCorpusOptions opt;
  opt.words = {"yes"};
  opt.speakers = {1, 0, 0};
  opt.corrupted_fraction = 0.0;
  return synthetic_corpus(opt, seed).front().load();
}

TEST(Taxonomy, TwelveClasses) {
  EXPECT_EQ(class_of_word("yes"), 0);
  EXPECT_EQ(class_of_word("go"), 9);
  EXPECT_EQ(class_of_word("marvin"), kFillerClass);
  EXPECT_EQ(class_name(kAmbientClass), "_ambient_");
  EXPECT_EQ(filler_words().size(), 25u);
  for (int c = 0; c < kNumClasses; ++c) EXPECT_EQ(parse_class_name(class_name(c)), c);
}

TEST(APosterioriSnr, CleanBurstHitsCap) {
  auto x = test::tone(8000, 440, 0.3);
  x.resize(16000, 0.0);
  EXPECT_DOUBLE_EQ(a_posteriori_snr(AudioBuffer(x)).value(), 100.0);
}

TEST(APosterioriSnr, ToneOverNoise) {
  // -30 dB noise throughout, a -10 dB tone over the second half.
  auto x = white_noise(32000, 1, std::pow(10.0, -30.0 / 20.0));
  const auto t = test::tone(16000, 700, std::sqrt(2.0) * std::pow(10.0, -10.0 / 20.0));
  for (std::size_t i = 0; i < t.size(); ++i) x[16000 + i] += t[i];
  EXPECT_NEAR(a_posteriori_snr(AudioBuffer(x)).value(), 20.0, 1.0);
}

TEST(APosterioriSnr, StationaryNoiseIsNearZero) {
  EXPECT_NEAR(a_posteriori_snr(AudioBuffer(white_noise(32000, 2, 0.1))).value(), 0.0, 1.0);
  EXPECT_TRUE(a_posteriori_snr(AudioBuffer(std::vector<double>(8000, 0.0))).is_silence());
}

class ScenarioTest : public ::testing::Test {
 protected:
  NoiseBank bank = synthetic_noise_bank(Split::kTrain, 5);
};

TEST_F(ScenarioTest, Babble) {
  Rng rng(1);
  const auto s = compose_scenario(NoiseType::kBabble, bank, rng);
  ASSERT_EQ(s.num_sources(), 10u);
  std::set<int> speakers;
  std::set<std::string> refs;
  for (const auto& src : s.sources) {
    speakers.insert(src.loudspeaker);
    refs.insert(src.ref);
  }
  EXPECT_EQ(speakers.size(), 10u);
  EXPECT_EQ(refs.size(), 10u);
  int female = 0;
  for (const auto& src : s.sources) {
    for (const auto& sp : bank.speech) female += sp.id == src.ref && sp.sex == Sex::kFemale;
  }
  EXPECT_EQ(female, 5);
}

TEST_F(ScenarioTest, Music) {
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const auto s = compose_scenario(NoiseType::kMusic, bank, rng);
    ASSERT_EQ(s.num_sources(), 2u);
    EXPECT_EQ(s.sources[1].loudspeaker, s.sources[0].loudspeaker % kNumLoudspeakers + 1);
  }
}

TEST_F(ScenarioTest, SsnInterfererTv) {
  Rng rng(3);
  const auto ssn = compose_scenario(NoiseType::kSsn, bank, rng);
  ASSERT_EQ(ssn.num_sources(), 16u);
  std::set<int> ls;
  for (const auto& src : ssn.sources) ls.insert(src.loudspeaker);
  EXPECT_EQ(ls.size(), 16u);
  EXPECT_NE(ssn.sources[0].segment.samples, ssn.sources[1].segment.samples);

  int female = 0;
  for (int i = 0; i < 400; ++i) {
    const auto s = compose_scenario(NoiseType::kInterferer, bank, rng);
    ASSERT_EQ(s.num_sources(), 1u);
    for (const auto& sp : bank.speech) female += sp.id == s.sources[0].ref && sp.sex == Sex::kFemale;
  }
  EXPECT_NEAR(female / 400.0, 0.5, 0.1);

  const auto tv = compose_scenario(NoiseType::kTv, bank, rng);
  ASSERT_EQ(tv.num_sources(), 1u);
  EXPECT_EQ(tv.sources[0].loudspeaker, kFrontLoudspeaker);
  EXPECT_DOUBLE_EQ(loudspeaker_azimuth_deg(kFrontLoudspeaker), 0.0);
}

TEST_F(ScenarioTest, InsufficientMaterial) {
  NoiseBank small = bank;
  small.speech.resize(3);
  Rng rng(4);
  try {
    compose_scenario(NoiseType::kBabble, small, rng);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "insufficient bank material");
  }
}

TEST(RenderNoise, IdentityAndSuperposition) {
  const auto tfs = identity_tfs();
  const AudioBuffer v(white_noise(16000, 9));
  NoiseScenario one{NoiseType::kTv, {{"v", 1, v}}};
  EXPECT_EQ(render_noise_at_mic(one, tfs, Mic::kFront, 16000).samples, v.samples);

  NoiseScenario two{NoiseType::kMusic, {{"a", 3, v}, {"b", 4, v}}};
  const auto y = render_noise_at_mic(two, tfs, Mic::kRear, 16000);
  for (std::size_t i = 0; i < y.size(); ++i) ASSERT_DOUBLE_EQ(y.samples[i], 2.0 * v.samples[i]);
}

TEST(RenderNoise, MatchesPerSourceOracle) {
  const auto tfs = synthetic_transfer_functions("S1", 4);
  const auto bank = synthetic_noise_bank(Split::kTest, 6);
  Rng rng(7);
  const auto s = compose_scenario(NoiseType::kBabble, bank, rng);
  for (Mic m : kAllMics) {
    std::vector<double> want(16000, 0.0);
    for (const auto& src : s.sources) {
      const auto part = direct_sum(src.segment.samples, tfs.head_related(src.loudspeaker, m).taps, 16000);
      for (std::size_t i = 0; i < want.size(); ++i) want[i] += part[i];
    }
    EXPECT_LT(rel_error(render_noise_at_mic(s, tfs, m, 16000).samples, want), 1e-9);
  }
  TransferFunctionSet broken = tfs;
  broken.hrtf[s.sources[0].loudspeaker - 1][0].taps.clear();
  EXPECT_THROW(render_noise_at_mic(s, broken, Mic::kIec, 16000), DataError);
}

TEST(Alpha, Identities) {
  EXPECT_DOUBLE_EQ(compute_alpha(LevelDb(-26.0), LevelDb(-36.0), 10.0), 1.0);
  EXPECT_NEAR(compute_alpha(LevelDb(-26.0), LevelDb(-26.0), 20.0) * 10.0,
              compute_alpha(LevelDb(-26.0), LevelDb(-26.0), 0.0), 1e-12);
  EXPECT_DOUBLE_EQ(compute_alpha(LevelDb(-26.0), LevelDb(-26.0), 0.0), 1.0);
  EXPECT_THROW(compute_alpha(LevelDb::silence(), LevelDb(-20.0), 0.0), DataError);
  EXPECT_THROW(compute_alpha(LevelDb(-20.0), LevelDb::silence(), 0.0), DataError);
}

TEST(Alpha, RemeasuredSnrAtMinus26) {
  // Scale a speech-like item and a noise to exactly -26 dB each.
  AudioBuffer x = speech_like(3);
  const double gx = std::pow(10.0, (-26.0 - active_speech_level(x).value()) / 20.0);
  for (auto& v : x.samples) v *= gx;
  AudioBuffer n(white_noise(x.size(), 4));
  const double gn = std::pow(10.0, (-26.0 - rms_level_db(n).value()) / 20.0);
  for (auto& v : n.samples) v *= gn;
  const double alpha = compute_alpha(x, n, 0.0);
  EXPECT_NEAR(alpha, 1.0, 1e-3);
  EXPECT_NEAR(20 * std::log10(alpha),
              active_speech_level(x).value() - rms_level_db(n).value(), 1e-9);
  for (auto& v : n.samples) v *= alpha;
  EXPECT_NEAR(active_speech_level(x).value() - rms_level_db(n).value(), 0.0, 0.05);
}

TEST(Synthesize, ZeroAlphaGivesCleanOwnVoice) {
  const auto tfs = synthetic_transfer_functions("S1", 1);
  const auto bank = synthetic_noise_bank(Split::kTrain, 2);
  Rng rng(3);
  const auto s = compose_scenario(NoiseType::kSsn, bank, rng);
  MixSpec spec;
  spec.alpha_override = 0.0;
  const auto r = synthesize_utterance(speech_like(1), tfs, s, spec, rng);
  for (int m = 0; m < 3; ++m) EXPECT_EQ(r.mix[m].samples, r.clean[m].samples);
}

TEST(Synthesize, DegenerateIdentitySystem) {
  const auto tfs = identity_tfs();
  const AudioBuffer x = speech_like(2);
  const AudioBuffer v(white_noise(x.size(), 3, 0.05));
  NoiseScenario s{NoiseType::kTv, {{"v", 1, v}}};
  MixSpec spec;
  spec.target_snr_db = active_speech_level(x).value() - rms_level_db(v).value();
  Rng rng(1);
  const auto r = synthesize_utterance(x, tfs, s, spec, rng);
  EXPECT_NEAR(r.alpha, 1.0, 1e-12);
  for (std::size_t i = 0; i < x.size(); ++i) {
    ASSERT_NEAR(r.at(Mic::kFront).samples[i], x.samples[i] + v.samples[i], 1e-12);
  }
}

TEST(Synthesize, SnrDecompositionAndSharedAlpha) {
  const auto tfs = synthetic_transfer_functions("S2", 5);
  const auto bank = synthetic_noise_bank(Split::kTrain, 6);
  Rng rng(7);
  for (NoiseType t : kAllNoiseTypes) {
    for (double snr : {-15.0, 0.0, 18.0}) {
      const auto s = compose_scenario(t, bank, rng);
      MixSpec spec;
      spec.target_snr_db = snr;
      spec.perturb = true;
      const auto r = synthesize_utterance(speech_like(11), tfs, s, spec, rng);
      const double got = active_speech_level(r.clean[1]).value() - rms_level_db(r.noise[1]).value();
      EXPECT_NEAR(got, snr, 0.05) << noise_type_name(t);
      for (int m = 0; m < 3; ++m) {
        // y_m - x_m is exactly the scaled noise component.
        for (std::size_t i = 0; i < r.mix[m].size(); i += 97) {
          ASSERT_EQ(r.mix[m].samples[i], r.clean[m].samples[i] + r.noise[m].samples[i]);
        }
      }
    }
  }
}

TEST(Synthesize, PerturbationOffIsReproducible) {
  const auto tfs = synthetic_transfer_functions("S3", 8);
  const auto bank = synthetic_noise_bank(Split::kVal, 9);
  const AudioBuffer x = speech_like(4);
  auto render = [&](std::uint64_t seed) {
    Rng rng(seed);
    const auto s = compose_scenario(NoiseType::kBabble, bank, rng);
    MixSpec spec;
    spec.target_snr_db = 5.0;
    return synthesize_utterance(x, tfs, s, spec, rng);
  };
  const auto a = render(10), b = render(10), c = render(11);
  for (int m = 0; m < 3; ++m) EXPECT_EQ(a.mix[m].samples, b.mix[m].samples);
  EXPECT_NE(a.mix[0].samples, c.mix[0].samples);
}

double flatness(const std::vector<double>& mag) {
  double lg = 0.0, ar = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 1; k + 1 < mag.size(); ++k) {
    const double p = mag[k] * mag[k];
    lg += std::log(p);
    ar += p;
    ++n;
  }
  return std::exp(lg / n) / (ar / n);
}

TEST(Ssn, FlatReferenceGivesWhiteNoise) {
  Rng rng(1);
  const auto n = make_ssn(std::vector<double>(257, 1.0), 5 * kSampleRate, rng);
  EXPECT_NEAR(rms_level_db(n).value(), -20.0, 1e-6);
  EXPECT_GT(flatness(long_term_spectrum({n}, 512)), 0.9);
}

TEST(Ssn, MatchesSpeechSpectrumPerThirdOctave) {
  // Bins finer than the narrowest band (29 Hz at 125 Hz).
  constexpr std::size_t kFft = 2048;
  std::vector<AudioBuffer> speech;
  for (std::uint64_t s = 0; s < 8; ++s) speech.push_back(speech_like(100 + s));
  const auto ref = long_term_spectrum(speech, kFft);
  Rng rng(2);
  const auto n = make_ssn(ref, 10 * kSampleRate, rng);
  const auto got = long_term_spectrum({n}, kFft);
  std::vector<double> dev;
  double ref_total = 0.0, got_total = 0.0;
  std::vector<std::tuple<double, double, double>> bands;
  for (double fc = 125.0; fc <= 6300.0; fc *= std::pow(2.0, 1.0 / 3.0)) {
    const double lo = fc / std::pow(2.0, 1.0 / 6.0), hi = fc * std::pow(2.0, 1.0 / 6.0);
    double pr = 0.0, pg = 0.0;
    for (std::size_t k = 0; k < ref.size(); ++k) {
      const double f = k * static_cast<double>(kSampleRate) / kFft;
      if (f >= lo && f < hi) {
        pr += ref[k] * ref[k];
        pg += got[k] * got[k];
      }
    }
    if (pr > 0.0) {
      bands.emplace_back(fc, pr, pg);
      ref_total += pr;
      got_total += pg;
    }
  }
  ASSERT_GT(bands.size(), 10u);
  for (const auto& [fc, pr, pg] : bands) {
    EXPECT_LE(std::abs(10 * std::log10((pg / got_total) / (pr / ref_total))), 3.0) << fc << " Hz";
  }
}

TEST(Ssn, SeedsAreUncorrelated) {
  std::vector<AudioBuffer> speech{speech_like(1), speech_like(2)};
  const auto ref = long_term_spectrum(speech, 512);
  Rng a(1), b(2);
  const auto x = make_ssn(ref, 2 * kSampleRate, a).samples;
  const auto y = make_ssn(ref, 2 * kSampleRate, b).samples;
  double ex = 0.0, ey = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    ex += x[i] * x[i];
    ey += y[i] * y[i];
  }
  double peak = 0.0;
  for (int lag = -50; lag <= 50; ++lag) {
    double c = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const long j = static_cast<long>(i) + lag;
      if (j >= 0 && j < static_cast<long>(y.size())) c += x[i] * y[j];
    }
    peak = std::max(peak, std::abs(c) / std::sqrt(ex * ey));
  }
  EXPECT_LT(peak, 0.05);
  EXPECT_THROW(make_ssn(std::vector<double>(257, 0.0), 100, a), DataError);
}

}  // namespace
}  // namespace ovkws
