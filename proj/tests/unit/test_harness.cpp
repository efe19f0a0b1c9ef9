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
#include <fstream>
#include <random>
#include <sstream>

#include "ovkws/checkpoint.hpp"
#include "ovkws/error.hpp"
#include "ovkws/harness.hpp"
#include "ovkws/optim.hpp"
#include "ovkws/stats.hpp"
#include "test_util.hpp"

namespace ovkws {
namespace {

// Class k has a bright band around mel bin 8 + 10 k on top of noise.
ExampleSet toy_set(std::size_t per_class, std::size_t classes, std::uint64_t seed,
                   std::size_t frames = 16) {
  Rng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  ExampleSet out;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t k = 0; k < classes; ++k) {
      Example e;
      e.label = static_cast<int>(k);
      e.snr_db = i % 2 == 0 ? -5.0 : 5.0;
      e.utt_id = "toy_" + std::to_string(k) + "_" + std::to_string(i);
      e.features.channels = 1;
      e.features.bins = 40;
      e.features.frames = frames;
      e.features.values.resize(40 * frames);
      for (std::size_t b = 0; b < 40; ++b) {
        const double bump = (b >= 8 + 10 * k && b < 12 + 10 * k) ? 3.0 : 0.0;
        for (std::size_t t = 0; t < frames; ++t) {
          e.features.at(0, b, t) = static_cast<float>(-5.0 + bump + noise(rng));
        }
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

TrainConfig toy_config(std::size_t classes, std::size_t epochs) {
  TrainConfig c;
  c.epochs = epochs;
  c.warmup_epochs = 1;
  c.batch_size = 8;
  c.tau = 1.0;
  c.num_classes = classes;
  c.seed = 3;
  return c;
}

std::vector<float> flat_state(BcResNet<float>& m) {
  std::vector<float> out;
  for (auto* p : m.parameters()) out.insert(out.end(), p->value.data.begin(), p->value.data.end());
  for (auto* b : m.buffers()) out.insert(out.end(), b->value.data.begin(), b->value.data.end());
  return out;
}

TEST(Stats, ConfidenceInterval) {
  const std::vector<double> flat(5, 50.0);
  const auto a = confidence_interval(flat);
  EXPECT_DOUBLE_EQ(a.mean, 50.0);
  EXPECT_DOUBLE_EQ(a.halfwidth, 0.0);

  const std::vector<double> ramp{1, 2, 3, 4, 5};
  EXPECT_NEAR(student_t_quantile(0.975, 4), 2.7764451051977987, 1e-12);
  const auto b = confidence_interval(ramp);
  EXPECT_DOUBLE_EQ(b.mean, 3.0);
  EXPECT_NEAR(b.halfwidth, 1.9632431614775607, 1e-12);
  EXPECT_NEAR(sample_stddev(ramp), std::sqrt(2.5), 1e-15);

  try {
    confidence_interval(std::vector<double>{1.0});
    FAIL();
  } catch (const DataError& e) {
    EXPECT_STREQ(e.what(), "insufficient seeds");
  }
  EXPECT_DOUBLE_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_DOUBLE_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
}

ExampleSet labelled_grid(const std::vector<NoiseType>& noises, const std::vector<double>& snrs,
                         std::size_t per_class) {
  ExampleSet out;
  for (NoiseType n : noises) {
    for (double s : snrs) {
      for (int k = 0; k < kNumClasses; ++k) {
        for (std::size_t i = 0; i < per_class; ++i) {
          Example e;
          e.label = k;
          e.snr_db = s;
          e.noise = n;
          out.push_back(std::move(e));
        }
      }
    }
  }
  return out;
}

const std::vector<double> kTestGrid{-18, -9, 0, 9, 18};

TEST(Evaluate, ChanceAndOracle) {
  const auto ex = labelled_grid({NoiseType::kBabble, NoiseType::kTv}, kTestGrid, 3);
  const auto constant = evaluate(std::vector<int>(ex.size(), 4), ex, kTestGrid);
  std::vector<int> truth;
  for (const auto& e : ex) truth.push_back(e.label);
  const auto oracle = evaluate(truth, ex, kTestGrid);
  ASSERT_EQ(constant.cells.size(), 5u);
  for (double s : kTestGrid) {
    for (NoiseGroup g : {NoiseGroup::kSeen, NoiseGroup::kUnseen}) {
      EXPECT_NEAR(*constant.cell(s, g).accuracy(), 100.0 / 12.0, 1e-9);
      EXPECT_DOUBLE_EQ(*oracle.cell(s, g).accuracy(), 100.0);
    }
  }
  EXPECT_DOUBLE_EQ(*oracle.overall.accuracy(), 100.0);
}

TEST(Evaluate, EmptyCellsAreAbsent) {
  const auto ex = labelled_grid({NoiseType::kMusic}, {-9, 9}, 1);
  std::vector<int> truth;
  for (const auto& e : ex) truth.push_back(e.label);
  const auto r = evaluate(truth, ex, kTestGrid);
  ASSERT_EQ(r.cells.size(), 5u);
  EXPECT_TRUE(r.cell(-9, NoiseGroup::kSeen).accuracy().has_value());
  EXPECT_FALSE(r.cell(-9, NoiseGroup::kUnseen).accuracy().has_value());
  EXPECT_FALSE(r.cell(0, NoiseGroup::kSeen).accuracy().has_value());
  EXPECT_EQ(r.cell(0, NoiseGroup::kSeen).total, 0u);
}

TEST(Evaluate, InvariantToRowOrder) {
  auto ex = labelled_grid({NoiseType::kSsn, NoiseType::kInterferer}, kTestGrid, 2);
  std::vector<int> pred;
  for (std::size_t i = 0; i < ex.size(); ++i) pred.push_back(static_cast<int>((i * 7) % 12));
  const auto a = evaluate(pred, ex, kTestGrid);
  std::vector<std::size_t> perm(ex.size());
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng(1);
  std::shuffle(perm.begin(), perm.end(), rng);
  ExampleSet ex2;
  std::vector<int> pred2;
  for (std::size_t i : perm) {
    ex2.push_back(ex[i]);
    pred2.push_back(pred[i]);
  }
  const auto b = evaluate(pred2, ex2, kTestGrid);
  for (double s : kTestGrid) {
    for (int g = 0; g < 2; ++g) {
      EXPECT_EQ(a.cells.at(s)[g].correct, b.cells.at(s)[g].correct);
      EXPECT_EQ(a.cells.at(s)[g].total, b.cells.at(s)[g].total);
    }
  }
  EXPECT_THROW(evaluate(std::vector<int>(3, 0), ex, kTestGrid), DataError);
}

TEST(Evaluate, SeedSummary) {
  const auto ex = labelled_grid({NoiseType::kBabble, NoiseType::kTv}, kTestGrid, 2);
  std::vector<EvalReport> reports;
  for (int seed = 0; seed < 5; ++seed) {
    std::vector<int> pred;
    for (std::size_t i = 0; i < ex.size(); ++i) {
      pred.push_back((i + static_cast<std::size_t>(seed)) % 3 == 0 ? ex[i].label : -1);
    }
    reports.push_back(evaluate(pred, ex, kTestGrid));
  }
  const auto s = summarize_seeds("I+F", reports, 0.0123);
  for (double snr : kTestGrid) {
    for (const auto& cell : s.cells.at(snr)) {
      ASSERT_EQ(cell.per_seed.size(), 5u);
      ASSERT_TRUE(cell.ci.has_value());
      const auto [lo, hi] = std::minmax_element(cell.per_seed.begin(), cell.per_seed.end());
      EXPECT_GE(cell.ci->mean, *lo);
      EXPECT_LE(cell.ci->mean, *hi);
      EXPECT_GE(cell.ci->halfwidth, 0.0);
    }
  }
  const auto table = s.table();
  EXPECT_NE(table.find("[I+F]"), std::string::npos);
  EXPECT_NE(table.find("-18 dB"), std::string::npos);
  EXPECT_NE(table.find("RTF"), std::string::npos);
  const auto jsonl = s.jsonl();
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 11);

  const auto single = summarize_seeds("I", {reports[0]});
  EXPECT_FALSE(single.overall.ci.has_value());
  EXPECT_EQ(single.overall.mean, reports[0].overall.accuracy());
  EXPECT_EQ(single.overall.per_seed.size(), 1u);
}

TEST(Batch, Shapes) {
  const auto set = toy_set(2, 3, 1);
  const auto b = make_batch(set, {5, 0, 3}, 1, 2);
  EXPECT_EQ(b.shape, (Shape{2, 1, 40, 16}));
  EXPECT_EQ(b[0], set[0].features.values[0]);
  EXPECT_EQ(b[40 * 16], set[3].features.values[0]);
}

TEST(Features, MicStackingOrder) {
  std::array<AudioBuffer, 3> sig{AudioBuffer(test::white_noise(16000, 1)),
                                 AudioBuffer(test::white_noise(16000, 2)),
                                 AudioBuffer(test::white_noise(16000, 3))};
  const auto rf = mic_features(sig, {Mic::kRear, Mic::kFront});
  ASSERT_EQ(rf.channels, 2u);
  EXPECT_EQ(rf.at(0, 3, 3), log_mel(sig[1]).at(0, 3, 3));
  EXPECT_EQ(rf.at(1, 3, 3), log_mel(sig[2]).at(0, 3, 3));
}

TEST(Train, DeterministicAndSeedSensitive) {
  const auto set = toy_set(8, 3, 2);
  auto cfg = toy_config(3, 2);
  auto a = train(cfg, set);
  auto b = train(cfg, set);
  EXPECT_EQ(flat_state(a.final_model), flat_state(b.final_model));
  cfg.seed = 4;
  auto c = train(cfg, set);
  EXPECT_NE(flat_state(a.final_model), flat_state(c.final_model));
}

TEST(Train, LearningRateTraceFollowsSchedule) {
  const auto set = toy_set(8, 3, 2);  // 24 items, 3 steps per epoch
  const auto cfg = toy_config(3, 3);
  const auto r = train(cfg, set);
  ASSERT_EQ(r.steps.size(), 9u);
  LrSchedule sched{cfg.epochs, cfg.warmup_epochs, cfg.peak_lr, 0.0};
  for (std::size_t s = 0; s < r.steps.size(); ++s) {
    const double epoch = static_cast<double>(s / 3) + static_cast<double>(s % 3) / 3.0;
    EXPECT_DOUBLE_EQ(r.steps[s].epoch, epoch);
    EXPECT_DOUBLE_EQ(r.steps[s].lr, lr_at_epoch(epoch, sched));
  }
  ASSERT_EQ(r.epochs.size(), 3u);
  EXPECT_EQ(r.epochs.back().step, 9u);
}

TEST(Train, WritesCheckpointsAndLog) {
  test::TempDir dir;
  const auto set = toy_set(6, 3, 5);
  const auto val = toy_set(2, 3, 6);
  auto cfg = toy_config(3, 3);
  cfg.out_dir = dir.path();
  std::ostringstream log;
  const auto r = train(cfg, set, &val, &log);
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "final.ckpt"));
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "best.ckpt"));
  std::ifstream in(dir.path() / "train_log.jsonl");
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    for (const char* key : {"\"epoch\"", "\"step\"", "\"lr\"", "\"loss\"", "\"val_acc\""}) {
      EXPECT_NE(line.find(key), std::string::npos) << line;
    }
  }
  EXPECT_EQ(lines, 3u);
  ASSERT_TRUE(r.best_val_acc.has_value());
  for (const auto& e : r.epochs) EXPECT_LE(*e.val_acc, *r.best_val_acc);
}

TEST(Train, Errors) {
  const auto set = toy_set(4, 2, 1);
  try {
    train(toy_config(3, 1), set);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("class coverage failure"), std::string::npos);
  }
  auto cfg = toy_config(3, 2);
  cfg.peak_lr = 1e30;
  EXPECT_THROW(train(cfg, toy_set(4, 3, 1)), DivergenceError);
  cfg = toy_config(3, 2);
  cfg.warmup_epochs = 3;
  EXPECT_THROW(train(cfg, toy_set(4, 3, 1)), ConfigError);
  cfg = toy_config(3, 2);
  cfg.mics = {Mic::kFront, Mic::kFront};
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg.mics.clear();
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Checkpoint, BitExactReload) {
  test::TempDir dir;
  ModelConfig mc;
  mc.tau = 1.5;
  mc.in_channels = 2;
  BcResNet<float> model(mc, 21);
  {
    Graph<float> g(Mode::kTrain, 1);
    Tensor<float> x({2, 2, 40, 10}, 0.5f);
    for (std::size_t i = 0; i < x.numel(); ++i) x[i] = static_cast<float>(std::sin(0.1 * i));
    model.forward(g, g.input(x));
  }
  const auto path = dir.path() / "m.ckpt";
  save_checkpoint(path, model, {{"seed", "21"}, {"note", "unit"}});
  EXPECT_TRUE(std::filesystem::exists(checkpoint_index_path(path)));
  CheckpointMeta meta;
  auto back = load_checkpoint(path, &meta);
  EXPECT_EQ(meta.at("seed"), "21");
  EXPECT_EQ(back.config().tau, 1.5);
  EXPECT_EQ(back.config().in_channels, 2u);
  EXPECT_EQ(flat_state(back), flat_state(model));
  const Tensor<float> probe({1, 2, 40, 10}, -3.0f);
  EXPECT_EQ(back.infer(probe).data, model.infer(probe).data);

  std::filesystem::resize_file(path, 100);
  EXPECT_THROW(load_checkpoint(path), DataError);
  EXPECT_ANY_THROW(load_checkpoint(dir.path() / "missing.ckpt"));
}

TEST(Rtf, MeasurementAndErrors) {
  BcResNet<float> model(ModelConfig{1.0, 1, 12, 40, 5, 0.1}, 1);
  const std::vector<AudioBuffer> one{AudioBuffer(test::white_noise(16000, 1))};
  RtfOptions opt;
  opt.trials = 10;
  opt.warmup = 1;
  const auto r = measure_rtf(model, one, opt);
  EXPECT_EQ(r.trial_rtfs.size(), 10u);
  EXPECT_GT(r.rtf, 0.0);
  EXPECT_LT(r.rtf, 1.0);

  opt.trials = 9;
  EXPECT_THROW(measure_rtf(model, one, opt), ConfigError);
  opt.trials = 10;
  EXPECT_THROW(measure_rtf(model, {AudioBuffer()}, opt), DataError);
  EXPECT_THROW(measure_rtf(model, {one[0], one[0]}, opt), ConfigError);
}

}  // namespace
}  // namespace ovkws
