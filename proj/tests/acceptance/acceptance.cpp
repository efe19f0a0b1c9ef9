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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ovkws/bcresnet.hpp"
#include "ovkws/dataset.hpp"
#include "ovkws/dsp.hpp"
#include "ovkws/error.hpp"
#include "ovkws/harness.hpp"
#include "ovkws/layers.hpp"
#include "ovkws/mel.hpp"
#include "ovkws/ops.hpp"
#include "ovkws/optim.hpp"
#include "ovkws/scene.hpp"
#include "ovkws/stats.hpp"
#include "ovkws/synthetic.hpp"
#include "ovkws/tf_lab.hpp"

namespace fs = std::filesystem;

namespace ovkws::acceptance {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> gaussian(std::size_t n, Rng& rng, double sigma = 1.0) {
  std::normal_distribution<double> d(0.0, sigma);
  std::vector<double> x(n);
  for (auto& v : x) v = d(rng);
  return x;
}

std::vector<double> decaying_ir(std::size_t taps, Rng& rng) {
  auto h = gaussian(taps, rng);
  for (std::size_t i = 0; i < taps; ++i) h[i] *= std::exp(-3.0 * static_cast<double>(i) / taps);
  return h;
}

double norm2(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

double rel_diff(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  const double scale = std::max(norm2(a), norm2(b));
  return scale == 0.0 ? 0.0 : norm2(d) / scale;
}

class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    path_ = fs::temp_directory_path() / ("ovkws_acc_" + tag + "_" + std::to_string(std::random_device{}()));
    fs::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

// ---------------------------------------------------------------------------

Outcome parameter_anchors() {
  const std::size_t anchors[3] = {54168, 55368, 56568};
  std::string detail;
  bool ok = true;
  for (std::size_t c = 1; c <= 3; ++c) {
    ModelConfig m;
    m.tau = 3.0;
    m.in_channels = c;
    const std::size_t got = count_params(m);
    ok = ok && got == anchors[c - 1];
    detail += (c > 1 ? "/" : "") + std::to_string(got);
  }
  std::size_t laws = 0;
  for (double tau : {1.0, 1.5, 2.0, 3.0, 6.0, 8.0}) {
    for (std::size_t c = 1; c < 3; ++c) {
      ModelConfig a, b;
      a.tau = b.tau = tau;
      a.in_channels = c;
      b.in_channels = c + 1;
      const auto delta = static_cast<long long>(count_params(b)) - static_cast<long long>(count_params(a));
      const bool holds = delta == std::llround(25 * 16 * tau);
      ok = ok && holds;
      laws += holds;
    }
  }
  return {ok, "tau 3 counts " + detail + ", stem delta 400*tau holds in " + std::to_string(laws) +
                  "/12 cases"};
}

// Finite-difference check of sum(w * f(x)) against the tape, in double.
using Net = std::function<Var(Graph<double>&, Var)>;

double layer_check(const Net& net, Tensor<double> x, std::vector<Parameter<double>*> params, Mode mode,
                   std::uint64_t seed) {
  const double h = 1e-5;
  Tensor<double> w;
  auto loss = [&](const Tensor<double>& in, Tensor<double>* in_grad) {
    Graph<double> g(mode, seed);
    const Var v = g.input(in, true);
    const Var out = net(g, v);
    if (w.empty()) {
      Rng r(seed + 1);
      w = Tensor<double>(g.value(out).shape);
      for (auto& e : w.data) e = std::normal_distribution<double>(0.0, 1.0)(r);
    }
    const Var l = weighted_sum(g, out, w);
    if (in_grad) {
      g.backward(l);
      *in_grad = g.grad(v);
    }
    return g.value(l)[0];
  };
  auto fd = [&](double& slot) {
    const double keep = slot;
    slot = keep + h;
    const double lp = loss(x, nullptr);
    slot = keep - h;
    const double lm = loss(x, nullptr);
    slot = keep;
    return (lp - lm) / (2 * h);
  };
  for (auto* p : params) p->zero_grad();
  Tensor<double> gx;
  loss(x, &gx);
  std::vector<double> num(x.numel());
  for (std::size_t i = 0; i < x.numel(); ++i) num[i] = fd(x[i]);
  double worst = rel_diff(gx.data, num);
  for (auto* p : params) {
    std::vector<double> pn(p->value.numel());
    for (std::size_t i = 0; i < pn.size(); ++i) pn[i] = fd(p->value[i]);
    worst = std::max(worst, rel_diff(p->grad.data, pn));
  }
  return worst;
}

// Per-coordinate check of the composed model under cross-entropy; samples
// coordinates from every parameter tensor and the input.
double model_check(std::uint64_t seed) {
  Rng rng(seed);
  ModelConfig cfg;
  cfg.tau = 1.0;
  cfg.in_channels = 1 + seed % 3;
  cfg.num_classes = 3 + seed % 10;
  BcResNet<double> model(cfg, seed);
  const std::size_t n = 2, frames = 8 + seed % 9;
  Tensor<double> x({n, cfg.in_channels, 40, frames});
  for (auto& v : x.data) v = std::normal_distribution<double>(0.0, 1.0)(rng);
  std::vector<int> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back(static_cast<int>(rng() % cfg.num_classes));

  auto loss = [&](Tensor<double>* in_grad) {
    Graph<double> g(Mode::kTrain, seed + 100);
    const Var v = g.input(x, true);
    const Var l = cross_entropy(g, model.forward(g, v), labels);
    if (in_grad) {
      g.backward(l);
      *in_grad = g.grad(v);
    }
    return g.value(l)[0];
  };
  auto params = model.parameters();
  for (auto* p : params) p->zero_grad();
  Tensor<double> gx;
  loss(&gx);

  // Batch norm couples every activation to every coordinate, so a larger
  // step moves some ReLU input across zero on most probes.
  const double h = 1e-7;
  std::vector<double> analytic, numeric;
  auto probe = [&](double& slot, double grad) {
    const double keep = slot;
    slot = keep + h;
    const double lp = loss(nullptr);
    slot = keep - h;
    const double lm = loss(nullptr);
    slot = keep;
    analytic.push_back(grad);
    numeric.push_back((lp - lm) / (2 * h));
  };
  for (auto* p : params) {
    std::uniform_int_distribution<std::size_t> pick(0, p->value.numel() - 1);
    for (int k = 0; k < 3; ++k) {
      const std::size_t i = pick(rng);
      probe(p->value[i], p->grad[i]);
    }
  }
  std::uniform_int_distribution<std::size_t> pick(0, x.numel() - 1);
  for (int k = 0; k < 30; ++k) {
    const std::size_t i = pick(rng);
    probe(x[i], gx[i]);
  }
  return rel_diff(analytic, numeric);
}

Outcome gradient_suite() {
  constexpr int kInstances = 20;
  struct Kind {
    std::string name;
    std::function<std::pair<LayerSpec, Shape>(Rng&)> make;
  };
  auto pick = [](Rng& r, std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(r);
  };
  const std::vector<Kind> kinds = {
      {"conv2d",
       [&](Rng& r) {
         const std::size_t ci = pick(r, 1, 3), co = pick(r, 1, 3), kh = pick(r, 1, 3), kw = pick(r, 1, 3);
         const std::size_t sh = pick(r, 1, 2), sw = pick(r, 1, 2), dh = pick(r, 1, 2), dw = pick(r, 1, 2);
         const std::size_t ph = pick(r, 0, 2), pw = pick(r, 0, 2);
         return std::pair{LayerSpec::conv2d(ci, co, {kh, kw}, {sh, sw}, {ph, pw}, {dh, dw}, r() % 2 == 0),
                          Shape{2, ci, 7, 7}};
       }},
      {"depthwise",
       [&](Rng& r) {
         const std::size_t c = pick(r, 1, 4), kh = pick(r, 1, 3), kw = pick(r, 1, 3);
         const std::size_t dh = pick(r, 1, 2), dw = pick(r, 1, 2);
         return std::pair{LayerSpec::depthwise(c, {kh, kw}, {pick(r, 1, 2), 1}, {pick(r, 0, 2), pick(r, 0, 2)},
                                               {dh, dw}),
                          Shape{2, c, 7, 7}};
       }},
      {"pointwise",
       [&](Rng& r) {
         const std::size_t ci = pick(r, 1, 4);
         return std::pair{LayerSpec::pointwise(ci, pick(r, 1, 4), r() % 2 == 0), Shape{2, ci, 3, 4}};
       }},
      {"batch_norm",
       [&](Rng& r) {
         const std::size_t c = pick(r, 1, 4);
         return std::pair{LayerSpec::batch_norm(c), Shape{pick(r, 2, 4), c, pick(r, 1, 4), pick(r, 2, 4)}};
       }},
      {"subspectral_norm",
       [&](Rng& r) {
         const std::size_t c = pick(r, 1, 3), s = pick(r, 1, 5);
         return std::pair{LayerSpec::subspectral_norm(c, s), Shape{pick(r, 2, 3), c, s * pick(r, 2, 3), pick(r, 2, 4)}};
       }},
      {"relu", [&](Rng& r) { return std::pair{LayerSpec::relu(), Shape{2, pick(r, 1, 3), 3, 4}}; }},
      {"swish", [&](Rng& r) { return std::pair{LayerSpec::swish(), Shape{2, pick(r, 1, 3), 3, 4}}; }},
      {"avg_pool", [&](Rng& r) { return std::pair{LayerSpec::avg_pool(), Shape{2, pick(r, 1, 3), 3, 4}}; }},
      {"dropout",
       [&](Rng& r) { return std::pair{LayerSpec::dropout(0.1 * pick(r, 1, 5)), Shape{3, pick(r, 2, 4), 3, 4}}; }},
      {"classifier_head",
       [&](Rng& r) {
         const std::size_t c = pick(r, 1, 4);
         return std::pair{LayerSpec::classifier_head(c, pick(r, 2, 5)), Shape{2, c, 1, 1}};
       }},
  };

  double worst = 0.0;
  std::string worst_name;
  std::size_t checks = 0;
  for (const auto& k : kinds) {
    for (int i = 0; i < kInstances; ++i) {
      Rng r(derive_seed({hash_string(k.name), static_cast<std::uint64_t>(i)}));
      auto [spec, shape] = k.make(r);
      Layer<double> layer("probe", spec, r);
      for (auto* p : layer.parameters()) {
        for (auto& v : p->value.data) v += 0.3 * std::normal_distribution<double>(0.0, 1.0)(r);
      }
      Tensor<double> x(shape);
      for (auto& v : x.data) {
        do v = std::normal_distribution<double>(0.0, 1.0)(r);
        while (std::abs(v) < 1e-3);
      }
      const bool norm = spec.kind == LayerKind::kBatchNorm || spec.kind == LayerKind::kSubSpectralNorm;
      const Mode mode = norm && i % 2 == 1 ? Mode::kEval : Mode::kTrain;
      const double e = layer_check([&](Graph<double>& g, Var v) { return layer.forward(g, v); }, x,
                                   layer.parameters(), mode, r());
      ++checks;
      if (e > worst) {
        worst = e;
        worst_name = k.name;
      }
    }
  }
  double model_worst = 0.0;
  for (int i = 0; i < kInstances; ++i) {
    model_worst = std::max(model_worst, model_check(1000 + static_cast<std::uint64_t>(i)));
  }
  const bool ok = worst <= 1e-4 && model_worst <= 1e-4;
  return {ok, std::to_string(checks) + " layer instances over " + std::to_string(kinds.size()) +
                  " kinds, worst " + fmt("%.2e", worst) + " (" + worst_name + "); " +
                  std::to_string(kInstances) + " tau-1 models, worst " + fmt("%.2e", model_worst)};
}

Outcome snr_round_trip() {
  const std::vector<double> grid{-18, -15, -9, -5, 0, 5, 9, 15, 18, 25};
  SyntheticCorpusOptions copt;
  copt.words = {"yes", "no", "up", "down", "left"};
  copt.speakers = {20, 0, 0};
  copt.corrupted_fraction = 0.0;
  const auto corpus = synthetic_corpus(copt, 31);
  const auto tfs = synthetic_transfer_functions("acc", 32);
  const auto bank = synthetic_noise_bank(Split::kTest, 33);
  Rng rng(34);
  double worst = 0.0;
  std::size_t mixes = 0;
  for (std::size_t u = 0; u < 100; ++u) {
    const AudioBuffer x = corpus[u % corpus.size()].load();
    for (NoiseType t : kAllNoiseTypes) {
      for (double snr : grid) {
        const auto scenario = compose_scenario(t, bank, rng);
        MixSpec spec;
        spec.target_snr_db = snr;
        spec.perturb = true;
        const auto r = synthesize_utterance(x, tfs, scenario, spec, rng);
        const int f = static_cast<int>(Mic::kFront);
        const double got = active_speech_level(r.clean[f]).value() - rms_level_db(r.noise[f]).value();
        worst = std::max(worst, std::abs(got - snr));
        ++mixes;
      }
    }
  }
  return {worst <= 0.05, std::to_string(mixes) + " mixes (100 utterances x 5 noises x 10 SNRs), worst |error| " +
                             fmt("%.2e", worst) + " dB"};
}

Outcome convolution_oracle() {
  Rng rng(41);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12000)(rng);
    const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 600)(rng);
    const auto a = gaussian(n, rng), b = gaussian(m, rng);
    std::vector<double> want(n + m - 1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < m; ++k) want[j + k] += a[j] * b[k];
    }
    worst = std::max(worst, rel_diff(convolve_overlap_add(a, b, want.size()), want));
    worst = std::max(worst, rel_diff(convolve(a, b, want.size()), want));
  }
  return {worst <= 1e-9, "100 random pairs, worst relative error " + fmt("%.2e", worst)};
}

Outcome tf_round_trips() {
  Rng rng(51);
  double lms_worst = -1e9;
  for (int i = 0; i < 10; ++i) {
    const std::size_t taps = std::uniform_int_distribution<std::size_t>(8, 128)(rng);
    const auto h = decaying_ir(taps, rng);
    const AudioBuffer x(gaussian(100000, rng));
    const AudioBuffer y(convolve(x.view(), h, x.size()));
    LmsOptions opt;
    opt.taps = taps;
    lms_worst = std::max(lms_worst, ir_error_db(estimate_ir_lms(x, y, opt).taps, h));
  }
  const auto pair = generate_exp_sweep(20, 8000, 2.0);
  double sweep_worst = -1e9;
  for (int i = 0; i < 10; ++i) {
    const std::size_t taps = std::uniform_int_distribution<std::size_t>(8, 128)(rng);
    const auto h = decaying_ir(taps, rng);
    const AudioBuffer rec(convolve(pair.sweep.view(), h, pair.sweep.size() + h.size() - 1));
    const auto dec = deconvolve_sweep(rec, pair.inverse_filter, taps);
    sweep_worst = std::max(sweep_worst, ir_error_db(dec.ir.taps, h));
  }
  const bool ok = lms_worst <= -40.0 && sweep_worst <= -40.0;
  return {ok, "10 random IRs each; worst LMS " + fmt("%.1f", lms_worst) + " dB, worst sweep " +
                  fmt("%.1f", sweep_worst) + " dB"};
}

Outcome perturbation_stats() {
  Rng seed_rng(61);
  ImpulseResponse ir{gaussian(128, seed_rng), kSampleRate, IrKind::kHrtf};
  Rng rng(62);
  const Rng before = rng;
  const auto same = perturb_tf(ir, {0.0, 0.0, true}, rng);
  const bool identity = same.taps == ir.taps && rng == before;

  constexpr std::size_t kDraws = 100000;
  auto stats = [](const std::vector<double>& v, double centre) {
    double m = 0.0, s = 0.0;
    for (double x : v) m += x - centre;
    m /= static_cast<double>(v.size());
    for (double x : v) s += (x - centre - m) * (x - centre - m);
    return std::pair{m, std::sqrt(s / static_cast<double>(v.size() - 1))};
  };
  const ImpulseResponse ones{std::vector<double>(kDraws, 1.0), kSampleRate, IrKind::kHrtf};
  const ImpulseResponse zeros{std::vector<double>(kDraws, 0.0), kSampleRate, IrKind::kHrtf};
  const auto [gm, gs] = stats(perturb_tf(ones, {0.1, 0.0, true}, rng).taps, 1.0);
  const auto [dm, ds] = stats(perturb_tf(zeros, {0.0, 1e-5, true}, rng).taps, 0.0);
  const bool ok = identity && std::abs(gs / 0.1 - 1.0) <= 0.02 && std::abs(gm) <= 0.02 * 0.1 &&
                  std::abs(ds / 1e-5 - 1.0) <= 0.02 && std::abs(dm) <= 0.02 * 1e-5;
  return {ok, std::string(identity ? "zero sigma identical" : "zero sigma CHANGED taps") +
                  "; gamma mean " + fmt("%.1e", gm) + " sd " + fmt("%.5f", gs) + "; delta mean " +
                  fmt("%.1e", dm) + " sd " + fmt("%.3e", ds) + " over 1e5 draws"};
}

ExampleSet clean_examples(const std::vector<CleanUtterance>& corpus, std::size_t count) {
  ExampleSet out;
  for (std::size_t i = 0; i < count && i < corpus.size(); ++i) {
    Example e;
    e.features = log_mel(corpus[i].load());
    e.label = corpus[i].label;
    e.utt_id = corpus[i].id;
    out.push_back(std::move(e));
  }
  return out;
}

Outcome overfit_sanity() {
  SyntheticCorpusOptions copt;
  copt.words = {"yes", "no", "up"};
  copt.speakers = {67, 0, 0};
  copt.corrupted_fraction = 0.0;
  const auto set = clean_examples(synthetic_corpus(copt, 71), 200);

  TrainConfig cfg;
  cfg.tau = 1.0;
  cfg.num_classes = 3;
  cfg.epochs = 40;
  cfg.warmup_epochs = 2;
  cfg.batch_size = 20;
  cfg.seed = 72;
  cfg.deterministic = true;
  auto r = train(cfg, set);
  const auto pred = predict(r.final_model, set);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < set.size(); ++i) correct += pred[i] == set[i].label;
  const double acc = 100.0 * static_cast<double>(correct) / static_cast<double>(set.size());
  return {acc >= 99.0 && set.size() == 200, std::to_string(set.size()) + " utterances, 3 classes, " +
                                                 std::to_string(cfg.epochs) + " epochs: training accuracy " +
                                                 fmt("%.1f", acc) + "%"};
}

Outcome trend_reproduction() {
  SyntheticCorpusOptions copt;
  copt.words = {"yes", "no", "up"};
  copt.speakers = {30, 2, 20};
  const std::uint64_t seed = 81;
  const auto corpus = filter_clean(synthetic_corpus(copt, seed), 40.0);
  const SubjectPool pool = synthetic_subject_pool(seed + 1);
  const NoiseBanks banks = synthetic_noise_banks(seed + 2);

  DatasetConfig dcfg;
  dcfg.seed = seed + 3;
  dcfg.include_ambient = false;
  dcfg.test_snrs = {-18};
  const Manifest plan = plan_dataset(dcfg, corpus, pool);

  std::map<std::string, const CleanUtterance*> by_id;
  for (const auto& u : corpus) by_id[u.id] = &u;
  std::vector<std::array<FeatureMap, 3>> feats(plan.size());
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const auto res = render_record(plan[i], dcfg, by_id.at(plan[i].source), pool, banks);
    for (int m = 0; m < 3; ++m) feats[i][m] = log_mel(res.mix[m]);
  }
  auto examples = [&](Split split, const std::vector<Mic>& mics) {
    ExampleSet out;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      if (plan[i].split != split) continue;
      Example e;
      e.features = stack_mics(feats[i], mics);
      e.label = plan[i].label;
      e.snr_db = plan[i].snr_db;
      e.noise = plan[i].noise;
      e.utt_id = plan[i].utt_id;
      out.push_back(std::move(e));
    }
    return out;
  };

  const std::vector<std::pair<std::string, std::vector<Mic>>> configs = {
      {"I", {Mic::kIec}}, {"F", {Mic::kFront}}, {"I+F", {Mic::kIec, Mic::kFront}}};
  std::map<std::string, double> acc;
  std::string detail;
  std::size_t n_train = 0, n_test = 0;
  for (const auto& [name, mics] : configs) {
    const auto train_set = examples(Split::kTrain, mics);
    const auto test_set = examples(Split::kTest, mics);
    n_train = train_set.size();
    n_test = test_set.size();
    double sum = 0.0;
    for (std::uint64_t s = 1; s <= 3; ++s) {
      TrainConfig cfg;
      cfg.tau = 1.0;
      cfg.num_classes = 3;
      cfg.epochs = 25;
      cfg.warmup_epochs = 1;
      cfg.batch_size = 32;
      cfg.mics = mics;
      cfg.seed = s;
      auto r = train(cfg, train_set);
      const auto rep = evaluate(r.final_model, test_set, {-18.0});
      sum += *rep.overall.accuracy();
    }
    acc[name] = sum / 3.0;
    detail += (detail.empty() ? "" : ", ") + name + " " + fmt("%.1f", acc[name]) + "%";
  }
  const bool ok = acc["I"] > acc["F"] && acc["I+F"] >= acc["I"];
  return {ok, std::to_string(n_train) + " training items, " + std::to_string(n_test) +
                  " test items; mean accuracy at -18 dB over 3 seeds: " + detail};
}

Outcome schedule_and_optimizer() {
  const LrSchedule s;
  const bool anchors = lr_at_epoch(0.0, s) == 0.0 && lr_at_epoch(5.0, s) == 0.1 && lr_at_epoch(200.0, s) == 0.0;
  const double jump = std::abs(lr_at_epoch(5.0 - 1e-9, s) - lr_at_epoch(5.0 + 1e-9, s));

  const double w0 = 0.7, g1 = 0.3, g2 = -1.1, lr1 = 0.05, lr2 = 0.08, mu = 0.9, wd = 1e-3;
  Parameter<double> p{"w", Tensor<double>({1}, {w0}), Tensor<double>({1})};
  Sgd<double> opt({&p}, {mu, wd});
  p.grad[0] = g1;
  opt.step(lr1);
  p.grad[0] = g2;
  opt.step(lr2);
  const double v1 = g1 + wd * w0;
  const double w1 = w0 - lr1 * v1;
  const double v2 = mu * v1 + g2 + wd * w1;
  const double w2 = w1 - lr2 * v2;
  const double err = std::abs(p.value[0] - w2);
  const bool ok = anchors && jump <= 1e-9 && err <= 1e-12;
  return {ok, std::string("lr(0), lr(5), lr(200) ") + (anchors ? "exact" : "WRONG") + ", jump at 5 " +
                  fmt("%.1e", jump) + ", two-step momentum error " + fmt("%.1e", err)};
}

Outcome rtf_trend() {
  Rng rng(91);
  const AudioBuffer x(gaussian(kSampleRate, rng, 0.1));
  std::vector<BcResNet<float>> models;
  for (std::size_t c = 1; c <= 3; ++c) {
    ModelConfig m;
    m.tau = 3.0;
    m.in_channels = c;
    models.emplace_back(m, 92);
  }
  // Rounds interleave the mic counts so clock drift hits all three alike.
  std::vector<std::vector<double>> rounds(3);
  for (int round = 0; round < 5; ++round) {
    for (std::size_t c = 1; c <= 3; ++c) {
      rounds[c - 1].push_back(measure_rtf(models[c - 1], std::vector<AudioBuffer>(c, x)).rtf);
    }
  }
  std::vector<double> rtf;
  for (auto& r : rounds) rtf.push_back(median(r));
  const bool ok = rtf[0] < 1.0 && rtf[0] <= rtf[1] && rtf[1] <= rtf[2];
  return {ok, "tau 3 median RTF " + fmt("%.4f", rtf[0]) + " / " + fmt("%.4f", rtf[1]) + " / " +
                  fmt("%.4f", rtf[2]) + " for 1 / 2 / 3 mics"};
}

std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file()) continue;
    std::ifstream in(e.path(), std::ios::binary);
    files[fs::relative(e.path(), root).string()] =
        std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  return files;
}

Outcome synth_determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given (--cli)"};
  ScratchDir dir("synth");
  auto run = [&](const std::string& name, int threads) {
    const fs::path out = dir.path() / name;
    const std::string cmd = "\"" + cli + "\" synth --seed 11 --threads " + std::to_string(threads) +
                            " --words yes no up down left right on off stop go marvin --speakers 2 1 1 --out \"" +
                            out.string() + "\" > /dev/null";
    if (std::system(cmd.c_str()) != 0) throw std::runtime_error("synth run failed");
    return snapshot(out);
  };
  const auto a = run("a", 1), b = run("b", 1), c = run("c", 3);
  std::size_t wavs = 0;
  for (const auto& [k, v] : a) wavs += k.ends_with(".wav");
  const bool ok = !a.empty() && a.count("manifest.txt") == 1 && wavs > 0 && a == b && a == c;
  return {ok, std::to_string(a.size()) + " files (" + std::to_string(wavs) + " wav) " +
                  (ok ? "bit-identical" : "DIFFER") + " across two 1-thread runs and a 3-thread run"};
}

Outcome ci_arithmetic() {
  const std::vector<double> v{1, 2, 3, 4, 5};
  const auto ci = confidence_interval(v);
  // t(0.975, 4) from published tables; sample sd of 1..5 is sqrt(2.5).
  const double oracle = 2.7764451051977987 * std::sqrt(2.5) / std::sqrt(5.0);
  const std::vector<double> flat{0.7, 0.7, 0.7, 0.7};
  const auto zero = confidence_interval(flat);
  const bool ok = std::abs(ci.halfwidth - oracle) <= 1e-9 && std::abs(ci.halfwidth - 1.963) <= 0.001 &&
                  ci.mean == 3.0 && zero.halfwidth == 0.0;
  return {ok, "halfwidth " + fmt("%.6f", ci.halfwidth) + " (oracle " + fmt("%.6f", oracle) +
                  "), zero-variance halfwidth " + fmt("%g", zero.halfwidth)};
}

}  // namespace
}  // namespace ovkws::acceptance

int main(int argc, char** argv) {
  using namespace ovkws::acceptance;
  std::string cli;
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) cli = argv[++i];
    else only.push_back(std::atoi(a.c_str()));
  }
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"parameter anchors", parameter_anchors},
      {"gradient suite", gradient_suite},
      {"SNR round-trip", snr_round_trip},
      {"convolution oracle", convolution_oracle},
      {"TF-lab round-trips", tf_round_trips},
      {"perturbation identity and statistics", perturbation_stats},
      {"overfit sanity", overfit_sanity},
      {"microphone trend", trend_reproduction},
      {"schedule and optimizer", schedule_and_optimizer},
      {"real-time factor", rtf_trend},
      {"synthesis determinism", [&] { return synth_determinism(cli); }},
      {"confidence interval", ci_arithmetic},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  [%2d] %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
