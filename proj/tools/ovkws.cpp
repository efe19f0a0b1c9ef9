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

// ovkws: dataset synthesis, feature extraction, training, evaluation and
// transfer-function measurement from the command line.
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 divergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ovkws/bcresnet.hpp"
#include "ovkws/checkpoint.hpp"
#include "ovkws/dataset.hpp"
#include "ovkws/error.hpp"
#include "ovkws/harness.hpp"
#include "ovkws/synthetic.hpp"
#include "ovkws/tf_lab.hpp"
#include "ovkws/wav.hpp"

namespace fs = std::filesystem;
using namespace ovkws;

namespace {

struct Common {
  std::uint64_t seed = 1;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c, bool out_required) {
  cmd->add_option("--seed", c.seed, "Global random seed")->capture_default_str();
  cmd->set_config("--config", "", "TOML/INI file with option defaults");
  auto* out = cmd->add_option("--out", c.out, "Output path");
  if (out_required) out->required();
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

Manifest select(const Manifest& all, Split split) {
  Manifest out;
  for (const auto& r : all) {
    if (r.split == split) out.push_back(r);
  }
  return out;
}

// ---------------------------------------------------------------------------

struct SynthArgs {
  Common common;
  std::string corpus_dir, noise_dir, subjects_dir;
  std::size_t threads = 1;
  std::vector<std::size_t> max_utterances{0, 0, 0};
  std::vector<std::string> words;
  std::vector<std::size_t> speakers{12, 3, 3};
  bool no_ambient = false;
  bool no_balance = false;
  bool pcm16 = false;
};

void run_synth(const SynthArgs& a) {
  DatasetConfig cfg;
  cfg.seed = a.common.seed;
  cfg.threads = a.threads;
  cfg.include_ambient = !a.no_ambient;
  cfg.balance_classes = !a.no_balance;
  cfg.wav_format = a.pcm16 ? WavFormat::kPcm16 : WavFormat::kFloat32;
  if (a.max_utterances.size() != 3) throw ConfigError("--max-utterances takes three values");
  for (int i = 0; i < 3; ++i) cfg.max_utterances[i] = a.max_utterances[i];
  cfg.validate();

  std::vector<CleanUtterance> corpus;
  if (!a.corpus_dir.empty()) {
    corpus = load_speech_commands(a.corpus_dir);
  } else {
    if (a.speakers.size() != 3) throw ConfigError("--speakers takes three values");
    SyntheticCorpusOptions opt;
    opt.words = a.words;
    opt.speakers = {a.speakers[0], a.speakers[1], a.speakers[2]};
    corpus = synthetic_corpus(opt, derive_seed({cfg.seed, hash_string("corpus")}));
  }

  NoiseBanks banks;
  if (!a.noise_dir.empty()) {
    for (Split s : {Split::kTrain, Split::kVal, Split::kTest}) {
      banks.by_split[static_cast<int>(s)] = load_noise_bank(fs::path(a.noise_dir) / split_name(s));
    }
  } else {
    banks = synthetic_noise_banks(derive_seed({cfg.seed, hash_string("noise")}));
  }

  SubjectPool subjects;
  if (!a.subjects_dir.empty()) {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(a.subjects_dir)) {
      if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    if (dirs.size() != 5) throw DataError("subject directory must hold exactly 5 subjects");
    for (int i = 0; i < 3; ++i) subjects.train.push_back(load_tf_set(dirs[i]));
    subjects.val = load_tf_set(dirs[3]);
    subjects.test = load_tf_set(dirs[4]);
  } else {
    subjects = synthetic_subject_pool(derive_seed({cfg.seed, hash_string("subjects")}));
  }
  subjects.validate();

  const Manifest m = build_dataset(cfg, corpus, subjects, banks, a.common.out);
  std::size_t counts[3] = {0, 0, 0};
  for (const auto& r : m) ++counts[static_cast<int>(r.split)];
  std::cout << "wrote " << m.size() << " records (train " << counts[0] << ", val " << counts[1]
            << ", test " << counts[2] << ") to " << a.common.out << "\n";
}

// ---------------------------------------------------------------------------

struct FeaturesArgs {
  Common common;
  std::string data;
  std::string mics = "ifr";
  std::size_t threads = 1;
};

void run_features(const FeaturesArgs& a) {
  const Manifest m = read_manifest(fs::path(a.data) / "manifest.txt");
  const auto mics = parse_mic_subset(a.mics);
  const ExampleSet ex = load_examples(m, a.data, mics, a.threads, fs::path(a.common.out));
  std::cout << "cached features for " << ex.size() << " records ("
            << mic_subset_name(mics) << ") in " << a.common.out << "\n";
}

// ---------------------------------------------------------------------------

struct TrainArgs {
  Common common;
  std::string data, cache;
  std::string mics = "i";
  double tau = 3.0;
  std::size_t epochs = 200, batch = 100, warmup = 5, threads = 1;
  double lr = 0.1;
  bool quiet = false;
};

void run_train(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.warmup_epochs = a.warmup;
  cfg.peak_lr = a.lr;
  cfg.seed = a.common.seed;
  cfg.mics = parse_mic_subset(a.mics);
  cfg.tau = a.tau;
  cfg.out_dir = a.common.out;
  cfg.validate();
  const Manifest m = read_manifest(fs::path(a.data) / "manifest.txt");
  std::optional<fs::path> cache;
  if (!a.cache.empty()) cache = a.cache;
  const ExampleSet tr = load_examples(select(m, Split::kTrain), a.data, cfg.mics, a.threads, cache);
  const ExampleSet va = load_examples(select(m, Split::kVal), a.data, cfg.mics, a.threads, cache);
  const TrainResult r = train(cfg, tr, va.empty() ? nullptr : &va, a.quiet ? nullptr : &std::cout);
  std::cout << "final and best (epoch " << r.best_epoch << ") checkpoints in " << a.common.out << "\n";
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  Common common;
  std::string data, cache;
  std::string mics = "i";
  std::vector<std::string> checkpoints;
  std::size_t threads = 1;
  bool rtf = false;
};

std::vector<AudioBuffer> rtf_input(std::size_t mics, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> n(0.0, 0.05);
  std::vector<AudioBuffer> out;
  for (std::size_t m = 0; m < mics; ++m) {
    AudioBuffer b(kSampleRate, kSampleRate);
    for (auto& v : b.samples) v = n(rng);
    out.push_back(std::move(b));
  }
  return out;
}

void run_eval(const EvalArgs& a) {
  const Manifest m = read_manifest(fs::path(a.data) / "manifest.txt");
  const auto mics = parse_mic_subset(a.mics);
  std::optional<fs::path> cache;
  if (!a.cache.empty()) cache = a.cache;
  const ExampleSet test = load_examples(select(m, Split::kTest), a.data, mics, a.threads, cache);
  if (test.empty()) throw DataError("manifest has no test records");
  const DatasetConfig defaults;
  std::vector<EvalReport> reports;
  std::optional<double> rtf;
  for (const auto& path : a.checkpoints) {
    BcResNet<float> model = load_checkpoint(path);
    if (model.config().in_channels != mics.size()) {
      throw ConfigError(path + " was trained on " + std::to_string(model.config().in_channels) +
                        " microphone(s), --mics selects " + std::to_string(mics.size()));
    }
    reports.push_back(evaluate(model, test, defaults.test_snrs));
    if (a.rtf && !rtf) rtf = measure_rtf(model, rtf_input(mics.size(), a.common.seed)).rtf;
  }
  const SeedReport report = summarize_seeds(mic_subset_name(mics), reports, rtf);
  std::cout << report.table();
  if (!a.common.out.empty()) {
    fs::create_directories(a.common.out);
    open_out(fs::path(a.common.out) / "report.txt") << report.table();
    open_out(fs::path(a.common.out) / "report.jsonl") << report.jsonl();
  }
}

// ---------------------------------------------------------------------------

struct RtfArgs {
  Common common;
  std::string checkpoint;
  std::string mics = "i";
  double tau = 3.0;
  std::size_t trials = 30, warmup = 5;
};

void run_rtf(const RtfArgs& a) {
  const auto mics = parse_mic_subset(a.mics);
  ModelConfig mc;
  mc.tau = a.tau;
  mc.in_channels = mics.size();
  BcResNet<float> model = a.checkpoint.empty() ? BcResNet<float>(mc, a.common.seed)
                                               : load_checkpoint(a.checkpoint);
  const RtfResult r = measure_rtf(model, rtf_input(model.config().in_channels, a.common.seed),
                                  {a.trials, a.warmup});
  char line[96];
  std::snprintf(line, sizeof line, "tau %g, %zu mic(s): RTF %.4f (median of %zu)\n",
                model.config().tau, model.config().in_channels, r.rtf, r.trial_rtfs.size());
  std::cout << line;
  if (!a.common.out.empty()) open_out(a.common.out) << line;
}

// ---------------------------------------------------------------------------

struct EstimateArgs {
  Common common;
  std::string input, output;
  std::size_t taps = 64, passes = 1;
  double mu = 0.5;
};

void run_estimate(const EstimateArgs& a) {
  LmsOptions opt;
  opt.taps = a.taps;
  opt.passes = a.passes;
  opt.step_size = a.mu;
  const ImpulseResponse ir = estimate_ir_lms(read_wav(a.input), read_wav(a.output), opt);
  write_wav(a.common.out, AudioBuffer(ir.taps, ir.sample_rate), WavFormat::kFloat32);
  std::cout << "estimated " << ir.taps.size() << " taps -> " << a.common.out << "\n";
}

struct SweepArgs {
  Common common;
  double f1 = 20.0, f2 = 8000.0, duration = 5.0;
  std::string recording, inverse;
  std::size_t ir_len = 512;
};

void run_sweep(const SweepArgs& a) {
  const fs::path out = a.common.out;
  fs::create_directories(out);
  if (a.recording.empty()) {
    const SweepPair p = generate_exp_sweep(a.f1, a.f2, a.duration);
    write_wav(out / "sweep.wav", p.sweep, WavFormat::kFloat32);
    write_wav(out / "inverse.wav", p.inverse_filter, WavFormat::kFloat32);
    std::cout << "wrote sweep.wav and inverse.wav to " << out.string() << "\n";
    return;
  }
  if (a.inverse.empty()) throw ConfigError("--recording needs --inverse");
  const Deconvolution d = deconvolve_sweep(read_wav(a.recording), read_wav(a.inverse), a.ir_len);
  write_wav(out / "ir.wav", AudioBuffer(d.ir.taps, d.ir.sample_rate), WavFormat::kFloat32);
  std::cout << "wrote " << d.ir.taps.size() << "-tap ir.wav to " << out.string()
            << (d.low_energy ? " (warning: low-energy recording)" : "") << "\n";
}

// ---------------------------------------------------------------------------

struct ReportArgs {
  Common common;
  double tau = 3.0;
  std::string mics = "i";
  std::size_t frames = 98;
};

void run_report(const ReportArgs& a) {
  ModelConfig mc;
  mc.tau = a.tau;
  mc.in_channels = parse_mic_subset(a.mics).size();
  const BcResNet<float> model(mc, a.common.seed);
  const std::string s = model.summary(a.frames);
  std::cout << s;
  if (!a.common.out.empty()) open_out(a.common.out) << s;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 2;
  if (dynamic_cast<const DataError*>(&e)) return 3;
  if (dynamic_cast<const DivergenceError*>(&e)) return 4;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 3;
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Own-voice keyword spotting toolkit"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* c_synth = app.add_subcommand("synth", "Render a multi-microphone noisy dataset");
  add_common(c_synth, synth.common, true);
  c_synth->add_option("--corpus", synth.corpus_dir, "Speech-commands directory (default: synthetic words)");
  c_synth->add_option("--noise-dir", synth.noise_dir, "Noise banks with train/, val/, test/ (default: synthetic)");
  c_synth->add_option("--subjects", synth.subjects_dir, "Five transfer-function subject directories (default: synthetic)");
  c_synth->add_option("--threads", synth.threads, "Rendering workers")->capture_default_str();
  c_synth->add_option("--max-utterances", synth.max_utterances, "Cap per split: train val test (0 = none)")->expected(3);
  c_synth->add_option("--words", synth.words, "Synthetic vocabulary (default: keywords and fillers)")->delimiter(',');
  c_synth->add_option("--speakers", synth.speakers, "Synthetic speakers per split")->expected(3);
  c_synth->add_flag("--no-ambient", synth.no_ambient, "Omit ambient-noise items");
  c_synth->add_flag("--no-balance", synth.no_balance, "Keep the filler class unsubsampled");
  c_synth->add_flag("--pcm16", synth.pcm16, "Write 16-bit PCM instead of float");

  FeaturesArgs feats;
  auto* c_feat = app.add_subcommand("features", "Extract and cache log-mel features");
  add_common(c_feat, feats.common, true);
  c_feat->add_option("--data", feats.data, "Dataset root")->required();
  c_feat->add_option("--mics", feats.mics, "Microphone subset, e.g. i, if, ifr")->capture_default_str();
  c_feat->add_option("--threads", feats.threads, "Feature extraction workers")->capture_default_str();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "Train one BC-ResNet model");
  add_common(c_train, tr.common, true);
  c_train->add_option("--data", tr.data, "Dataset root")->required();
  c_train->add_option("--cache", tr.cache, "Feature cache directory");
  c_train->add_option("--mics", tr.mics, "Microphone subset, e.g. i, if, ifr")->capture_default_str();
  c_train->add_option("--tau", tr.tau, "Width multiplier")->capture_default_str();
  c_train->add_option("--epochs", tr.epochs, "Training epochs")->capture_default_str();
  c_train->add_option("--batch", tr.batch, "Mini-batch size")->capture_default_str();
  c_train->add_option("--warmup", tr.warmup, "Linear warm-up epochs")->capture_default_str();
  c_train->add_option("--lr", tr.lr, "Peak learning rate")->capture_default_str();
  c_train->add_option("--threads", tr.threads, "Feature extraction workers")->capture_default_str();
  c_train->add_flag("--quiet", tr.quiet, "No per-epoch log on stdout");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "Accuracy by SNR and seen/unseen noise over seeds");
  add_common(c_eval, ev.common, false);
  c_eval->add_option("--data", ev.data, "Dataset root")->required();
  c_eval->add_option("--cache", ev.cache, "Feature cache directory");
  c_eval->add_option("--mics", ev.mics, "Microphone subset the checkpoints were trained on")->capture_default_str();
  c_eval->add_option("--checkpoint", ev.checkpoints, "One checkpoint per seed")->required();
  c_eval->add_option("--threads", ev.threads, "Feature extraction workers")->capture_default_str();
  c_eval->add_flag("--rtf", ev.rtf, "Also measure the real-time factor");

  RtfArgs rt;
  auto* c_rtf = app.add_subcommand("rtf", "Measure the real-time factor");
  add_common(c_rtf, rt.common, false);
  c_rtf->add_option("--checkpoint", rt.checkpoint, "Trained model (default: random init)");
  c_rtf->add_option("--mics", rt.mics, "Microphone subset")->capture_default_str();
  c_rtf->add_option("--tau", rt.tau, "Width multiplier without a checkpoint")->capture_default_str();
  c_rtf->add_option("--trials", rt.trials, "Timed runs; the median is reported")->capture_default_str();
  c_rtf->add_option("--warmup", rt.warmup, "Untimed runs first")->capture_default_str();

  EstimateArgs est;
  auto* c_est = app.add_subcommand("estimate-tf", "NLMS impulse-response estimate from input/output recordings");
  add_common(c_est, est.common, true);
  c_est->add_option("--input", est.input, "Excitation WAV")->required();
  c_est->add_option("--output", est.output, "Recorded response WAV")->required();
  c_est->add_option("--taps", est.taps, "Estimated IR length")->capture_default_str();
  c_est->add_option("--mu", est.mu, "Normalized step size")->capture_default_str();
  c_est->add_option("--passes", est.passes, "Passes over the recording")->capture_default_str();

  SweepArgs sw;
  auto* c_sweep = app.add_subcommand("sweep", "Generate an exponential sweep, or deconvolve a recording");
  add_common(c_sweep, sw.common, true);
  c_sweep->add_option("--f1", sw.f1, "Start frequency in Hz")->capture_default_str();
  c_sweep->add_option("--f2", sw.f2, "End frequency in Hz")->capture_default_str();
  c_sweep->add_option("--duration", sw.duration, "Sweep length in seconds")->capture_default_str();
  c_sweep->add_option("--recording", sw.recording, "Recorded sweep response");
  c_sweep->add_option("--inverse", sw.inverse, "Inverse filter WAV");
  c_sweep->add_option("--ir-len", sw.ir_len, "Taps kept after deconvolution")->capture_default_str();

  ReportArgs rep;
  auto* c_rep = app.add_subcommand("report", "Per-layer model summary and parameter count");
  add_common(c_rep, rep.common, false);
  c_rep->add_option("--tau", rep.tau, "Width multiplier")->capture_default_str();
  c_rep->add_option("--mics", rep.mics, "Microphone subset")->capture_default_str();
  c_rep->add_option("--frames", rep.frames, "Input frames for the shape walk")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*c_synth) run_synth(synth);
    else if (*c_feat) run_features(feats);
    else if (*c_train) run_train(tr);
    else if (*c_eval) run_eval(ev);
    else if (*c_rtf) run_rtf(rt);
    else if (*c_est) run_estimate(est);
    else if (*c_sweep) run_sweep(sw);
    else if (*c_rep) run_report(rep);
  } catch (const std::exception& e) {
    std::cerr << "ovkws: " << e.what() << "\n";
    return exit_code_for(e);
  }
  return 0;
}
