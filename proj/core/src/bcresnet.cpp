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

#include "ovkws/bcresnet.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "ovkws/error.hpp"
#include "ovkws/ops.hpp"

namespace ovkws {

namespace {

constexpr std::array<double, 6> kWidthFactors = {16, 8, 12, 16, 20, 32};
constexpr std::array<std::size_t, 4> kStageBlocks = {2, 2, 4, 4};
constexpr std::array<std::size_t, 4> kStageFreqStride = {1, 2, 2, 1};

}  // namespace

void ModelConfig::validate() const {
  if (!(tau > 0.0)) throw ConfigError("tau must be positive");
  for (double f : kWidthFactors) {
    const double w = f * tau;
    if (std::abs(w - std::round(w)) > 1e-9) {
      throw ConfigError("non-integer channel width " + std::to_string(w) + " for tau " +
                        std::to_string(tau));
    }
  }
  if (in_channels < 1 || in_channels > 3) throw ConfigError("in_channels must be 1, 2 or 3");
  if (num_classes < 2) throw ConfigError("need at least two classes");
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
  // Frequency walk: stem /2, two strided stages /2 each, then the 5x5 head.
  if (mel_bins % 8 != 0 || mel_bins / 8 != 5) {
    throw ConfigError("model expects 40 mel bins");
  }
  if (sub_bands == 0 || (mel_bins / 8) % sub_bands != 0) {
    throw ConfigError("sub-bands must divide every frequency extent");
  }
}

std::array<std::size_t, 6> ModelConfig::widths() const {
  validate();
  std::array<std::size_t, 6> w{};
  for (std::size_t i = 0; i < 6; ++i) {
    w[i] = static_cast<std::size_t>(std::llround(kWidthFactors[i] * tau));
  }
  return w;
}

std::vector<BcResBlockSpec> block_specs(const ModelConfig& config) {
  const auto w = config.widths();
  std::vector<BcResBlockSpec> specs;
  std::size_t in = w[0];
  for (std::size_t stage = 0; stage < 4; ++stage) {
    const std::size_t out = w[stage + 1];
    for (std::size_t b = 0; b < kStageBlocks[stage]; ++b) {
      BcResBlockSpec s;
      s.in_channels = in;
      s.channels = out;
      s.is_transition = b == 0;
      s.freq_stride = b == 0 ? kStageFreqStride[stage] : 1;
      s.temporal_dilation = std::size_t{1} << stage;
      specs.push_back(s);
      in = out;
    }
  }
  return specs;
}

template <typename T>
BcResNet<T>::BcResNet(ModelConfig config, std::uint64_t seed) : config_(config) {
  const auto w = config_.widths();
  Rng rng(seed);
  const std::size_t S = config_.sub_bands;

  stem_.emplace_back("stem.conv", LayerSpec::conv2d(config_.in_channels, w[0], {5, 5}, {2, 1}, {2, 2}), rng);
  stem_.emplace_back("stem.norm", LayerSpec::batch_norm(w[0]), rng);

  const auto specs = block_specs(config_);
  std::size_t stage = 0, index = 0;
  for (const auto& s : specs) {
    if (s.is_transition && !blocks_.empty()) {
      ++stage;
      index = 0;
    }
    const std::string p = "stage" + std::to_string(stage) + ".block" + std::to_string(index++);
    const std::size_t c = s.channels, d = s.temporal_dilation;
    std::optional<Layer<T>> proj_conv, proj_norm;
    if (s.is_transition) {
      proj_conv.emplace(p + ".proj.conv", LayerSpec::pointwise(s.in_channels, c), rng);
      proj_norm.emplace(p + ".proj.norm", LayerSpec::batch_norm(c), rng);
    }
    blocks_.push_back(Block{
        s, std::move(proj_conv), std::move(proj_norm),
        Layer<T>(p + ".freq_conv", LayerSpec::depthwise(c, {3, 1}, {s.freq_stride, 1}, {1, 0}), rng),
        Layer<T>(p + ".ssn", LayerSpec::subspectral_norm(c, S), rng),
        Layer<T>(p + ".temporal_conv", LayerSpec::depthwise(c, {1, 3}, {1, 1}, {0, d}, {1, d}), rng),
        Layer<T>(p + ".temporal_norm", LayerSpec::batch_norm(c), rng),
        Layer<T>(p + ".pointwise", LayerSpec::pointwise(c, c), rng),
        Layer<T>(p + ".dropout", LayerSpec::dropout(config_.dropout), rng)});
  }

  head_.emplace_back("head.depthwise", LayerSpec::depthwise(w[4], {5, 5}, {1, 1}, {0, 2}), rng);
  head_.emplace_back("head.conv", LayerSpec::pointwise(w[4], w[5]), rng);
  head_.emplace_back("head.norm", LayerSpec::batch_norm(w[5]), rng);
  head_.emplace_back("head.relu", LayerSpec::relu(), rng);
  head_.emplace_back("head.pool", LayerSpec::avg_pool(), rng);
  head_.emplace_back("head.classifier", LayerSpec::classifier_head(w[5], config_.num_classes), rng);
}

template <typename T>
std::size_t BcResNet<T>::min_frames() const {
  // The head's 5x5 depthwise kernel is padded along time, so any T >= 1
  // works geometrically; one frame is the floor.
  return 1;
}

template <typename T>
Var BcResNet<T>::forward(Graph<T>& g, Var input, Trace* trace) {
  const Shape& in = g.value(input).shape;
  if (in.size() != 4 || in[1] != config_.in_channels) {
    throw DataError("expected (N, " + std::to_string(config_.in_channels) +
                    ", bins, frames) input, got " + shape_string(in));
  }
  if (in[2] != config_.mel_bins) {
    throw DataError("wrong bin count: expected " + std::to_string(config_.mel_bins) + ", got " +
                    std::to_string(in[2]));
  }
  if (in[3] < min_frames()) throw DataError("too few frames");
  auto note = [&](const std::string& name, Var v) {
    if (trace) trace->emplace_back(name, v);
    return v;
  };

  Var x = stem_[0].forward(g, input);
  x = relu(g, stem_[1].forward(g, x));
  note("stem", x);

  for (auto& b : blocks_) {
    const std::string& p = b.pointwise.name();
    const std::string prefix = p.substr(0, p.rfind('.'));
    Var shortcut = x;
    if (b.spec.is_transition) {
      x = relu(g, b.proj_norm->forward(g, b.proj_conv->forward(g, x)));
    }
    Var two_d = b.ssn.forward(g, b.freq_conv.forward(g, x));
    Var y = mean_freq(g, two_d);
    y = b.temporal_conv.forward(g, y);
    y = swish(g, b.temporal_norm.forward(g, y));
    y = b.pointwise.forward(g, y);
    y = b.dropout.forward(g, y);
    Var wide = note(prefix + ".broadcast", broadcast_freq(g, y, g.value(two_d).dim(2)));
    Var out = add(g, two_d, wide);
    if (!b.spec.is_transition) out = add(g, out, shortcut);
    x = note(prefix, relu(g, out));
  }

  for (auto& layer : head_) x = layer.forward(g, x);
  return note("logits", x);
}

template <typename T>
Tensor<T> BcResNet<T>::infer(const Tensor<T>& batch) {
  Graph<T> g(Mode::kEval);
  return g.value(forward(g, g.input(batch)));
}

template <typename T>
template <typename F>
void BcResNet<T>::visit_layers(F&& f) const {
  for (const auto& l : stem_) f(l);
  for (const auto& b : blocks_) {
    if (b.proj_conv) {
      f(*b.proj_conv);
      f(*b.proj_norm);
    }
    for (const Layer<T>* l : {&b.freq_conv, &b.ssn, &b.temporal_conv, &b.temporal_norm,
                              &b.pointwise, &b.dropout}) {
      f(*l);
    }
  }
  for (const auto& l : head_) f(l);
}

template <typename T>
std::size_t BcResNet<T>::count_params() const {
  std::size_t n = 0;
  visit_layers([&](const Layer<T>& l) { n += l.num_parameters(); });
  return n;
}

template <typename T>
std::vector<Parameter<T>*> BcResNet<T>::parameters() {
  std::vector<Parameter<T>*> out;
  visit_layers([&](const Layer<T>& l) {
    for (auto* p : const_cast<Layer<T>&>(l).parameters()) out.push_back(p);
  });
  return out;
}

template <typename T>
std::vector<Buffer<T>*> BcResNet<T>::buffers() {
  std::vector<Buffer<T>*> out;
  visit_layers([&](const Layer<T>& l) {
    for (auto* b : const_cast<Layer<T>&>(l).buffers()) out.push_back(b);
  });
  return out;
}

template <typename T>
std::string BcResNet<T>::summary(std::size_t frames) const {
  std::ostringstream os;
  std::size_t total = 0;
  char line[160];
  auto row = [&](const std::string& name, const char* kind, const Shape& out, std::size_t params) {
    total += params;
    std::snprintf(line, sizeof line, "%-32s %-18s %-18s %8zu %8zu\n", name.c_str(), kind,
                  shape_string(out).c_str(), params, total);
    os << line;
  };
  auto apply = [&](const Layer<T>& l, Shape& shape) {
    shape = l.output_shape(shape);
    row(l.name(), layer_kind_name(l.spec().kind), shape, l.num_parameters());
  };
  std::snprintf(line, sizeof line, "%-32s %-18s %-18s %8s %8s\n", "layer", "kind", "output",
                "params", "total");
  os << line;

  Shape x{1, config_.in_channels, config_.mel_bins, frames};
  for (const auto& l : stem_) apply(l, x);
  for (const auto& b : blocks_) {
    if (b.proj_conv) {
      apply(*b.proj_conv, x);
      apply(*b.proj_norm, x);
    }
    apply(b.freq_conv, x);
    apply(b.ssn, x);
    Shape y{x[0], x[1], 1, x[3]};
    for (const Layer<T>* l : {&b.temporal_conv, &b.temporal_norm, &b.pointwise, &b.dropout}) {
      apply(*l, y);
    }
  }
  for (const auto& l : head_) apply(l, x);
  os << "total parameters: " << total << "\n";
  return os.str();
}

std::size_t count_params(const ModelConfig& config) {
  return BcResNet<float>(config, 0).count_params();
}

template class BcResNet<float>;
template class BcResNet<double>;

}  // namespace ovkws
