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

#include "ovkws/layers.hpp"

#include <cmath>
#include <random>

#include "ovkws/error.hpp"

namespace ovkws {

const char* layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2d: return "conv2d";
    case LayerKind::kDepthwiseConv2d: return "depthwise_conv2d";
    case LayerKind::kPointwiseConv: return "pointwise_conv";
    case LayerKind::kBatchNorm: return "batch_norm";
    case LayerKind::kSubSpectralNorm: return "subspectral_norm";
    case LayerKind::kRelu: return "relu";
    case LayerKind::kSwish: return "swish";
    case LayerKind::kAvgPool: return "avg_pool";
    case LayerKind::kDropout: return "dropout";
    case LayerKind::kClassifierHead: return "classifier_head";
  }
  return "?";
}

LayerSpec LayerSpec::conv2d(std::size_t in, std::size_t out, std::array<std::size_t, 2> kernel,
                            std::array<std::size_t, 2> stride, std::array<std::size_t, 2> padding,
                            std::array<std::size_t, 2> dilation, bool bias) {
  LayerSpec s;
  s.kind = LayerKind::kConv2d;
  s.in_channels = in;
  s.out_channels = out;
  s.geometry = {kernel, stride, padding, dilation, 1};
  s.bias = bias;
  return s;
}

LayerSpec LayerSpec::depthwise(std::size_t channels, std::array<std::size_t, 2> kernel,
                               std::array<std::size_t, 2> stride,
                               std::array<std::size_t, 2> padding,
                               std::array<std::size_t, 2> dilation) {
  LayerSpec s = conv2d(channels, channels, kernel, stride, padding, dilation);
  s.kind = LayerKind::kDepthwiseConv2d;
  s.geometry.groups = channels;
  return s;
}

LayerSpec LayerSpec::pointwise(std::size_t in, std::size_t out, bool bias) {
  LayerSpec s = conv2d(in, out, {1, 1});
  s.kind = LayerKind::kPointwiseConv;
  s.bias = bias;
  return s;
}

LayerSpec LayerSpec::batch_norm(std::size_t channels) {
  LayerSpec s;
  s.kind = LayerKind::kBatchNorm;
  s.in_channels = s.out_channels = channels;
  return s;
}

LayerSpec LayerSpec::subspectral_norm(std::size_t channels, std::size_t sub_bands) {
  LayerSpec s = batch_norm(channels);
  s.kind = LayerKind::kSubSpectralNorm;
  s.sub_bands = sub_bands;
  return s;
}

LayerSpec LayerSpec::relu() {
  LayerSpec s;
  s.kind = LayerKind::kRelu;
  return s;
}

LayerSpec LayerSpec::swish() {
  LayerSpec s;
  s.kind = LayerKind::kSwish;
  return s;
}

LayerSpec LayerSpec::avg_pool() {
  LayerSpec s;
  s.kind = LayerKind::kAvgPool;
  return s;
}

LayerSpec LayerSpec::dropout(double rate) {
  LayerSpec s;
  s.kind = LayerKind::kDropout;
  s.rate = rate;
  return s;
}

LayerSpec LayerSpec::classifier_head(std::size_t in, std::size_t classes) {
  LayerSpec s = pointwise(in, classes, true);
  s.kind = LayerKind::kClassifierHead;
  return s;
}

namespace {

bool is_conv(LayerKind k) {
  return k == LayerKind::kConv2d || k == LayerKind::kDepthwiseConv2d ||
         k == LayerKind::kPointwiseConv || k == LayerKind::kClassifierHead;
}

bool is_norm(LayerKind k) {
  return k == LayerKind::kBatchNorm || k == LayerKind::kSubSpectralNorm;
}

}  // namespace

template <typename T>
Layer<T>::Layer(std::string name, LayerSpec spec, Rng& init_rng)
    : name_(std::move(name)), spec_(spec) {
  if (is_conv(spec_.kind)) {
    const auto& geo = spec_.geometry;
    if (spec_.in_channels == 0 || spec_.out_channels == 0 || geo.groups == 0 ||
        spec_.in_channels % geo.groups || spec_.out_channels % geo.groups) {
      throw ConfigError(name_ + ": invalid channel configuration");
    }
    const std::size_t icg = spec_.in_channels / geo.groups;
    const std::size_t fan_in = icg * geo.kernel[0] * geo.kernel[1];
    // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)), as in common frameworks.
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> u(-bound, bound);
    Parameter<T> w{name_ + ".weight",
                   Tensor<T>({spec_.out_channels, icg, geo.kernel[0], geo.kernel[1]}), {}};
    for (auto& v : w.value.data) v = static_cast<T>(u(init_rng));
    params_.push_back(std::move(w));
    if (spec_.bias) {
      Parameter<T> b{name_ + ".bias", Tensor<T>({spec_.out_channels}), {}};
      for (auto& v : b.value.data) v = static_cast<T>(u(init_rng));
      params_.push_back(std::move(b));
    }
  } else if (is_norm(spec_.kind)) {
    if (spec_.in_channels == 0 || spec_.sub_bands == 0) {
      throw ConfigError(name_ + ": invalid normalization configuration");
    }
    const std::size_t n = spec_.in_channels * spec_.sub_bands;
    params_.push_back({name_ + ".gamma", Tensor<T>({n}, T(1)), {}});
    params_.push_back({name_ + ".beta", Tensor<T>({n}, T(0)), {}});
    buffers_.push_back({name_ + ".running_mean", Tensor<T>({n}, T(0))});
    buffers_.push_back({name_ + ".running_var", Tensor<T>({n}, T(1))});
  } else if (spec_.kind == LayerKind::kDropout) {
    if (spec_.rate < 0.0 || spec_.rate >= 1.0) throw ConfigError(name_ + ": dropout rate must be in [0, 1)");
  }
  for (auto& p : params_) p.zero_grad();
}

template <typename T>
Var Layer<T>::forward(Graph<T>& g, Var x) {
  const Shape& in = g.value(x).shape;
  if ((is_conv(spec_.kind) || is_norm(spec_.kind)) && (in.size() != 4 || in[1] != spec_.in_channels)) {
    throw ConfigError(name_ + ": expected " + std::to_string(spec_.in_channels) +
                      " input channels, got shape " + shape_string(in));
  }
  switch (spec_.kind) {
    case LayerKind::kConv2d:
    case LayerKind::kDepthwiseConv2d:
    case LayerKind::kPointwiseConv: {
      Var w = g.parameter(params_[0]);
      Var b = spec_.bias ? g.parameter(params_[1]) : Var{};
      return conv2d(g, x, w, b, spec_.geometry);
    }
    case LayerKind::kClassifierHead: {
      Var w = g.parameter(params_[0]);
      Var b = g.parameter(params_[1]);
      return flatten(g, conv2d(g, x, w, b, spec_.geometry));
    }
    case LayerKind::kBatchNorm:
    case LayerKind::kSubSpectralNorm: {
      Var gamma = g.parameter(params_[0]);
      Var beta = g.parameter(params_[1]);
      NormOptions opt{spec_.eps, spec_.momentum, spec_.sub_bands};
      return batch_norm(g, x, gamma, beta, buffers_[0].value, buffers_[1].value, opt);
    }
    case LayerKind::kRelu: return relu(g, x);
    case LayerKind::kSwish: return swish(g, x);
    case LayerKind::kAvgPool: return global_avg_pool(g, x);
    case LayerKind::kDropout: return dropout_channels(g, x, spec_.rate);
  }
  throw ConfigError(name_ + ": unknown layer kind");
}

template <typename T>
Shape Layer<T>::output_shape(const Shape& in) const {
  switch (spec_.kind) {
    case LayerKind::kConv2d:
    case LayerKind::kDepthwiseConv2d:
    case LayerKind::kPointwiseConv:
      return conv2d_output_shape(in, spec_.out_channels, spec_.geometry);
    case LayerKind::kClassifierHead: {
      const Shape s = conv2d_output_shape(in, spec_.out_channels, spec_.geometry);
      return {s[0], s[1] * s[2] * s[3]};
    }
    case LayerKind::kAvgPool:
      return {in.at(0), in.at(1), 1, 1};
    default:
      return in;
  }
}

template <typename T>
std::size_t Layer<T>::num_parameters() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.value.numel();
  return n;
}

template <typename T>
std::vector<Parameter<T>*> Layer<T>::parameters() {
  std::vector<Parameter<T>*> out;
  for (auto& p : params_) out.push_back(&p);
  return out;
}

template <typename T>
std::vector<Buffer<T>*> Layer<T>::buffers() {
  std::vector<Buffer<T>*> out;
  for (auto& b : buffers_) out.push_back(&b);
  return out;
}

template class Layer<float>;
template class Layer<double>;

}  // namespace ovkws
