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

#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "ovkws/ops.hpp"
#include "ovkws/rng.hpp"
#include "ovkws/tensor.hpp"

namespace ovkws {

enum class LayerKind {
  kConv2d,
  kDepthwiseConv2d,
  kPointwiseConv,
  kBatchNorm,
  kSubSpectralNorm,
  kRelu,
  kSwish,
  kAvgPool,
  kDropout,
  kClassifierHead,
};

const char* layer_kind_name(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::kRelu;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  Conv2dGeometry geometry;
  bool bias = false;
  std::size_t sub_bands = 1;
  double rate = 0.0;
  double eps = 1e-5;
  double momentum = 0.1;

  static LayerSpec conv2d(std::size_t in, std::size_t out, std::array<std::size_t, 2> kernel,
                          std::array<std::size_t, 2> stride = {1, 1},
                          std::array<std::size_t, 2> padding = {0, 0},
                          std::array<std::size_t, 2> dilation = {1, 1}, bool bias = false);
  static LayerSpec depthwise(std::size_t channels, std::array<std::size_t, 2> kernel,
                             std::array<std::size_t, 2> stride = {1, 1},
                             std::array<std::size_t, 2> padding = {0, 0},
                             std::array<std::size_t, 2> dilation = {1, 1});
  static LayerSpec pointwise(std::size_t in, std::size_t out, bool bias = false);
  static LayerSpec batch_norm(std::size_t channels);
  static LayerSpec subspectral_norm(std::size_t channels, std::size_t sub_bands);
  static LayerSpec relu();
  static LayerSpec swish();
  static LayerSpec avg_pool();
  static LayerSpec dropout(double rate);
  // 1x1 convolution with bias followed by flattening to (N, classes).
  static LayerSpec classifier_head(std::size_t in, std::size_t classes);
};

// A single layer owning its parameters and running statistics.
template <typename T>
class Layer {
 public:
  Layer(std::string name, LayerSpec spec, Rng& init_rng);

  Var forward(Graph<T>& g, Var x);
  Shape output_shape(const Shape& in) const;

  const std::string& name() const { return name_; }
  const LayerSpec& spec() const { return spec_; }
  std::size_t num_parameters() const;
  std::vector<Parameter<T>*> parameters();
  std::vector<Buffer<T>*> buffers();

 private:
  std::string name_;
  LayerSpec spec_;
  std::vector<Parameter<T>> params_;  // weight[, bias] or gamma, beta
  std::vector<Buffer<T>> buffers_;    // running mean, running var
};

extern template class Layer<float>;
extern template class Layer<double>;

}  // namespace ovkws
