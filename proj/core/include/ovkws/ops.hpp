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
#include <span>
#include <vector>

#include "ovkws/tensor.hpp"

namespace ovkws {

struct Conv2dGeometry {
  std::array<std::size_t, 2> kernel{1, 1};
  std::array<std::size_t, 2> stride{1, 1};
  std::array<std::size_t, 2> padding{0, 0};
  std::array<std::size_t, 2> dilation{1, 1};
  std::size_t groups = 1;
};

// (N, C, H, W) -> (N, out_channels, H', W'). Throws ConfigError when the
// geometry does not fit the input.
Shape conv2d_output_shape(const Shape& in, std::size_t out_channels, const Conv2dGeometry& geo);

// Grouped, strided, dilated, zero-padded 2-D cross-correlation. The weight
// is (out, in / groups, kh, kw); bias may be an invalid Var.
template <typename T>
Var conv2d(Graph<T>& g, Var x, Var weight, Var bias, const Conv2dGeometry& geo);

struct NormOptions {
  double eps = 1e-5;
  double momentum = 0.1;
  // 1 is plain batch norm; S > 1 normalizes each of S equal frequency
  // bands of every channel separately, with C * S affine pairs.
  std::size_t sub_bands = 1;
};

// Training mode normalizes with batch statistics and updates the running
// estimates (unbiased variance); eval mode uses the running estimates.
template <typename T>
Var batch_norm(Graph<T>& g, Var x, Var gamma, Var beta, Tensor<T>& running_mean,
               Tensor<T>& running_var, const NormOptions& opt);

template <typename T> Var relu(Graph<T>& g, Var x);
template <typename T> Var swish(Graph<T>& g, Var x);
template <typename T> Var add(Graph<T>& g, Var a, Var b);
// (N, C, H, W) -> (N, C, 1, W).
template <typename T> Var mean_freq(Graph<T>& g, Var x);
// (N, C, 1, W) -> (N, C, bins, W) by repetition.
template <typename T> Var broadcast_freq(Graph<T>& g, Var x, std::size_t bins);
// (N, C, H, W) -> (N, C, 1, 1).
template <typename T> Var global_avg_pool(Graph<T>& g, Var x);
// (N, ...) -> (N, prod(...)).
template <typename T> Var flatten(Graph<T>& g, Var x);
// Zeroes whole channels with probability rate and rescales the survivors;
// identity in eval mode.
template <typename T> Var dropout_channels(Graph<T>& g, Var x, double rate);
// sum_i w_i x_i as a scalar; handy for directional gradient checks.
template <typename T> Var weighted_sum(Graph<T>& g, Var x, const Tensor<T>& weights);
// Mean softmax cross-entropy of (N, K) logits against integer labels.
template <typename T>
Var cross_entropy(Graph<T>& g, Var logits, const std::vector<int>& labels);

struct CrossEntropy {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d logits
};

// Numerically stable single-example softmax cross-entropy.
CrossEntropy softmax_cross_entropy(std::span<const double> logits, std::size_t label);

std::vector<double> softmax(std::span<const double> logits);

}  // namespace ovkws
