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
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ovkws/layers.hpp"
#include "ovkws/tensor.hpp"

namespace ovkws {

struct ModelConfig {
  double tau = 3.0;
  std::size_t in_channels = 1;
  std::size_t num_classes = 12;
  std::size_t mel_bins = 40;
  std::size_t sub_bands = 5;
  double dropout = 0.1;

  // Throws ConfigError on a non-integer width or unsupported shape.
  void validate() const;
  // stem, then the four stages, then the head projection:
  // (16, 8, 12, 16, 20, 32) * tau.
  std::array<std::size_t, 6> widths() const;
};

struct BcResBlockSpec {
  std::size_t in_channels = 0;
  std::size_t channels = 0;
  bool is_transition = false;
  std::size_t freq_stride = 1;
  std::size_t temporal_dilation = 1;
};

// Block layout: stages of 2, 2, 4, 4 blocks; the first block of every stage
// is a transition; stages 2 and 3 halve the frequency axis; the temporal
// dilation doubles per stage.
std::vector<BcResBlockSpec> block_specs(const ModelConfig& config);

// Named intermediate values captured during a forward pass.
using Trace = std::vector<std::pair<std::string, Var>>;

template <typename T>
class BcResNet {
 public:
  explicit BcResNet(ModelConfig config, std::uint64_t seed = 0);

  // (N, C, mel_bins, frames) -> (N, num_classes) logits. The mode comes from
  // the graph; in train mode norm layers update their running statistics.
  Var forward(Graph<T>& g, Var input, Trace* trace = nullptr);
  // Eval-mode logits for a batch; does not touch model state.
  Tensor<T> infer(const Tensor<T>& batch);

  const ModelConfig& config() const { return config_; }
  std::size_t count_params() const;
  std::vector<Parameter<T>*> parameters();
  std::vector<Buffer<T>*> buffers();
  // Table of layer name, kind, output shape, parameters and running total
  // for a (1, C, mel_bins, frames) input.
  std::string summary(std::size_t frames = 98) const;
  std::size_t min_frames() const;

 private:
  struct Block {
    BcResBlockSpec spec;
    std::optional<Layer<T>> proj_conv;
    std::optional<Layer<T>> proj_norm;
    Layer<T> freq_conv;
    Layer<T> ssn;
    Layer<T> temporal_conv;
    Layer<T> temporal_norm;
    Layer<T> pointwise;
    Layer<T> dropout;
  };

  template <typename F>
  void visit_layers(F&& f) const;

  ModelConfig config_;
  std::vector<Layer<T>> stem_;
  std::vector<Block> blocks_;
  std::vector<Layer<T>> head_;
};

std::size_t count_params(const ModelConfig& config);

extern template class BcResNet<float>;
extern template class BcResNet<double>;

}  // namespace ovkws
