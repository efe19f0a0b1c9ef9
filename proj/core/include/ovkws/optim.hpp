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

#include <cstddef>
#include <vector>

#include "ovkws/tensor.hpp"

namespace ovkws {

struct SgdOptions {
  double momentum = 0.9;
  double weight_decay = 1e-3;
};

// SGD with heavy-ball momentum and L2 decay folded into the gradient:
//   v <- momentum * v + (grad + weight_decay * w);  w <- w - lr * v
template <typename T>
class Sgd {
 public:
  Sgd(std::vector<Parameter<T>*> params, SgdOptions options = {});

  // Throws DivergenceError("divergence detected") on a non-finite gradient
  // or update; parameters are left untouched in that case.
  void step(double lr);
  void zero_grad();

  const SgdOptions& options() const { return options_; }
  const std::vector<Tensor<T>>& velocity() const { return velocity_; }
  std::vector<Tensor<T>>& velocity() { return velocity_; }

 private:
  std::vector<Parameter<T>*> params_;
  SgdOptions options_;
  std::vector<Tensor<T>> velocity_;
};

struct LrSchedule {
  std::size_t total_epochs = 200;
  std::size_t warmup_epochs = 5;
  double peak = 0.1;
  double floor = 0.0;
};

// Linear warm-up from 0 to peak over warmup_epochs, then half-cosine decay
// to floor at total_epochs. epoch may be fractional; values outside
// [0, total_epochs] throw ConfigError.
double lr_at_epoch(double epoch, const LrSchedule& schedule = {});

extern template class Sgd<float>;
extern template class Sgd<double>;

}  // namespace ovkws
