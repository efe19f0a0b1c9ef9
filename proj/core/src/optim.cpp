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

#include "ovkws/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ovkws/error.hpp"

namespace ovkws {

template <typename T>
Sgd<T>::Sgd(std::vector<Parameter<T>*> params, SgdOptions options)
    : params_(std::move(params)), options_(options) {
  if (options_.momentum < 0.0 || options_.momentum >= 1.0 || options_.weight_decay < 0.0) {
    throw ConfigError("invalid SGD hyper-parameters");
  }
  for (auto* p : params_) velocity_.emplace_back(p->value.shape);
}

template <typename T>
void Sgd<T>::step(double lr) {
  if (!std::isfinite(lr) || lr < 0.0) throw ConfigError("invalid learning rate");
  for (auto* p : params_) {
    if (p->grad.shape != p->value.shape || !p->grad.all_finite()) {
      throw DivergenceError("divergence detected");
    }
  }
  const T mu = static_cast<T>(options_.momentum);
  const T wd = static_cast<T>(options_.weight_decay);
  const T rate = static_cast<T>(lr);
  std::vector<Tensor<T>> next_v = velocity_;
  std::vector<Tensor<T>> next_w;
  next_w.reserve(params_.size());
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Tensor<T>& v = next_v[i];
    Tensor<T> w = params_[i]->value;
    const Tensor<T>& gr = params_[i]->grad;
    for (std::size_t k = 0; k < w.numel(); ++k) {
      v[k] = mu * v[k] + (gr[k] + wd * w[k]);
      w[k] -= rate * v[k];
    }
    if (!w.all_finite()) throw DivergenceError("divergence detected");
    next_w.push_back(std::move(w));
  }
  velocity_ = std::move(next_v);
  for (std::size_t i = 0; i < params_.size(); ++i) params_[i]->value = std::move(next_w[i]);
}

template <typename T>
void Sgd<T>::zero_grad() {
  for (auto* p : params_) p->zero_grad();
}

double lr_at_epoch(double epoch, const LrSchedule& s) {
  const double warm = static_cast<double>(s.warmup_epochs);
  const double total = static_cast<double>(s.total_epochs);
  if (s.total_epochs == 0 || s.warmup_epochs > s.total_epochs) {
    throw ConfigError("warm-up must not exceed the schedule length");
  }
  if (!(s.peak >= s.floor && s.floor >= 0.0)) throw ConfigError("invalid learning-rate range");
  if (!(epoch >= 0.0 && epoch <= total)) throw ConfigError("epoch outside the schedule");
  if (epoch < warm) return s.peak * epoch / warm;
  if (epoch >= total || total <= warm) return s.floor;
  const double progress = (epoch - warm) / (total - warm);
  return s.floor + 0.5 * (s.peak - s.floor) * (1.0 + std::cos(std::numbers::pi * progress));
}

template class Sgd<float>;
template class Sgd<double>;

}  // namespace ovkws
