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

#include "ovkws/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "ovkws/error.hpp"

namespace ovkws {

std::size_t shape_numel(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

std::string shape_string(const Shape& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + ")";
}

template <typename T>
Tensor<T>::Tensor(Shape s, std::vector<T> values) : shape(std::move(s)), data(std::move(values)) {
  if (data.size() != shape_numel(shape)) {
    throw Error("tensor data does not match shape " + shape_string(shape));
  }
}

template <typename T>
bool Tensor<T>::all_finite() const {
  return std::all_of(data.begin(), data.end(), [](T v) { return std::isfinite(v); });
}

template <typename T>
const typename Graph<T>::Node& Graph<T>::node(Var v) const {
  if (!v.valid() || v.id >= nodes_.size()) throw Error("variable not recorded on this graph");
  return nodes_[v.id];
}

template <typename T>
typename Graph<T>::Node& Graph<T>::node(Var v) {
  if (!v.valid() || v.id >= nodes_.size()) throw Error("variable not recorded on this graph");
  return nodes_[v.id];
}

template <typename T>
Var Graph<T>::input(Tensor<T> value, bool requires_grad) {
  nodes_.push_back(Node{std::move(value), {}, {}, nullptr, requires_grad});
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Graph<T>::parameter(Parameter<T>& param) {
  nodes_.push_back(Node{param.value, {}, {}, &param, true});
  return Var{nodes_.size() - 1};
}

template <typename T>
Var Graph<T>::record(Tensor<T> value, std::initializer_list<Var> inputs, BackwardFn backward) {
  bool rg = false;
  for (Var in : inputs) rg = rg || node(in).requires_grad;
  nodes_.push_back(Node{std::move(value), {}, rg ? std::move(backward) : BackwardFn{}, nullptr, rg});
  return Var{nodes_.size() - 1};
}

template <typename T>
const Tensor<T>& Graph<T>::value(Var v) const {
  return node(v).value;
}

template <typename T>
bool Graph<T>::requires_grad(Var v) const {
  return node(v).requires_grad;
}

template <typename T>
Tensor<T> Graph<T>::grad(Var v) const {
  const Node& n = node(v);
  if (n.grad.shape == n.value.shape) return n.grad;
  return Tensor<T>(n.value.shape);
}

template <typename T>
Tensor<T>& Graph<T>::grad_buffer(Var v) {
  Node& n = node(v);
  if (n.grad.shape != n.value.shape) n.grad = Tensor<T>(n.value.shape);
  return n.grad;
}

template <typename T>
void Graph<T>::backward(Var out, const Tensor<T>& seed) {
  if (!out.valid() || out.id >= nodes_.size()) throw Error("backward without forward");
  if (backward_done_) throw Error("backward called twice on one graph");
  Node& root = nodes_[out.id];
  if (!root.requires_grad) throw Error("output does not depend on any trainable value");
  if (seed.shape != root.value.shape) throw Error("gradient seed shape mismatch");
  root.grad = seed;
  backward_done_ = true;
  for (std::size_t i = out.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.requires_grad || n.grad.shape != n.value.shape) continue;
    if (n.backward) {
      n.backward(*this, n.grad);
    } else if (n.param) {
      auto& pg = n.param->grad;
      if (pg.shape != n.param->value.shape) pg = Tensor<T>(n.param->value.shape);
      for (std::size_t k = 0; k < pg.numel(); ++k) pg[k] += n.grad[k];
    }
  }
}

template <typename T>
void Graph<T>::backward(Var out) {
  if (!out.valid() || out.id >= nodes_.size()) throw Error("backward without forward");
  if (nodes_[out.id].value.numel() != 1) throw Error("implicit gradient seed needs a scalar output");
  backward(out, Tensor<T>(nodes_[out.id].value.shape, T(1)));
}

template struct Tensor<float>;
template struct Tensor<double>;
template class Graph<float>;
template class Graph<double>;

}  // namespace ovkws
