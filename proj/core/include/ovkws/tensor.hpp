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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "ovkws/rng.hpp"

namespace ovkws {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_string(const Shape& shape);

// Dense row-major tensor. Activations are NCHW with H the mel axis and W
// the frame axis.
template <typename T>
struct Tensor {
  Shape shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(Shape s, T fill = T(0)) : shape(std::move(s)), data(shape_numel(shape), fill) {}
  Tensor(Shape s, std::vector<T> values);

  std::size_t numel() const { return data.size(); }
  std::size_t rank() const { return shape.size(); }
  std::size_t dim(std::size_t i) const { return shape.at(i); }
  bool empty() const { return data.empty(); }
  T* ptr() { return data.data(); }
  const T* ptr() const { return data.data(); }
  T& operator[](std::size_t i) { return data[i]; }
  const T& operator[](std::size_t i) const { return data[i]; }

  void fill(T value) { std::fill(data.begin(), data.end(), value); }
  bool all_finite() const;

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.assign(data.begin(), data.end());
    return out;
  }
};

template <typename T>
struct Parameter {
  std::string name;
  Tensor<T> value;
  Tensor<T> grad;

  void zero_grad() {
    if (grad.shape != value.shape) grad = Tensor<T>(value.shape);
    else grad.fill(T(0));
  }
};

// Non-trainable state saved with a model, e.g. running statistics.
template <typename T>
struct Buffer {
  std::string name;
  Tensor<T> value;
};

enum class Mode { kTrain, kEval };

struct Var {
  static constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
  std::size_t id = kNone;
  bool valid() const { return id != kNone; }
};

// Reverse-mode tape. Each op records its output value and a closure that
// propagates the output gradient into its inputs. Nodes are never moved, so
// references returned by value() stay valid until the graph is destroyed.
template <typename T>
class Graph {
 public:
  using BackwardFn = std::function<void(Graph&, const Tensor<T>& out_grad)>;

  explicit Graph(Mode mode = Mode::kTrain, std::uint64_t seed = 0)
      : mode_(mode), rng_(seed) {}

  Var input(Tensor<T> value, bool requires_grad = false);
  Var parameter(Parameter<T>& param);
  // Records an op output. The node requires a gradient when any input does.
  Var record(Tensor<T> value, std::initializer_list<Var> inputs, BackwardFn backward);

  const Tensor<T>& value(Var v) const;
  bool requires_grad(Var v) const;
  // Gradient accumulated by the last backward pass; zeros if none reached v.
  Tensor<T> grad(Var v) const;
  // Accumulation target used by backward closures.
  Tensor<T>& grad_buffer(Var v);

  // Seeds d(out) = seed and runs the tape in reverse. Parameter gradients
  // are added into Parameter::grad.
  void backward(Var out, const Tensor<T>& seed);
  // Scalar outputs only: seed = 1.
  void backward(Var out);

  Mode mode() const { return mode_; }
  bool training() const { return mode_ == Mode::kTrain; }
  Rng& rng() { return rng_; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor<T> value;
    Tensor<T> grad;
    BackwardFn backward;
    Parameter<T>* param = nullptr;
    bool requires_grad = false;
  };
  const Node& node(Var v) const;
  Node& node(Var v);

  std::deque<Node> nodes_;
  Mode mode_;
  Rng rng_;
  bool backward_done_ = false;
};

extern template struct Tensor<float>;
extern template struct Tensor<double>;
extern template class Graph<float>;
extern template class Graph<double>;

}  // namespace ovkws
