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

#include "ovkws/ops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <random>

#include "ovkws/error.hpp"

namespace ovkws {

namespace {

using i64 = std::int64_t;

i64 floor_div(i64 a, i64 b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }
i64 ceil_div(i64 a, i64 b) { return -floor_div(-a, b); }

void require_rank4(const Shape& s, const char* what) {
  if (s.size() != 4) throw ConfigError(std::string(what) + " expects an (N, C, H, W) tensor");
}

// Output positions o with o * stride - pad + k * dil inside [0, in).
std::pair<i64, i64> valid_range(i64 in, i64 out, i64 k, i64 stride, i64 pad, i64 dil) {
  const i64 shift = pad - k * dil;
  const i64 lo = std::max<i64>(0, ceil_div(shift, stride));
  const i64 hi = std::min<i64>(out, floor_div(in - 1 + shift, stride) + 1);
  return {lo, hi};
}

template <typename T>
void accumulate(Tensor<T>& dst, const Tensor<T>& src) {
  for (std::size_t i = 0; i < dst.numel(); ++i) dst[i] += src[i];
}

}  // namespace

Shape conv2d_output_shape(const Shape& in, std::size_t out_channels, const Conv2dGeometry& geo) {
  require_rank4(in, "conv2d");
  if (geo.groups == 0 || in[1] % geo.groups != 0 || out_channels % geo.groups != 0) {
    throw ConfigError("channels not divisible by groups");
  }
  Shape out{in[0], out_channels, 0, 0};
  for (int a = 0; a < 2; ++a) {
    const i64 span = static_cast<i64>(geo.dilation[a] * (geo.kernel[a] - 1) + 1);
    const i64 padded = static_cast<i64>(in[2 + a] + 2 * geo.padding[a]);
    if (geo.stride[a] == 0 || geo.kernel[a] == 0 || padded < span) {
      throw ConfigError("convolution kernel larger than padded input");
    }
    out[2 + a] = static_cast<std::size_t>((padded - span) / static_cast<i64>(geo.stride[a]) + 1);
  }
  return out;
}

template <typename T>
Var conv2d(Graph<T>& g, Var x, Var weight, Var bias, const Conv2dGeometry& geo) {
  const Tensor<T>& X = g.value(x);
  const Tensor<T>& Wt = g.value(weight);
  if (Wt.rank() != 4) throw ConfigError("conv2d weight must be rank 4");
  const Shape out_shape = conv2d_output_shape(X.shape, Wt.dim(0), geo);
  const std::size_t N = X.dim(0), C = X.dim(1), H = X.dim(2), W = X.dim(3);
  const std::size_t OC = Wt.dim(0), OH = out_shape[2], OW = out_shape[3];
  const std::size_t icg = C / geo.groups, ocg = OC / geo.groups;
  const std::size_t KH = geo.kernel[0], KW = geo.kernel[1];
  if (Wt.dim(1) != icg || Wt.dim(2) != KH || Wt.dim(3) != KW) {
    throw ConfigError("conv2d weight shape " + shape_string(Wt.shape) + " does not match geometry");
  }
  if (bias.valid() && g.value(bias).numel() != OC) throw ConfigError("conv2d bias size mismatch");

  // Visits every (output row, input row, weight) triple; f receives
  // contiguous output and input rows plus the tap offset along W.
  auto for_each_tap = [=](auto&& f) {
    for (std::size_t n = 0; n < N; ++n) {
      for (std::size_t oc = 0; oc < OC; ++oc) {
        const std::size_t grp = oc / ocg;
        for (std::size_t icl = 0; icl < icg; ++icl) {
          const std::size_t ic = grp * icg + icl;
          for (std::size_t kh = 0; kh < KH; ++kh) {
            const auto [oh_lo, oh_hi] =
                valid_range(H, OH, kh, geo.stride[0], geo.padding[0], geo.dilation[0]);
            for (std::size_t kw = 0; kw < KW; ++kw) {
              const auto [ow_lo, ow_hi] =
                  valid_range(W, OW, kw, geo.stride[1], geo.padding[1], geo.dilation[1]);
              if (ow_lo >= ow_hi) continue;
              const std::size_t widx = ((oc * icg + icl) * KH + kh) * KW + kw;
              for (i64 oh = oh_lo; oh < oh_hi; ++oh) {
                const i64 ih = oh * static_cast<i64>(geo.stride[0]) -
                               static_cast<i64>(geo.padding[0]) +
                               static_cast<i64>(kh * geo.dilation[0]);
                const std::size_t out_row = ((n * OC + oc) * OH + oh) * OW;
                const std::size_t in_row = ((n * C + ic) * H + ih) * W;
                const i64 off = static_cast<i64>(kw * geo.dilation[1]) -
                                static_cast<i64>(geo.padding[1]);
                f(out_row, in_row, widx, ow_lo, ow_hi, off);
              }
            }
          }
        }
      }
    }
  };
  const std::size_t sw = geo.stride[1];

  Tensor<T> Y(out_shape);
  if (bias.valid()) {
    const Tensor<T>& B = g.value(bias);
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t oc = 0; oc < OC; ++oc)
        std::fill_n(Y.ptr() + (n * OC + oc) * OH * OW, OH * OW, B[oc]);
  }
  {
    T* y = Y.ptr();
    const T* xin = X.ptr();
    const T* w = Wt.ptr();
    for_each_tap([&](std::size_t orow, std::size_t irow, std::size_t widx, i64 lo, i64 hi, i64 off) {
      const T wv = w[widx];
      T* yr = y + orow;
      const T* xr = xin + irow;
      if (sw == 1) {
        for (i64 ow = lo; ow < hi; ++ow) yr[ow] += wv * xr[ow + off];
      } else {
        for (i64 ow = lo; ow < hi; ++ow) yr[ow] += wv * xr[ow * static_cast<i64>(sw) + off];
      }
    });
  }

  return g.record(std::move(Y), {x, weight, bias.valid() ? bias : x},
                  [=](Graph<T>& gr, const Tensor<T>& dY) {
    const Tensor<T>& Xv = gr.value(x);
    const Tensor<T>& Wv = gr.value(weight);
    const bool need_x = gr.requires_grad(x);
    const bool need_w = gr.requires_grad(weight);
    T* dx = need_x ? gr.grad_buffer(x).ptr() : nullptr;
    T* dw = need_w ? gr.grad_buffer(weight).ptr() : nullptr;
    const T* dy = dY.ptr();
    const T* xin = Xv.ptr();
    const T* w = Wv.ptr();
    for_each_tap([&](std::size_t orow, std::size_t irow, std::size_t widx, i64 lo, i64 hi, i64 off) {
      const T* dyr = dy + orow;
      const i64 s = static_cast<i64>(sw);
      if (dx) {
        const T wv = w[widx];
        T* dxr = dx + irow;
        for (i64 ow = lo; ow < hi; ++ow) dxr[ow * s + off] += wv * dyr[ow];
      }
      if (dw) {
        const T* xr = xin + irow;
        T acc = 0;
        for (i64 ow = lo; ow < hi; ++ow) acc += dyr[ow] * xr[ow * s + off];
        dw[widx] += acc;
      }
    });
    if (bias.valid() && gr.requires_grad(bias)) {
      T* db = gr.grad_buffer(bias).ptr();
      for (std::size_t n = 0; n < N; ++n)
        for (std::size_t oc = 0; oc < OC; ++oc) {
          const T* p = dy + (n * OC + oc) * OH * OW;
          T acc = 0;
          for (std::size_t i = 0; i < OH * OW; ++i) acc += p[i];
          db[oc] += acc;
        }
    }
  });
}

template <typename T>
Var batch_norm(Graph<T>& g, Var x, Var gamma, Var beta, Tensor<T>& running_mean,
               Tensor<T>& running_var, const NormOptions& opt) {
  const Tensor<T>& X = g.value(x);
  require_rank4(X.shape, "batch_norm");
  const std::size_t N = X.dim(0), C = X.dim(1), H = X.dim(2), W = X.dim(3);
  const std::size_t S = opt.sub_bands;
  if (S == 0 || H % S != 0) throw ConfigError("frequency bins not divisible by sub-bands");
  const std::size_t G = C * S, band = H / S;
  if (g.value(gamma).numel() != G || g.value(beta).numel() != G ||
      running_mean.numel() != G || running_var.numel() != G) {
    throw ConfigError("normalization parameter size mismatch");
  }
  const std::size_t m = N * band * W;
  const std::size_t span = band * W;  // contiguous run per (n, group)
  auto run = [=](std::size_t n, std::size_t grp) {
    const std::size_t c = grp / S, s = grp % S;
    return ((n * C + c) * H + s * band) * W;
  };

  auto mean = std::make_shared<std::vector<T>>(G);
  auto invstd = std::make_shared<std::vector<T>>(G);
  const bool train = g.training();
  if (train) {
    if (m < 2) throw DataError("batch norm needs more than one value per channel");
    for (std::size_t grp = 0; grp < G; ++grp) {
      double sum = 0.0;
      for (std::size_t n = 0; n < N; ++n) {
        const T* p = X.ptr() + run(n, grp);
        for (std::size_t i = 0; i < span; ++i) sum += p[i];
      }
      const double mu = sum / static_cast<double>(m);
      double ss = 0.0;
      for (std::size_t n = 0; n < N; ++n) {
        const T* p = X.ptr() + run(n, grp);
        for (std::size_t i = 0; i < span; ++i) {
          const double d = p[i] - mu;
          ss += d * d;
        }
      }
      const double var = ss / static_cast<double>(m);
      (*mean)[grp] = static_cast<T>(mu);
      (*invstd)[grp] = static_cast<T>(1.0 / std::sqrt(var + opt.eps));
      const double unbiased = ss / static_cast<double>(m - 1);
      running_mean[grp] = static_cast<T>((1.0 - opt.momentum) * running_mean[grp] + opt.momentum * mu);
      running_var[grp] = static_cast<T>((1.0 - opt.momentum) * running_var[grp] + opt.momentum * unbiased);
    }
  } else {
    for (std::size_t grp = 0; grp < G; ++grp) {
      (*mean)[grp] = running_mean[grp];
      (*invstd)[grp] = static_cast<T>(1.0 / std::sqrt(static_cast<double>(running_var[grp]) + opt.eps));
    }
  }

  const Tensor<T>& gm = g.value(gamma);
  const Tensor<T>& bt = g.value(beta);
  Tensor<T> Y(X.shape);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t grp = 0; grp < G; ++grp) {
      const T* p = X.ptr() + run(n, grp);
      T* q = Y.ptr() + run(n, grp);
      const T mu = (*mean)[grp], is = (*invstd)[grp], a = gm[grp], b = bt[grp];
      for (std::size_t i = 0; i < span; ++i) q[i] = a * (p[i] - mu) * is + b;
    }
  }

  return g.record(std::move(Y), {x, gamma, beta}, [=](Graph<T>& gr, const Tensor<T>& dY) {
    const Tensor<T>& Xv = gr.value(x);
    const Tensor<T>& gv = gr.value(gamma);
    T* dx = gr.requires_grad(x) ? gr.grad_buffer(x).ptr() : nullptr;
    T* dg = gr.requires_grad(gamma) ? gr.grad_buffer(gamma).ptr() : nullptr;
    T* db = gr.requires_grad(beta) ? gr.grad_buffer(beta).ptr() : nullptr;
    for (std::size_t grp = 0; grp < G; ++grp) {
      const T mu = (*mean)[grp], is = (*invstd)[grp];
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (std::size_t n = 0; n < N; ++n) {
        const T* p = Xv.ptr() + run(n, grp);
        const T* d = dY.ptr() + run(n, grp);
        for (std::size_t i = 0; i < span; ++i) {
          sum_dy += d[i];
          sum_dy_xhat += d[i] * (p[i] - mu) * is;
        }
      }
      if (dg) dg[grp] += static_cast<T>(sum_dy_xhat);
      if (db) db[grp] += static_cast<T>(sum_dy);
      if (!dx) continue;
      const T scale = gv[grp] * is;
      if (train) {
        const T mdy = static_cast<T>(sum_dy / static_cast<double>(m));
        const T mdyx = static_cast<T>(sum_dy_xhat / static_cast<double>(m));
        for (std::size_t n = 0; n < N; ++n) {
          const T* p = Xv.ptr() + run(n, grp);
          const T* d = dY.ptr() + run(n, grp);
          T* o = dx + run(n, grp);
          for (std::size_t i = 0; i < span; ++i) {
            const T xhat = (p[i] - mu) * is;
            o[i] += scale * (d[i] - mdy - xhat * mdyx);
          }
        }
      } else {
        for (std::size_t n = 0; n < N; ++n) {
          const T* d = dY.ptr() + run(n, grp);
          T* o = dx + run(n, grp);
          for (std::size_t i = 0; i < span; ++i) o[i] += scale * d[i];
        }
      }
    }
  });
}

template <typename T>
Var relu(Graph<T>& g, Var x) {
  Tensor<T> Y = g.value(x);
  for (auto& v : Y.data) v = v > T(0) ? v : T(0);
  return g.record(std::move(Y), {x}, [=](Graph<T>& gr, const Tensor<T>& dY) {
    const Tensor<T>& Xv = gr.value(x);
    Tensor<T>& dX = gr.grad_buffer(x);
    for (std::size_t i = 0; i < dX.numel(); ++i) {
      if (Xv[i] > T(0)) dX[i] += dY[i];
    }
  });
}

template <typename T>
Var swish(Graph<T>& g, Var x) {
  Tensor<T> Y = g.value(x);
  for (auto& v : Y.data) v = v / (T(1) + std::exp(-v));
  return g.record(std::move(Y), {x}, [=](Graph<T>& gr, const Tensor<T>& dY) {
    const Tensor<T>& Xv = gr.value(x);
    Tensor<T>& dX = gr.grad_buffer(x);
    for (std::size_t i = 0; i < dX.numel(); ++i) {
      const T s = T(1) / (T(1) + std::exp(-Xv[i]));
      dX[i] += dY[i] * s * (T(1) + Xv[i] * (T(1) - s));
    }
  });
}

template <typename T>
Var add(Graph<T>& g, Var a, Var b) {
  if (g.value(a).shape != g.value(b).shape) throw ConfigError("add: shape mismatch");
  Tensor<T> Y = g.value(a);
  const Tensor<T>& B = g.value(b);
  for (std::size_t i = 0; i < Y.numel(); ++i) Y[i] += B[i];
  return g.record(std::move(Y), {a, b}, [=](Graph<T>& gr, const Tensor<T>& dY) {
    if (gr.requires_grad(a)) accumulate(gr.grad_buffer(a), dY);
    if (gr.requires_grad(b)) accumulate(gr.grad_buffer(b), dY);
  });
}

template <typename T>
Var mean_freq(Graph<T>& g, Var x) {
  const Tensor<T>& X = g.value(x);
  require_rank4(X.shape, "mean_freq");
  const std::size_t NC = X.dim(0) * X.dim(1), H = X.dim(2), W = X.dim(3);
  Tensor<T> Y({X.dim(0), X.dim(1), 1, W});
  const T inv = T(1) / static_cast<T>(H);
  for (std::size_t nc = 0; nc < NC; ++nc) {
    T* y = Y.ptr() + nc * W;
    for (std::size_t h = 0; h < H; ++h) {
      const T* p = X.ptr() + (nc * H + h) * W;
      for (std::size_t w = 0; w < W; ++w) y[w] += p[w];
    }
    for (std::size_t w = 0; w < W; ++w) y[w] *= inv;
  }
  return g.record(std::move(Y), {x}, [=](Graph<T>& gr, const Tensor<T>& dY) {
    T* dx = gr.grad_buffer(x).ptr();
    for (std::size_t nc = 0; nc < NC; ++nc) {
      const T* d = dY.ptr() + nc * W;
      for (std::size_t h = 0; h < H; ++h) {
        T* o = dx + (nc * H + h) * W;
        for (std::size_t w = 0; w < W; ++w) o[w] += d[w] * inv;
      }
    }
  });
}

template <typename T>
Var broadcast_freq(Graph<T>& g, Var x, std::size_t bins) {
  const Tensor<T>& X = g.value(x);
  require_rank4(X.shape, "broadcast_freq");
  if (X.dim(2) != 1) throw ConfigError("broadcast_freq expects a single frequency row");
  const std::size_t NC = X.dim(0) * X.dim(1), W = X.dim(3);
  Tensor<T> Y({X.dim(0), X.dim(1), bins, W});
  for (std::size_t nc = 0; nc < NC; ++nc)
    for (std::size_t h = 0; h < bins; ++h)
      std::copy_n(X.ptr() + nc * W, W, Y.ptr() + (nc * bins + h) * W);
  return g.record(std::move(Y), {x}, [=](Graph<T>& gr, const Tensor<T>& dY) {
    T* dx = gr.grad_buffer(x).ptr();
    for (std::size_t nc = 0; nc < NC; ++nc)
      for (std::size_t h = 0; h < bins; ++h) {
        const T* d = dY.ptr() + (nc * bins + h) * W;
        for (std::size_t w = 0; w < W; ++w) dx[nc * W + w] += d[w];
      }
  });
}

template <typename T>
Var global_avg_pool(Graph<T>& g, Var x) {
  const Tensor<T>& X = g.value(x);
  require_rank4(X.shape, "global_avg_pool");
  const std::size_t NC = X.dim(0) * X.dim(1), HW = X.dim(2) * X.dim(3);
  Tensor<T> Y({X.dim(0), X.dim(1), 1, 1});
  for (std::size_t nc = 0; nc < NC; ++nc) {
    T acc = 0;
    for (std::size_t i = 0; i < HW; ++i) acc += X[nc * HW + i];
    Y[nc] = acc / static_cast<T>(HW);
  }
  return g.record(std::move(Y), {x}, [=](Graph<T>& gr, const Tensor<T>& dY) {
    T* dx = gr.grad_buffer(x).ptr();
    for (std::size_t nc = 0; nc < NC; ++nc) {
      const T d = dY[nc] / static_cast<T>(HW);
      for (std::size_t i = 0; i < HW; ++i) dx[nc * HW + i] += d;
    }
  });
}

template <typename T>
Var flatten(Graph<T>& g, Var x) {
  Tensor<T> Y = g.value(x);
  if (Y.rank() < 2) throw ConfigError("flatten expects a batch axis");
  Y.shape = {Y.dim(0), Y.numel() / Y.dim(0)};
  return g.record(std::move(Y), {x}, [=](Graph<T>& gr, const Tensor<T>& dY) {
    accumulate(gr.grad_buffer(x), dY);
  });
}

template <typename T>
Var dropout_channels(Graph<T>& g, Var x, double rate) {
  if (rate < 0.0 || rate >= 1.0) throw ConfigError("dropout rate must be in [0, 1)");
  if (!g.training() || rate == 0.0) return x;
  const Tensor<T>& X = g.value(x);
  require_rank4(X.shape, "dropout_channels");
  const std::size_t NC = X.dim(0) * X.dim(1), HW = X.dim(2) * X.dim(3);
  auto mask = std::make_shared<std::vector<T>>(NC);
  std::bernoulli_distribution keep(1.0 - rate);
  const T scale = static_cast<T>(1.0 / (1.0 - rate));
  for (auto& m : *mask) m = keep(g.rng()) ? scale : T(0);
  Tensor<T> Y = X;
  for (std::size_t nc = 0; nc < NC; ++nc)
    for (std::size_t i = 0; i < HW; ++i) Y[nc * HW + i] *= (*mask)[nc];
  return g.record(std::move(Y), {x}, [=](Graph<T>& gr, const Tensor<T>& dY) {
    T* dx = gr.grad_buffer(x).ptr();
    for (std::size_t nc = 0; nc < NC; ++nc)
      for (std::size_t i = 0; i < HW; ++i) dx[nc * HW + i] += dY[nc * HW + i] * (*mask)[nc];
  });
}

template <typename T>
Var weighted_sum(Graph<T>& g, Var x, const Tensor<T>& weights) {
  const Tensor<T>& X = g.value(x);
  if (X.numel() != weights.numel()) throw ConfigError("weighted_sum: size mismatch");
  T acc = 0;
  for (std::size_t i = 0; i < X.numel(); ++i) acc += X[i] * weights[i];
  auto w = std::make_shared<Tensor<T>>(weights);
  return g.record(Tensor<T>({1}, std::vector<T>{acc}), {x}, [=](Graph<T>& gr, const Tensor<T>& dY) {
    Tensor<T>& dX = gr.grad_buffer(x);
    for (std::size_t i = 0; i < dX.numel(); ++i) dX[i] += dY[0] * (*w)[i];
  });
}

template <typename T>
Var cross_entropy(Graph<T>& g, Var logits, const std::vector<int>& labels) {
  const Tensor<T>& L = g.value(logits);
  if (L.rank() != 2 || L.dim(0) != labels.size()) {
    throw ConfigError("cross_entropy expects (N, K) logits and N labels");
  }
  const std::size_t N = L.dim(0), K = L.dim(1);
  auto probs = std::make_shared<std::vector<T>>(N * K);
  double total = 0.0;
  for (std::size_t n = 0; n < N; ++n) {
    if (labels[n] < 0 || static_cast<std::size_t>(labels[n]) >= K) {
      throw DataError("label out of range");
    }
    const T* row = L.ptr() + n * K;
    const T mx = *std::max_element(row, row + K);
    double z = 0.0;
    for (std::size_t k = 0; k < K; ++k) z += std::exp(static_cast<double>(row[k] - mx));
    for (std::size_t k = 0; k < K; ++k) {
      (*probs)[n * K + k] = static_cast<T>(std::exp(static_cast<double>(row[k] - mx)) / z);
    }
    total += std::log(z) - static_cast<double>(row[labels[n]] - mx);
  }
  const auto lab = std::make_shared<std::vector<int>>(labels);
  Tensor<T> loss({1}, std::vector<T>{static_cast<T>(total / static_cast<double>(N))});
  return g.record(std::move(loss), {logits}, [=](Graph<T>& gr, const Tensor<T>& dY) {
    T* d = gr.grad_buffer(logits).ptr();
    const T scale = dY[0] / static_cast<T>(N);
    for (std::size_t n = 0; n < N; ++n)
      for (std::size_t k = 0; k < K; ++k) {
        const T onehot = static_cast<std::size_t>((*lab)[n]) == k ? T(1) : T(0);
        d[n * K + k] += scale * ((*probs)[n * K + k] - onehot);
      }
  });
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw ConfigError("softmax of an empty vector");
  const double mx = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double z = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) z += (p[k] = std::exp(logits[k] - mx));
  for (auto& v : p) v /= z;
  return p;
}

CrossEntropy softmax_cross_entropy(std::span<const double> logits, std::size_t label) {
  if (label >= logits.size()) throw DataError("label out of range");
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - mx);
  CrossEntropy out;
  out.loss = std::log(z) - (logits[label] - mx);
  out.grad = softmax(logits);
  out.grad[label] -= 1.0;
  return out;
}

#define OVKWS_INSTANTIATE_OPS(T)                                                             \
  template Var conv2d<T>(Graph<T>&, Var, Var, Var, const Conv2dGeometry&);                   \
  template Var batch_norm<T>(Graph<T>&, Var, Var, Var, Tensor<T>&, Tensor<T>&,               \
                             const NormOptions&);                                            \
  template Var relu<T>(Graph<T>&, Var);                                                      \
  template Var swish<T>(Graph<T>&, Var);                                                     \
  template Var add<T>(Graph<T>&, Var, Var);                                                  \
  template Var mean_freq<T>(Graph<T>&, Var);                                                 \
  template Var broadcast_freq<T>(Graph<T>&, Var, std::size_t);                               \
  template Var global_avg_pool<T>(Graph<T>&, Var);                                           \
  template Var flatten<T>(Graph<T>&, Var);                                                   \
  template Var dropout_channels<T>(Graph<T>&, Var, double);                                  \
  template Var weighted_sum<T>(Graph<T>&, Var, const Tensor<T>&);                            \
  template Var cross_entropy<T>(Graph<T>&, Var, const std::vector<int>&);

OVKWS_INSTANTIATE_OPS(float)
OVKWS_INSTANTIATE_OPS(double)

}  // namespace ovkws
