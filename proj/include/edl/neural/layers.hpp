// Copyright 2026 The EDL Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef EDL_NEURAL_LAYERS_HPP_
#define EDL_NEURAL_LAYERS_HPP_

// Forward and hand-derived backward passes for the layers used by the
// mention-detection and linking models. Backward functions accumulate into
// the gradient tensors of their ParamRefs (when bound) and return or
// accumulate input gradients.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "edl/neural/tensor.hpp"

namespace edl::nn {

using Vec = std::vector<double>;
using CSpan = std::span<const double>;

enum class Activation { Sigmoid, Tanh, Relu, Identity };

inline double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  double e = std::exp(x);
  return e / (1.0 + e);
}

inline double activate(double x, Activation a) {
  switch (a) {
    case Activation::Sigmoid: return sigmoid(x);
    case Activation::Tanh: return std::tanh(x);
    case Activation::Relu: return x > 0 ? x : 0.0;
    case Activation::Identity: return x;
  }
  return x;
}

// Derivative expressed through the activation output y.
inline double activation_grad(double y, Activation a) {
  switch (a) {
    case Activation::Sigmoid: return y * (1.0 - y);
    case Activation::Tanh: return 1.0 - y * y;
    case Activation::Relu: return y > 0 ? 1.0 : 0.0;
    case Activation::Identity: return 1.0;
  }
  return 1.0;
}

// y += W x, W is out x in.
inline void matvec_acc(const Tensor& w, CSpan x, std::span<double> y) {
  const size_t rows = w.dim(0), cols = w.dim(1);
  const double* p = w.data();
  for (size_t i = 0; i < rows; ++i) {
    double s = 0;
    const double* r = p + i * cols;
    for (size_t j = 0; j < cols; ++j) s += r[j] * x[j];
    y[i] += s;
  }
}

// dx += W^T d
inline void matvec_t_acc(const Tensor& w, CSpan d, std::span<double> dx) {
  const size_t rows = w.dim(0), cols = w.dim(1);
  const double* p = w.data();
  for (size_t i = 0; i < rows; ++i) {
    const double di = d[i];
    if (di == 0) continue;
    const double* r = p + i * cols;
    for (size_t j = 0; j < cols; ++j) dx[j] += r[j] * di;
  }
}

// G += d x^T
inline void outer_acc(Tensor& g, CSpan d, CSpan x) {
  const size_t rows = g.dim(0), cols = g.dim(1);
  double* p = g.data();
  for (size_t i = 0; i < rows; ++i) {
    const double di = d[i];
    if (di == 0) continue;
    double* r = p + i * cols;
    for (size_t j = 0; j < cols; ++j) r[j] += di * x[j];
  }
}

inline void add_to(std::span<double> acc, CSpan v) {
  for (size_t i = 0; i < acc.size(); ++i) acc[i] += v[i];
}

inline Vec concat(std::initializer_list<CSpan> parts) {
  Vec out;
  size_t n = 0;
  for (auto p : parts) n += p.size();
  out.reserve(n);
  for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

// ---------------------------------------------------------------------------
// Dense

inline Vec dense(const Tensor& w, const Tensor& b, CSpan x, Activation act) {
  if (w.rank() != 2 || b.size() != w.dim(0))
    throw Error(ErrorCode::ShapeMismatch, "dense: weight/bias shapes");
  require_size(x.size(), w.dim(1), "dense input");
  Vec y(b.values().begin(), b.values().end());
  matvec_acc(w, x, y);
  for (double& v : y) v = activate(v, act);
  return y;
}

// Returns dL/dx given the forward input x, output y and dL/dy. The output
// is not read for the identity activation.
inline Vec dense_backward(const ParamRef& w, const ParamRef& b, CSpan x,
                          CSpan y, CSpan dy, Activation act) {
  Vec da(dy.size());
  for (size_t i = 0; i < dy.size(); ++i)
    da[i] = act == Activation::Identity ? dy[i]
                                        : dy[i] * activation_grad(y[i], act);
  if (w.grad) outer_acc(*w.grad, da, x);
  if (b.grad) add_to(b.grad->values(), da);
  Vec dx(x.size(), 0.0);
  matvec_t_acc(*w.value, da, dx);
  return dx;
}

inline void add_dense(ParameterStore& store, const std::string& prefix,
                      size_t in, size_t out, Rng& rng) {
  init_glorot(store.add(prefix + ".W", {out, in}).value, in, out, rng);
  store.add(prefix + ".b", {out});
}

struct DenseRef {
  ParamRef w, b;
};

template <typename Store>
DenseRef bind_dense(Store& store, const std::string& prefix) {
  return {store.ref(prefix + ".W"), store.ref(prefix + ".b")};
}

// ---------------------------------------------------------------------------
// Softmax

inline double logsumexp(CSpan v) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : v) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

inline Vec softmax(CSpan logits) {
  if (logits.empty()) throw Error(ErrorCode::ShapeMismatch, "softmax: empty");
  double m = *std::max_element(logits.begin(), logits.end());
  Vec out(logits.size());
  double s = 0;
  for (size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    s += out[i];
  }
  for (double& v : out) v /= s;
  return out;
}

inline Vec log_softmax(CSpan logits) {
  double lse = logsumexp(logits);
  Vec out(logits.size());
  for (size_t i = 0; i < logits.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

// ---------------------------------------------------------------------------
// Embeddings: uniform in +-0.1.

inline void add_embedding(ParameterStore& store, const std::string& name,
                          size_t rows, size_t dim, Rng& rng) {
  init_uniform(store.add(name, {rows, dim}).value, 0.1, rng);
}

// ---------------------------------------------------------------------------
// 1-D convolution with zero "same" padding.
//   out[t, f] = bias[f] + sum_{j, d} in[t + j - w/2, d] * kernel[j, d, f]

inline Tensor conv1d_same(const Tensor& input, const Tensor& kernel,
                          const Tensor& bias) {
  if (input.rank() != 2 || kernel.rank() != 3)
    throw Error(ErrorCode::ShapeMismatch, "conv1d: ranks");
  const size_t steps = input.dim(0), in_dim = input.dim(1);
  const size_t width = kernel.dim(0), maps = kernel.dim(2);
  if (kernel.dim(1) != in_dim || bias.size() != maps)
    throw Error(ErrorCode::ShapeMismatch, "conv1d: kernel " +
                                              shape_string(kernel.shape()) +
                                              " vs input " +
                                              shape_string(input.shape()));
  if (width % 2 == 0)
    throw Error(ErrorCode::ShapeMismatch, "conv1d: filter width must be odd");
  const long half = static_cast<long>(width / 2);
  Tensor out = Tensor::mat(steps, maps);
  for (size_t t = 0; t < steps; ++t) {
    double* o = out.data() + t * maps;
    for (size_t f = 0; f < maps; ++f) o[f] = bias[f];
    for (size_t j = 0; j < width; ++j) {
      long src = static_cast<long>(t) + static_cast<long>(j) - half;
      if (src < 0 || src >= static_cast<long>(steps)) continue;
      const double* in = input.data() + static_cast<size_t>(src) * in_dim;
      const double* k = kernel.data() + j * in_dim * maps;
      for (size_t d = 0; d < in_dim; ++d) {
        const double v = in[d];
        if (v == 0) continue;
        const double* kr = k + d * maps;
        for (size_t f = 0; f < maps; ++f) o[f] += v * kr[f];
      }
    }
  }
  return out;
}

// Returns dL/dinput.
inline Tensor conv1d_same_backward(const Tensor& input, const ParamRef& kernel,
                                   const ParamRef& bias, const Tensor& d_out) {
  const size_t steps = input.dim(0), in_dim = input.dim(1);
  const size_t width = kernel->dim(0), maps = kernel->dim(2);
  const long half = static_cast<long>(width / 2);
  Tensor d_in = Tensor::mat(steps, in_dim);
  for (size_t t = 0; t < steps; ++t) {
    const double* g = d_out.data() + t * maps;
    if (bias.grad)
      for (size_t f = 0; f < maps; ++f) (*bias.grad)[f] += g[f];
    for (size_t j = 0; j < width; ++j) {
      long src = static_cast<long>(t) + static_cast<long>(j) - half;
      if (src < 0 || src >= static_cast<long>(steps)) continue;
      const double* in = input.data() + static_cast<size_t>(src) * in_dim;
      double* din = d_in.data() + static_cast<size_t>(src) * in_dim;
      const double* k = kernel->data() + j * in_dim * maps;
      double* gk = kernel.grad ? kernel.grad->data() + j * in_dim * maps
                               : nullptr;
      for (size_t d = 0; d < in_dim; ++d) {
        const double* kr = k + d * maps;
        double s = 0;
        for (size_t f = 0; f < maps; ++f) s += kr[f] * g[f];
        din[d] += s;
        if (gk) {
          double* gr = gk + d * maps;
          const double v = in[d];
          for (size_t f = 0; f < maps; ++f) gr[f] += v * g[f];
        }
      }
    }
  }
  return d_in;
}

// ---------------------------------------------------------------------------
// GRU cell:
//   z = sigmoid(Wz x + Uz h + bz)
//   r = sigmoid(Wr x + Ur h + br)
//   c = tanh(Wh x + Uh (r * h) + bh)
//   h' = (1 - z) * h + z * c

struct GruRef {
  ParamRef wz, uz, bz, wr, ur, br, wh, uh, bh;
  size_t input_dim() const { return wz->dim(1); }
  size_t hidden_dim() const { return wz->dim(0); }
};

inline void add_gru(ParameterStore& store, const std::string& prefix,
                    size_t in, size_t hidden, Rng& rng) {
  for (const char* gate : {"z", "r", "h"}) {
    std::string g(gate);
    init_glorot(store.add(prefix + ".W" + g, {hidden, in}).value, in, hidden,
                rng);
    init_glorot(store.add(prefix + ".U" + g, {hidden, hidden}).value, hidden,
                hidden, rng);
    store.add(prefix + ".b" + g, {hidden});
  }
}

template <typename Store>
GruRef bind_gru(Store& store, const std::string& prefix) {
  return {store.ref(prefix + ".Wz"), store.ref(prefix + ".Uz"),
          store.ref(prefix + ".bz"), store.ref(prefix + ".Wr"),
          store.ref(prefix + ".Ur"), store.ref(prefix + ".br"),
          store.ref(prefix + ".Wh"), store.ref(prefix + ".Uh"),
          store.ref(prefix + ".bh")};
}

struct GruCache {
  Vec x, h_prev, z, r, rh, c;
};

inline Vec gru_step(const GruRef& p, CSpan h, CSpan x,
                    GruCache* cache = nullptr) {
  const size_t hd = p.hidden_dim();
  require_size(h.size(), hd, "gru state");
  require_size(x.size(), p.input_dim(), "gru input");
  Vec z(p.bz->values().begin(), p.bz->values().end());
  Vec r(p.br->values().begin(), p.br->values().end());
  Vec c(p.bh->values().begin(), p.bh->values().end());
  matvec_acc(*p.wz, x, z);
  matvec_acc(*p.uz, h, z);
  matvec_acc(*p.wr, x, r);
  matvec_acc(*p.ur, h, r);
  for (size_t i = 0; i < hd; ++i) {
    z[i] = sigmoid(z[i]);
    r[i] = sigmoid(r[i]);
  }
  Vec rh(hd);
  for (size_t i = 0; i < hd; ++i) rh[i] = r[i] * h[i];
  matvec_acc(*p.wh, x, c);
  matvec_acc(*p.uh, rh, c);
  Vec out(hd);
  for (size_t i = 0; i < hd; ++i) {
    c[i] = std::tanh(c[i]);
    out[i] = (1.0 - z[i]) * h[i] + z[i] * c[i];
  }
  if (cache) {
    cache->x.assign(x.begin(), x.end());
    cache->h_prev.assign(h.begin(), h.end());
    cache->z = std::move(z);
    cache->r = std::move(r);
    cache->rh = std::move(rh);
    cache->c = std::move(c);
  }
  return out;
}

// Accumulates dL/dx into dx and dL/dh_prev into dh_prev.
inline void gru_backward(const GruRef& p, const GruCache& k, CSpan dh_next,
                         std::span<double> dx, std::span<double> dh_prev) {
  const size_t hd = p.hidden_dim();
  Vec daz(hd), dac(hd), dar(hd), drh(hd, 0.0);
  for (size_t i = 0; i < hd; ++i) {
    const double g = dh_next[i];
    dh_prev[i] += g * (1.0 - k.z[i]);
    const double dz = g * (k.c[i] - k.h_prev[i]);
    daz[i] = dz * k.z[i] * (1.0 - k.z[i]);
    dac[i] = g * k.z[i] * (1.0 - k.c[i] * k.c[i]);
  }
  matvec_t_acc(*p.uh, dac, drh);
  for (size_t i = 0; i < hd; ++i) {
    dh_prev[i] += drh[i] * k.r[i];
    const double dr = drh[i] * k.h_prev[i];
    dar[i] = dr * k.r[i] * (1.0 - k.r[i]);
  }
  matvec_t_acc(*p.wz, daz, dx);
  matvec_t_acc(*p.wr, dar, dx);
  matvec_t_acc(*p.wh, dac, dx);
  matvec_t_acc(*p.uz, daz, dh_prev);
  matvec_t_acc(*p.ur, dar, dh_prev);
  if (p.wz.grad) {
    outer_acc(*p.wz.grad, daz, k.x);
    outer_acc(*p.uz.grad, daz, k.h_prev);
    add_to(p.bz.grad->values(), daz);
    outer_acc(*p.wr.grad, dar, k.x);
    outer_acc(*p.ur.grad, dar, k.h_prev);
    add_to(p.br.grad->values(), dar);
    outer_acc(*p.wh.grad, dac, k.x);
    outer_acc(*p.uh.grad, dac, k.rh);
    add_to(p.bh.grad->values(), dac);
  }
}

}  // namespace edl::nn

#endif  // EDL_NEURAL_LAYERS_HPP_
