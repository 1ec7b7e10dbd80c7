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

#ifndef EDL_NEURAL_TENSOR_HPP_
#define EDL_NEURAL_TENSOR_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "edl/common.hpp"
#include "edl/random.hpp"
#include "edl/utf8.hpp"

namespace edl::nn {

// Dense row-major tensor of rank 1 to 3.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<size_t> shape, double fill = 0.0)
      : shape_(std::move(shape)) {
    if (shape_.empty() || shape_.size() > 3)
      throw Error(ErrorCode::ShapeMismatch, "tensor rank must be 1..3");
    size_t n = 1;
    for (size_t d : shape_) n *= d;
    data_.assign(n, fill);
  }

  static Tensor vec(size_t n) { return Tensor({n}); }
  static Tensor mat(size_t rows, size_t cols) { return Tensor({rows, cols}); }
  static Tensor cube(size_t a, size_t b, size_t c) { return Tensor({a, b, c}); }

  const std::vector<size_t>& shape() const { return shape_; }
  size_t rank() const { return shape_.size(); }
  size_t dim(size_t i) const { return i < shape_.size() ? shape_[i] : 1; }
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](size_t i) { return data_[i]; }
  double operator[](size_t i) const { return data_[i]; }
  double& operator()(size_t i, size_t j) { return data_[i * shape_[1] + j]; }
  double operator()(size_t i, size_t j) const {
    return data_[i * shape_[1] + j];
  }
  double& operator()(size_t i, size_t j, size_t k) {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }
  double operator()(size_t i, size_t j, size_t k) const {
    return data_[(i * shape_[1] + j) * shape_[2] + k];
  }

  // Row i of a rank-2 tensor.
  std::span<double> row(size_t i) {
    return {data_.data() + i * shape_[1], shape_[1]};
  }
  std::span<const double> row(size_t i) const {
    return {data_.data() + i * shape_[1], shape_[1]};
  }

  void fill(double v) { std::fill(data_.begin(), data_.end(), v); }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  bool operator==(const Tensor&) const = default;

 private:
  std::vector<size_t> shape_;
  std::vector<double> data_;
};

inline std::string shape_string(const std::vector<size_t>& shape) {
  std::string out;
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i) out.push_back('x');
    out += std::to_string(shape[i]);
  }
  return out;
}

inline void require_shape(const Tensor& t, const std::vector<size_t>& shape,
                          const char* what) {
  if (t.shape() != shape)
    throw Error(ErrorCode::ShapeMismatch,
                std::string(what) + ": expected " + shape_string(shape) +
                    ", got " + shape_string(t.shape()));
}

inline void require_size(size_t got, size_t want, const char* what) {
  if (got != want)
    throw Error(ErrorCode::ShapeMismatch,
                std::string(what) + ": expected length " +
                    std::to_string(want) + ", got " + std::to_string(got));
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

struct Parameter {
  Tensor value;
  Tensor grad;
};

// Read-only value plus optional gradient sink. Inference binds with a null
// gradient.
struct ParamRef {
  const Tensor* value = nullptr;
  Tensor* grad = nullptr;

  const Tensor& operator*() const { return *value; }
  const Tensor* operator->() const { return value; }
};

class ParameterStore {
 public:
  Parameter& add(const std::string& name, std::vector<size_t> shape) {
    auto [it, inserted] = params_.try_emplace(name);
    if (!inserted)
      throw Error(ErrorCode::InvalidConfig, "duplicate parameter " + name);
    it->second.value = Tensor(shape);
    it->second.grad = Tensor(std::move(shape));
    return it->second;
  }

  bool contains(const std::string& name) const {
    return params_.count(name) != 0;
  }

  Parameter& at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end())
      throw Error(ErrorCode::MissingArtifact, "no parameter " + name);
    return it->second;
  }
  const Parameter& at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end())
      throw Error(ErrorCode::MissingArtifact, "no parameter " + name);
    return it->second;
  }

  ParamRef ref(const std::string& name) {
    Parameter& p = at(name);
    return {&p.value, &p.grad};
  }
  ParamRef ref(const std::string& name) const {
    return {&at(name).value, nullptr};
  }

  void zero_grad() {
    for (auto& [_, p] : params_) p.grad.fill(0.0);
  }

  void scale_grad(double s) {
    for (auto& [_, p] : params_)
      for (double& g : p.grad.values()) g *= s;
  }

  size_t total_size() const {
    size_t n = 0;
    for (const auto& [_, p] : params_) n += p.value.size();
    return n;
  }

  bool same_layout(const ParameterStore& o) const {
    if (params_.size() != o.params_.size()) return false;
    auto a = params_.begin();
    auto b = o.params_.begin();
    for (; a != params_.end(); ++a, ++b)
      if (a->first != b->first || !a->second.value.same_shape(b->second.value))
        return false;
    return true;
  }

  // Equality of weights only.
  bool same_values(const ParameterStore& o) const {
    if (!same_layout(o)) return false;
    auto b = o.params_.begin();
    for (auto a = params_.begin(); a != params_.end(); ++a, ++b)
      if (!(a->second.value == b->second.value)) return false;
    return true;
  }

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }
  size_t size() const { return params_.size(); }

 private:
  std::map<std::string, Parameter> params_;
};

// Uniform in +-sqrt(6 / (fan_in + fan_out)).
inline void init_glorot(Tensor& t, size_t fan_in, size_t fan_out, Rng& rng) {
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : t.values()) v = rng.uniform(-a, a);
}

inline void init_uniform(Tensor& t, double a, Rng& rng) {
  for (double& v : t.values()) v = rng.uniform(-a, a);
}

// ---------------------------------------------------------------------------
// Checkpoints: a manifest line, optional metadata lines, then one line per
// tensor: name <TAB> shape <TAB> hex of little-endian 64-bit values.

struct Checkpoint {
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> meta;
  ParameterStore params;
};

inline std::string encode_values(std::span<const double> values) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(values.size() * 16);
  for (double v : values) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int byte = 0; byte < 8; ++byte) {
      unsigned b = static_cast<unsigned>((bits >> (8 * byte)) & 0xff);
      out.push_back(digits[b >> 4]);
      out.push_back(digits[b & 0xf]);
    }
  }
  return out;
}

inline bool decode_values(std::string_view hex, std::span<double> out) {
  if (hex.size() != out.size() * 16) return false;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  for (size_t i = 0; i < out.size(); ++i) {
    std::uint64_t bits = 0;
    for (int byte = 0; byte < 8; ++byte) {
      int hi = nibble(hex[i * 16 + byte * 2]);
      int lo = nibble(hex[i * 16 + byte * 2 + 1]);
      if (hi < 0 || lo < 0) return false;
      bits |= static_cast<std::uint64_t>(hi * 16 + lo) << (8 * byte);
    }
    std::memcpy(&out[i], &bits, sizeof bits);
  }
  return true;
}

inline void write_checkpoint(std::ostream& out, const Checkpoint& ck) {
  out << "#manifest\tconfig_hash=" << hex64(ck.config_hash)
      << "\tseed=" << ck.seed << '\n';
  for (const auto& [k, v] : ck.meta)
    out << "#meta\t" << text::escape_field(k) << '\t' << text::escape_field(v)
        << '\n';
  for (const auto& [name, p] : ck.params)
    out << name << '\t' << shape_string(p.value.shape()) << '\t'
        << encode_values(p.value.values()) << '\n';
}

inline void save_checkpoint(const std::string& path, const Checkpoint& ck) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  write_checkpoint(out, ck);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

inline Checkpoint read_checkpoint(std::istream& in,
                                  const std::string& name = "checkpoint") {
  Checkpoint ck;
  std::string raw;
  size_t line_no = 0;
  bool have_manifest = false;
  auto bad = [&](const std::string& what) {
    return Error(ErrorCode::MalformedInput,
                 name + ":" + std::to_string(line_no) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = text::strip_cr(raw);
    if (line.empty()) continue;
    auto f = text::split(line, '\t');
    if (f[0] == "#manifest") {
      for (size_t i = 1; i < f.size(); ++i) {
        auto eq = f[i].find('=');
        if (eq == std::string::npos) throw bad("bad manifest field");
        std::string key = f[i].substr(0, eq);
        std::string val = f[i].substr(eq + 1);
        if (key == "config_hash") {
          ck.config_hash = std::stoull(val, nullptr, 16);
        } else if (key == "seed") {
          ck.seed = std::stoull(val);
        }
      }
      have_manifest = true;
      continue;
    }
    if (f[0] == "#meta") {
      if (f.size() != 3) throw bad("bad meta line");
      ck.meta[text::unescape_field(f[1])] = text::unescape_field(f[2]);
      continue;
    }
    if (f.size() != 3) throw bad("expected name, shape, values");
    std::vector<size_t> shape;
    for (const auto& d : text::split(f[1], 'x')) {
      size_t v = 0;
      auto res = std::from_chars(d.data(), d.data() + d.size(), v);
      if (res.ec != std::errc() || res.ptr != d.data() + d.size())
        throw bad("bad shape " + f[1]);
      shape.push_back(v);
    }
    if (shape.empty() || shape.size() > 3) throw bad("bad shape " + f[1]);
    Parameter& p = ck.params.add(f[0], shape);
    if (!decode_values(f[2], p.value.values())) throw bad("bad tensor data");
  }
  if (!have_manifest) throw bad("missing manifest");
  return ck;
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingArtifact, "cannot open " + path);
  return read_checkpoint(in, path);
}

}  // namespace edl::nn

#endif  // EDL_NEURAL_TENSOR_HPP_
