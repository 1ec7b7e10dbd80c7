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

#ifndef EDL_NEURAL_ADADELTA_HPP_
#define EDL_NEURAL_ADADELTA_HPP_

#include <cmath>
#include <map>
#include <string>

#include "edl/neural/tensor.hpp"

namespace edl::nn {

// Running averages for one parameter tensor.
struct AdaDeltaSlot {
  Tensor accum_grad_sq;
  Tensor accum_update_sq;
};

//   E[g^2]  <- rho E[g^2] + (1 - rho) g^2
//   delta    = -sqrt(E[dx^2] + eps) / sqrt(E[g^2] + eps) * g
//   E[dx^2] <- rho E[dx^2] + (1 - rho) delta^2
//   param   += delta
inline void adadelta_update(Tensor& param, const Tensor& grad,
                            AdaDeltaSlot& slot, double rho, double epsilon) {
  if (!param.same_shape(grad))
    throw Error(ErrorCode::ShapeMismatch,
                "adadelta: gradient " + shape_string(grad.shape()) +
                    " vs parameter " + shape_string(param.shape()));
  if (slot.accum_grad_sq.empty()) {
    slot.accum_grad_sq = Tensor(param.shape());
    slot.accum_update_sq = Tensor(param.shape());
  } else if (!slot.accum_grad_sq.same_shape(param)) {
    throw Error(ErrorCode::ShapeMismatch, "adadelta: accumulator shape");
  }
  double* p = param.data();
  const double* g = grad.data();
  double* eg = slot.accum_grad_sq.data();
  double* ex = slot.accum_update_sq.data();
  for (size_t i = 0; i < param.size(); ++i) {
    eg[i] = rho * eg[i] + (1.0 - rho) * g[i] * g[i];
    const double delta =
        -std::sqrt(ex[i] + epsilon) / std::sqrt(eg[i] + epsilon) * g[i];
    ex[i] = rho * ex[i] + (1.0 - rho) * delta * delta;
    p[i] += delta;
  }
}

class AdaDelta {
 public:
  explicit AdaDelta(double rho = 0.95, double epsilon = 1e-6)
      : rho_(rho), epsilon_(epsilon) {}

  // Applies the accumulated gradients of every parameter in the store.
  void step(ParameterStore& store) {
    for (auto& [name, p] : store)
      adadelta_update(p.value, p.grad, slots_[name], rho_, epsilon_);
  }

  double rho() const { return rho_; }
  double epsilon() const { return epsilon_; }
  const std::map<std::string, AdaDeltaSlot>& slots() const { return slots_; }

 private:
  double rho_;
  double epsilon_;
  std::map<std::string, AdaDeltaSlot> slots_;
};

}  // namespace edl::nn

#endif  // EDL_NEURAL_ADADELTA_HPP_
