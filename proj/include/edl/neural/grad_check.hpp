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

#ifndef EDL_NEURAL_GRAD_CHECK_HPP_
#define EDL_NEURAL_GRAD_CHECK_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "edl/neural/tensor.hpp"

namespace edl::nn {

struct GradCheckResult {
  double max_rel_error = 0;
  size_t coordinates = 0;
  std::string worst_parameter;
  size_t worst_index = 0;
  double worst_analytic = 0;
  double worst_numeric = 0;
};

// Compares the analytic gradient with central differences.
//
// `loss` evaluates the loss at the current parameter values and accumulates
// its gradient into the store. Relative error per coordinate is
// |a - n| / max(|a|, |n|, floor). With `per_parameter` > 0 only that many
// random coordinates of each tensor are checked.
//
// Central differences carry roundoff of about eps_mach * |loss| / epsilon
// (1e-10 for a loss near 10 at epsilon 1e-5), so whole-model checks want a
// floor well above that; 1e-5 turns it into an absolute tolerance of 1e-9.
template <typename LossFn>
GradCheckResult grad_check(LossFn&& loss, ParameterStore& params,
                           double epsilon = 1e-5, size_t per_parameter = 0,
                           std::uint64_t seed = 7, double floor = 1e-8) {
  params.zero_grad();
  double base = loss(params);
  if (!std::isfinite(base))
    throw Error(ErrorCode::NonFiniteLoss, "loss is not finite");
  std::map<std::string, Tensor> analytic;
  for (auto& [name, p] : params) analytic.emplace(name, p.grad);

  Rng rng(seed);
  GradCheckResult result;
  for (auto& [name, p] : params) {
    std::vector<size_t> coords;
    if (per_parameter == 0 || per_parameter >= p.value.size()) {
      coords.resize(p.value.size());
      for (size_t i = 0; i < coords.size(); ++i) coords[i] = i;
    } else {
      for (size_t k = 0; k < per_parameter; ++k)
        coords.push_back(static_cast<size_t>(rng.below(p.value.size())));
    }
    for (size_t i : coords) {
      const double saved = p.value[i];
      p.value[i] = saved + epsilon;
      const double plus = loss(params);
      p.value[i] = saved - epsilon;
      const double minus = loss(params);
      p.value[i] = saved;
      if (!std::isfinite(plus) || !std::isfinite(minus))
        throw Error(ErrorCode::NonFiniteLoss, "loss is not finite at " + name);
      const double numeric = (plus - minus) / (2.0 * epsilon);
      const double a = analytic.at(name)[i];
      const double denom =
          std::max({std::fabs(a), std::fabs(numeric), floor});
      const double err = std::fabs(a - numeric) / denom;
      ++result.coordinates;
      if (err > result.max_rel_error) {
        result.max_rel_error = err;
        result.worst_parameter = name;
        result.worst_index = i;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
    }
  }
  params.zero_grad();
  return result;
}

}  // namespace edl::nn

#endif  // EDL_NEURAL_GRAD_CHECK_HPP_
