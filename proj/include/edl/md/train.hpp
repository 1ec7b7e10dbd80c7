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

#ifndef EDL_MD_TRAIN_HPP_
#define EDL_MD_TRAIN_HPP_

#include <cmath>
#include <limits>
#include <vector>

#include "edl/md/models.hpp"
#include "edl/nested_codec.hpp"
#include "edl/neural/adadelta.hpp"

namespace edl::md {

// One training sentence: token ids plus its nested gold spans.
struct Example {
  std::vector<int> ids;
  codec::NestedLabeling spans;
};

inline std::vector<int> training_targets(ModelKind kind, const Example& ex) {
  const size_t n = ex.ids.size();
  if (kind == ModelKind::CRNNLM) return codec::flatten_to_bio(n, ex.spans);
  std::vector<int> out;
  for (const auto& s : codec::linearize(n, ex.spans))
    out.push_back(codec::symbol_id(s));
  return out;
}

inline double example_loss(ModelKind kind, ParameterStore& store,
                           const Example& ex, const std::vector<int>& targets,
                           bool backward) {
  return kind == ModelKind::CRNNLM
             ? crnnlm_loss(store, ex.ids, targets, backward)
             : seq2seq_loss(store, ex.ids, targets, backward);
}

// Mean per-step cross-entropy over a set of sentences.
inline double mean_step_loss(ModelKind kind, ParameterStore& store,
                             const std::vector<Example>& data) {
  double total = 0;
  size_t steps = 0;
  for (const auto& ex : data) {
    auto targets = training_targets(kind, ex);
    total += example_loss(kind, store, ex, targets, false);
    steps += targets.size();
  }
  return steps ? total / static_cast<double>(steps) : 0.0;
}

struct TrainResult {
  ParameterStore best;
  std::vector<double> train_loss;  // per epoch, mean per-step
  std::vector<double> dev_loss;
  size_t best_epoch = 0;
  size_t epochs_run = 0;
};

// Minimizes per-step cross-entropy with AdaDelta on shuffled mini-batches.
// Stops when the dev loss has not improved for `patience` epochs or at
// `max_epochs`; returns the parameters of the best dev epoch. An optional
// `on_epoch(epoch, store)` callback may return true to stop early.
template <typename EpochFn>
TrainResult train(ModelKind kind, ParameterStore initial,
                  const std::vector<Example>& train_set,
                  const std::vector<Example>& dev_set,
                  const TaggerConfig& cfg, EpochFn&& on_epoch) {
  if (train_set.empty())
    throw Error(ErrorCode::EmptyTrainingSet, "no training sentences");
  cfg.validate();
  const std::vector<Example>& dev = dev_set.empty() ? train_set : dev_set;
  std::vector<std::vector<int>> targets;
  targets.reserve(train_set.size());
  for (const auto& ex : train_set) targets.push_back(training_targets(kind, ex));

  TrainResult result;
  ParameterStore store = std::move(initial);
  nn::AdaDelta optimizer(cfg.rho, cfg.epsilon);
  Rng rng(cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<size_t> order(train_set.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  double best_dev = std::numeric_limits<double>::infinity();
  size_t since_best = 0;
  result.best = store;
  for (size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0;
    size_t epoch_steps = 0;
    for (size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const size_t end = std::min(order.size(), start + cfg.batch_size);
      store.zero_grad();
      for (size_t k = start; k < end; ++k) {
        const size_t i = order[k];
        double loss = example_loss(kind, store, train_set[i], targets[i], true);
        if (!std::isfinite(loss))
          throw Error(ErrorCode::NonFiniteLoss, "training loss diverged");
        epoch_loss += loss;
        epoch_steps += targets[i].size();
      }
      store.scale_grad(1.0 / static_cast<double>(end - start));
      optimizer.step(store);
    }
    store.zero_grad();
    result.train_loss.push_back(epoch_loss /
                                static_cast<double>(std::max<size_t>(epoch_steps, 1)));
    const double dev_loss = mean_step_loss(kind, store, dev);
    result.dev_loss.push_back(dev_loss);
    result.epochs_run = epoch;
    if (dev_loss < best_dev) {
      best_dev = dev_loss;
      result.best = store;
      result.best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
    if (on_epoch(epoch, static_cast<const ParameterStore&>(store))) break;
  }
  result.best.zero_grad();
  return result;
}

inline TrainResult train(ModelKind kind, ParameterStore initial,
                         const std::vector<Example>& train_set,
                         const std::vector<Example>& dev_set,
                         const TaggerConfig& cfg) {
  return train(kind, std::move(initial), train_set, dev_set, cfg,
               [](size_t, const ParameterStore&) { return false; });
}

}  // namespace edl::md

#endif  // EDL_MD_TRAIN_HPP_
