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

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "edl/md/models.hpp"
#include "edl/neural/adadelta.hpp"
#include "edl/neural/grad_check.hpp"
#include "edl/neural/layers.hpp"

namespace edl::nn {
namespace {

Tensor random_tensor(std::vector<size_t> shape, Rng& rng, double a = 1.0) {
  Tensor t(std::move(shape));
  init_uniform(t, a, rng);
  return t;
}

TEST(Conv1d, PreservesLength) {
  Rng rng(1);
  for (size_t steps = 1; steps <= 6; ++steps) {
    Tensor in = random_tensor({steps, 3}, rng);
    Tensor out = conv1d_same(in, random_tensor({3, 3, 5}, rng), Tensor({5}));
    EXPECT_EQ(out.dim(0), steps);
    EXPECT_EQ(out.dim(1), 5u);
  }
}

TEST(Conv1d, ZeroKernelGivesBias) {
  Rng rng(2);
  Tensor bias({3});
  bias[0] = 0.5, bias[1] = -1, bias[2] = 2;
  Tensor out = conv1d_same(random_tensor({4, 2}, rng), Tensor({3, 2, 3}), bias);
  for (size_t t = 0; t < 4; ++t)
    for (size_t f = 0; f < 3; ++f) EXPECT_EQ(out(t, f), bias[f]);
}

TEST(Conv1d, CenterTapIdentity) {
  Rng rng(3);
  Tensor in = random_tensor({1, 4}, rng);
  Tensor kernel({3, 4, 4});
  for (size_t d = 0; d < 4; ++d) kernel(1, d, d) = 1.0;
  Tensor out = conv1d_same(in, kernel, Tensor({4}));
  for (size_t d = 0; d < 4; ++d) EXPECT_DOUBLE_EQ(out(0, d), in(0, d));
}

TEST(Conv1d, ShapeMismatch) {
  try {
    conv1d_same(Tensor({4, 3}), Tensor({3, 2, 5}), Tensor({5}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShapeMismatch);
  }
}

TEST(Conv1d, GradientMatchesFiniteDifferences) {
  Rng rng(4);
  ParameterStore store;
  store.add("in", {5, 3}).value = random_tensor({5, 3}, rng);
  store.add("K", {3, 3, 4}).value = random_tensor({3, 3, 4}, rng);
  store.add("b", {4}).value = random_tensor({4}, rng);
  Tensor proj = random_tensor({5, 4}, rng);
  auto loss = [&](ParameterStore& s) {
    Tensor out = conv1d_same(s.at("in").value, s.at("K").value, s.at("b").value);
    double l = 0;
    Tensor d_out({5, 4});
    for (size_t i = 0; i < out.size(); ++i) {
      l += std::tanh(out[i]) * proj[i];
      d_out[i] = (1 - std::tanh(out[i]) * std::tanh(out[i])) * proj[i];
    }
    Tensor d_in = conv1d_same_backward(s.at("in").value, s.ref("K"), s.ref("b"), d_out);
    add_to(s.at("in").grad.values(), d_in.values());
    return l;
  };
  EXPECT_LT(grad_check(loss, store).max_rel_error, 1e-6);
}

GruRef make_gru(ParameterStore& store, size_t in, size_t hidden, Rng& rng) {
  add_gru(store, "gru", in, hidden, rng);
  return bind_gru(store, "gru");
}

TEST(Gru, ZeroParamsZeroState) {
  Rng rng(5);
  ParameterStore store;
  auto gru = make_gru(store, 3, 4, rng);
  for (auto& [_, p] : store) p.value.fill(0.0);
  GruCache cache;
  Vec h = gru_step(gru, Vec(4, 0.0), Vec{1, 2, 3}, &cache);
  for (double v : h) EXPECT_EQ(v, 0.0);
  for (double z : cache.z) EXPECT_DOUBLE_EQ(z, 0.5);
  for (double c : cache.c) EXPECT_EQ(c, 0.0);
}

TEST(Gru, SaturatedUpdateGateKeepsState) {
  Rng rng(6);
  ParameterStore store;
  auto gru = make_gru(store, 3, 4, rng);
  store.at("gru.bz").value.fill(-50.0);
  Vec h0 = {0.3, -0.2, 0.9, -0.7};
  Vec h = gru_step(gru, h0, Vec{1, -1, 0.5});
  for (size_t i = 0; i < 4; ++i) EXPECT_NEAR(h[i], h0[i], 1e-12);
}

TEST(Gru, ShapeMismatch) {
  Rng rng(7);
  ParameterStore store;
  auto gru = make_gru(store, 3, 4, rng);
  EXPECT_THROW(gru_step(gru, Vec(4, 0.0), Vec(2, 0.0)), Error);
  EXPECT_THROW(gru_step(gru, Vec(3, 0.0), Vec(3, 0.0)), Error);
}

// Jacobian check covering weights, input and previous state.
TEST(Gru, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed : {8u, 9u, 10u}) {
    Rng rng(seed);
    ParameterStore store;
    make_gru(store, 3, 4, rng);
    for (auto& [_, p] : store) init_uniform(p.value, 0.8, rng);
    store.add("x", {3}).value = random_tensor({3}, rng);
    store.add("h", {4}).value = random_tensor({4}, rng);
    Tensor proj = random_tensor({4}, rng);
    auto loss = [&](ParameterStore& s) {
      auto gru = bind_gru(s, "gru");
      GruCache cache;
      Vec h = gru_step(gru, s.at("h").value.values(), s.at("x").value.values(),
                       &cache);
      double l = 0;
      for (size_t i = 0; i < 4; ++i) l += proj[i] * h[i];
      gru_backward(gru, cache, proj.values(), s.at("x").grad.values(),
                   s.at("h").grad.values());
      return l;
    };
    EXPECT_LT(grad_check(loss, store).max_rel_error, 1e-4);
  }
}

TEST(Dense, ZeroWeightsSigmoidIsHalf) {
  Vec y = dense(Tensor({3, 2}), Tensor({3}), Vec{1.5, -2}, Activation::Sigmoid);
  for (double v : y) EXPECT_DOUBLE_EQ(v, 0.5);
}

TEST(Dense, IdentityWeightsIdentityActivation) {
  Tensor w({3, 3});
  for (size_t i = 0; i < 3; ++i) w(i, i) = 1;
  Vec x = {0.2, -4, 7};
  EXPECT_EQ(dense(w, Tensor({3}), x, Activation::Identity), x);
}

TEST(Dense, ShapeMismatch) {
  EXPECT_THROW(dense(Tensor({3, 2}), Tensor({3}), Vec{1, 2, 3},
                     Activation::Tanh),
               Error);
}

TEST(Dense, GradientMatchesFiniteDifferences) {
  for (Activation act : {Activation::Sigmoid, Activation::Tanh,
                         Activation::Identity}) {
    Rng rng(11);
    ParameterStore store;
    add_dense(store, "d", 4, 3, rng);
    init_uniform(store.at("d.b").value, 0.5, rng);
    store.add("x", {4}).value = random_tensor({4}, rng);
    Tensor proj = random_tensor({3}, rng);
    auto loss = [&](ParameterStore& s) {
      auto d = bind_dense(s, "d");
      CSpan x = s.at("x").value.values();
      Vec y = dense(*d.w, *d.b, x, act);
      double l = 0;
      for (size_t i = 0; i < 3; ++i) l += proj[i] * y[i];
      Vec dx = dense_backward(d.w, d.b, x, y, proj.values(), act);
      add_to(s.at("x").grad.values(), dx);
      return l;
    };
    EXPECT_LT(grad_check(loss, store).max_rel_error, 1e-4);
  }
}

TEST(Softmax, Basics) {
  Vec p = softmax(Vec{0, 0});
  EXPECT_DOUBLE_EQ(p[0], 0.5);
  EXPECT_DOUBLE_EQ(p[1], 0.5);
  EXPECT_EQ(softmax(Vec{-3.7}), Vec{1.0});
  Vec q = softmax(Vec{1000, 0});
  EXPECT_NEAR(q[0], 1.0, 1e-15);
  EXPECT_GE(q[1], 0.0);
  EXPECT_LT(q[1], 1e-300);
  EXPECT_TRUE(all_finite(q));
}

TEST(Softmax, ProbabilityVectorProperty) {
  Rng rng(12);
  for (int trial = 0; trial < 500; ++trial) {
    Vec logits(1 + rng.below(40));
    for (double& v : logits) v = rng.uniform(-500, 500);
    Vec p = softmax(logits);
    double s = 0;
    for (double v : p) {
      EXPECT_GE(v, 0.0);
      s += v;
    }
    EXPECT_NEAR(s, 1.0, 1e-12);
  }
}

TEST(AdaDelta, FirstStepMagnitude) {
  Tensor p({1}), g({1});
  g[0] = 1.0;
  AdaDeltaSlot slot;
  adadelta_update(p, g, slot, 0.95, 1e-6);
  // delta = -sqrt(1e-6 / (0.05 + 1e-6))
  EXPECT_NEAR(p[0], -4.4721e-3, 1e-7);
  EXPECT_NEAR(p[0], -std::sqrt(1e-6 / 0.050001), 1e-15);
}

TEST(AdaDelta, ZeroGradientLeavesParameters) {
  Rng rng(13);
  Tensor p = random_tensor({3, 2}, rng), before = p;
  AdaDeltaSlot slot;
  for (int i = 0; i < 5; ++i) adadelta_update(p, Tensor({3, 2}), slot, 0.95, 1e-6);
  EXPECT_EQ(p, before);
}

TEST(AdaDelta, OddSymmetry) {
  Tensor p({2}), g({2});
  g[0] = 0.37;
  g[1] = -0.37;
  AdaDeltaSlot slot;
  adadelta_update(p, g, slot, 0.95, 1e-6);
  EXPECT_EQ(p[0], -p[1]);
  EXPECT_LT(p[0], 0.0);
}

TEST(AdaDelta, ShapeMismatch) {
  Tensor p({2}), g({3});
  AdaDeltaSlot slot;
  EXPECT_THROW(adadelta_update(p, g, slot, 0.95, 1e-6), Error);
}

TEST(AdaDelta, AccumulatorsStayNonNegative) {
  Rng rng(14);
  Tensor p = random_tensor({10}, rng);
  AdaDeltaSlot slot;
  for (int step = 0; step < 200; ++step) {
    Tensor g = random_tensor({10}, rng, 100.0);
    adadelta_update(p, g, slot, 0.95, 1e-6);
    for (double v : slot.accum_grad_sq.values()) ASSERT_GE(v, 0.0);
    for (double v : slot.accum_update_sq.values()) ASSERT_GE(v, 0.0);
  }
}

TEST(GradCheck, QuadraticIsExact) {
  Rng rng(15);
  ParameterStore store;
  store.add("p", {7}).value = random_tensor({7}, rng, 3.0);
  auto loss = [](ParameterStore& s) {
    double l = 0;
    auto& p = s.at("p");
    for (size_t i = 0; i < p.value.size(); ++i) {
      l += 0.5 * p.value[i] * p.value[i];
      p.grad[i] += p.value[i];
    }
    return l;
  };
  EXPECT_LT(grad_check(loss, store).max_rel_error, 1e-9);
}

TEST(GradCheck, NonFiniteLoss) {
  ParameterStore store;
  store.add("p", {1});
  auto loss = [](ParameterStore&) { return std::nan(""); };
  try {
    grad_check(loss, store);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonFiniteLoss);
  }
}

TEST(Checkpoint, RoundTripIsBitExact) {
  Rng rng(16);
  Checkpoint ck;
  ck.config_hash = 0xdeadbeefcafef00dULL;
  ck.seed = 42;
  ck.meta["vocab"] = "a\nb\tc";
  ck.params.add("w", {2, 3}).value = random_tensor({2, 3}, rng);
  ck.params.add("b", {3}).value = random_tensor({3}, rng);
  ck.params.at("b").value[1] = -0.0;
  std::ostringstream out;
  write_checkpoint(out, ck);
  std::istringstream in(out.str());
  Checkpoint back = read_checkpoint(in);
  EXPECT_EQ(back.config_hash, ck.config_hash);
  EXPECT_EQ(back.seed, 42u);
  EXPECT_EQ(back.meta, ck.meta);
  EXPECT_TRUE(back.params.same_values(ck.params));
  EXPECT_TRUE(std::signbit(back.params.at("b").value[1]));
  std::ostringstream again;
  write_checkpoint(again, back);
  EXPECT_EQ(again.str(), out.str());
  EXPECT_NE(out.str().find("w\t2x3\t"), std::string::npos);
}

TEST(Checkpoint, ValuesAreLittleEndianHex) {
  EXPECT_EQ(encode_values(std::vector<double>{1.0}), "000000000000f03f");
}

}  // namespace
}  // namespace edl::nn
