// Copyright 2026 The gestures Authors.
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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "adamw_oracle.hpp"
#include "gestures/nn/adamw.hpp"

namespace gestures {
namespace {

struct Scalar {
  nn::Vector theta = nn::Vector::Zero(1);
  nn::Vector grad = nn::Vector::Zero(1);
  std::vector<nn::TensorView> params() { return {nn::view_of("theta", theta)}; }
  std::vector<nn::TensorView> grads() { return {nn::view_of("theta", grad)}; }
};

TEST(AdamW, DecayOnlyWhenGradientIsZero) {
  Scalar s;
  s.theta(0) = 1.0;
  nn::AdamWState state;
  nn::adamw_step(s.params(), s.grads(), state, {0.1, 0.9, 0.999, 1e-8, 0.01});
  EXPECT_DOUBLE_EQ(s.theta(0), 0.999);
  EXPECT_EQ(state.step, 1u);
}

TEST(AdamW, FirstStepIsMinusLearningRateWithoutDecay) {
  Scalar s;
  s.grad(0) = 1.0;
  nn::AdamWState state;
  nn::adamw_step(s.params(), s.grads(), state, {0.1, 0.9, 0.999, 1e-8, 0.0});
  EXPECT_NEAR(s.theta(0), -0.1, 1e-9);
}

TEST(AdamW, QuadraticTrajectoryMatchesReference) {
  const nn::AdamWConfig cfg{0.1, 0.9, 0.999, 1e-8, 0.01};
  const auto expected = testing::adamw_reference_trajectory(
      5.0, [](double t) { return 2.0 * t; }, 100, cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, cfg.weight_decay);
  Scalar s;
  s.theta(0) = 5.0;
  nn::AdamWState state;
  for (int t = 0; t < 100; ++t) {
    s.grad(0) = 2.0 * s.theta(0);
    nn::adamw_step(s.params(), s.grads(), state, cfg);
    ASSERT_NEAR(s.theta(0), expected[t], 1e-10) << "step " << t + 1;
  }
  EXPECT_LT(std::abs(s.theta(0)), 0.5);
}

TEST(AdamW, NonFiniteGradientNamesTensorAndLeavesParameters) {
  Scalar s;
  s.theta(0) = 2.0;
  s.grad(0) = std::numeric_limits<double>::quiet_NaN();
  nn::AdamWState state;
  try {
    nn::adamw_step(s.params(), s.grads(), state, {});
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("theta"), std::string::npos);
  }
  EXPECT_EQ(s.theta(0), 2.0);
  EXPECT_EQ(state.step, 0u);
}

TEST(AdamW, MomentsAreKeptPerTensor) {
  nn::Vector a = nn::Vector::Ones(2), b = nn::Vector::Ones(3);
  nn::Vector ga = nn::Vector::Constant(2, 0.5), gb = nn::Vector::Constant(3, -2.0);
  std::vector<nn::TensorView> params = {nn::view_of("a", a), nn::view_of("b", b)};
  std::vector<nn::TensorView> grads = {nn::view_of("a", ga), nn::view_of("b", gb)};
  nn::AdamWState state;
  nn::adamw_step(params, grads, state, {});
  EXPECT_EQ(state.moments.at("a").first.size(), 2u);
  EXPECT_NEAR(state.moments.at("b").first[0], -0.2, 1e-15);
  EXPECT_NEAR(state.moments.at("b").second[0], 0.004, 1e-15);
}

TEST(ClipGradientNorm, RescalesOnlyAboveThreshold) {
  nn::Vector g1(2), g2(1);
  g1 << 3, 4;
  g2 << 12;
  std::vector<nn::TensorView> grads = {nn::view_of("a", g1), nn::view_of("b", g2)};
  EXPECT_DOUBLE_EQ(nn::gradient_norm(grads), 13.0);
  EXPECT_DOUBLE_EQ(nn::clip_gradient_norm(grads, 5.0), 13.0);
  EXPECT_NEAR(nn::gradient_norm(grads), 5.0, 1e-12);
  EXPECT_NEAR(g1(0), 3.0 * 5.0 / 13.0, 1e-15);
  const nn::Vector before = g1;
  nn::clip_gradient_norm(grads, 10.0);
  EXPECT_EQ(g1, before);
}

TEST(ClipGradientNorm, LargeFiniteEntriesDoNotOverflow) {
  nn::Vector g = nn::Vector::Constant(4, 1e200);
  std::vector<nn::TensorView> grads = {nn::view_of("big", g)};
  EXPECT_NEAR(nn::clip_gradient_norm(grads, 5.0), 2e200, 1e186);
  EXPECT_NEAR(g(0), 2.5, 1e-12);
}

TEST(ClipGradientNorm, NonFiniteEntryNamesTensor) {
  nn::Vector a = nn::Vector::Ones(2), b = nn::Vector::Ones(2);
  b(1) = std::numeric_limits<double>::infinity();
  std::vector<nn::TensorView> grads = {nn::view_of("a", a), nn::view_of("rnn.bias", b)};
  try {
    nn::clip_gradient_norm(grads, 5.0);
    FAIL();
  } catch (const NumericError& e) {
    EXPECT_NE(std::string(e.what()).find("rnn.bias"), std::string::npos);
  }
}

}  // namespace
}  // namespace gestures
