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

// Central finite-difference checks of every differentiable block. Each
// check builds one random instance, contracts the block output with a random
// upstream tensor r to get a scalar L = <r, y>, and compares the analytic
// gradient of L against (L(x + h) - L(x - h)) / 2h for every input and
// parameter entry. The result is the largest relative error
// |a - n| / max(|a|, |n|, kGradFloor).

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

#include "gestures/nn/heads.hpp"
#include "gestures/nn/linear.hpp"
#include "gestures/nn/lstm.hpp"
#include "gestures/random.hpp"

namespace gestures::testing {

inline constexpr double kFdStep = 1e-5;
inline constexpr double kGradFloor = 1e-6;

inline double relative_error(double analytic, double numeric) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), kGradFloor});
}

/// Max relative error over all entries of `values` whose analytic gradient
/// is `analytic`.
inline double fd_compare(std::span<double> values, std::span<const double> analytic,
                         const std::function<double()>& loss) {
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + kFdStep;
    const double up = loss();
    values[i] = saved - kFdStep;
    const double down = loss();
    values[i] = saved;
    worst = std::max(worst, relative_error(analytic[i], (up - down) / (2.0 * kFdStep)));
  }
  return worst;
}

inline std::span<double> span_of(Eigen::MatrixXd& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
inline std::span<double> span_of(nn::Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
inline std::span<double> span_of(nn::Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

inline Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, double bound, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-bound, bound);
  return m;
}

inline void randomize(nn::LstmParams& p, double bound, Rng& rng) {
  for (auto* m : {&p.input_weights, &p.recurrent_weights}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) m->data()[i] = rng.uniform(-bound, bound);
  }
  for (Eigen::Index i = 0; i < p.bias.size(); ++i) p.bias(i) = rng.uniform(-bound, bound);
}

inline double check_linear(Rng& rng) {
  const auto in = 1 + rng.below(6), out = 1 + rng.below(6), batch = 1 + rng.below(4);
  auto p = nn::LinearParams::init(in, out, rng);
  for (Eigen::Index i = 0; i < p.bias.size(); ++i) p.bias(i) = rng.uniform(-1, 1);
  Eigen::MatrixXd x = random_matrix(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(batch), 2.0, rng);
  const Eigen::MatrixXd r = random_matrix(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(batch), 1.0, rng);
  auto loss = [&] { return (nn::linear_forward(p, x).array() * r.array()).sum(); };

  nn::LinearTape tape;
  nn::linear_forward(p, x, &tape);
  auto grad = nn::LinearParams::zeros(in, out);
  Eigen::MatrixXd dx;
  nn::linear_backward(p, tape, r, grad, &dx);
  return std::max({fd_compare(span_of(p.weight), span_of(grad.weight), loss),
                   fd_compare(span_of(p.bias), span_of(grad.bias), loss), fd_compare(span_of(x), span_of(dx), loss)});
}

inline double check_sigmoid_head(Rng& rng) {
  double z = rng.uniform(-6, 6);
  const double r = rng.uniform(-1, 1);
  const double analytic = nn::sigmoid_head_backward(nn::sigmoid_head(z), r);
  return fd_compare({&z, 1}, {&analytic, 1}, [&] { return r * nn::sigmoid_head(z); });
}

inline double check_softmax2_head(Rng& rng) {
  double z[2] = {rng.uniform(-6, 6), rng.uniform(-6, 6)};
  const double r = rng.uniform(-1, 1);
  const auto [d0, d1] = nn::softmax2_head_backward(nn::softmax2_head(z[0], z[1]), r);
  const double analytic[2] = {d0, d1};
  return fd_compare(z, analytic, [&] { return r * nn::softmax2_head(z[0], z[1]); });
}

inline double check_weighted_bce(Rng& rng) {
  double p = rng.uniform(0.01, 0.99);
  const int y = static_cast<int>(rng.below(2));
  const double w = rng.uniform(0.2, 5.0);
  const double analytic = nn::weighted_bce_backward(p, y, w);
  return fd_compare({&p, 1}, {&analytic, 1}, [&] { return nn::weighted_bce(p, y, w); });
}

inline double check_lstm(Rng& rng) {
  const auto m = 1 + rng.below(4), h = 1 + rng.below(4), n = 1 + rng.below(5), batch = 1 + rng.below(3);
  auto p = nn::LstmParams::zeros(m, h);
  randomize(p, 1.0, rng);
  nn::SequenceBatch x(m, n, batch);
  x.data = random_matrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n * batch), 1.5, rng);
  const Eigen::MatrixXd r = random_matrix(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(batch), 1.0, rng);
  auto loss = [&] { return (nn::lstm_forward(p, x).array() * r.array()).sum(); };

  nn::LstmTape tape;
  nn::lstm_forward(p, x, &tape);
  auto grad = nn::LstmParams::zeros(m, h);
  nn::SequenceBatch dx;
  nn::lstm_backward(p, tape, r, grad, &dx);
  return std::max({fd_compare(span_of(p.input_weights), span_of(grad.input_weights), loss),
                   fd_compare(span_of(p.recurrent_weights), span_of(grad.recurrent_weights), loss),
                   fd_compare(span_of(p.bias), span_of(grad.bias), loss),
                   fd_compare(span_of(x.data), span_of(dx.data), loss)});
}

inline double check_blstm(Rng& rng) {
  const auto m = 1 + rng.below(4), h = 1 + rng.below(4), n = 1 + rng.below(5), batch = 1 + rng.below(3);
  auto fwd = nn::LstmParams::zeros(m, h), bwd = nn::LstmParams::zeros(m, h);
  randomize(fwd, 1.0, rng);
  randomize(bwd, 1.0, rng);
  nn::SequenceBatch x(m, n, batch);
  x.data = random_matrix(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n * batch), 1.5, rng);
  const Eigen::MatrixXd r =
      random_matrix(static_cast<Eigen::Index>(2 * h), static_cast<Eigen::Index>(batch), 1.0, rng);
  auto loss = [&] { return (nn::blstm_forward(fwd, bwd, x).array() * r.array()).sum(); };

  nn::BlstmTape tape;
  nn::blstm_forward(fwd, bwd, x, &tape);
  auto gf = nn::LstmParams::zeros(m, h), gb = nn::LstmParams::zeros(m, h);
  nn::SequenceBatch dx;
  nn::blstm_backward(fwd, bwd, tape, r, gf, gb, &dx);
  double worst = fd_compare(span_of(x.data), span_of(dx.data), loss);
  for (auto [param, grad] : {std::pair{&fwd, &gf}, std::pair{&bwd, &gb}}) {
    worst = std::max({worst, fd_compare(span_of(param->input_weights), span_of(grad->input_weights), loss),
                      fd_compare(span_of(param->recurrent_weights), span_of(grad->recurrent_weights), loss),
                      fd_compare(span_of(param->bias), span_of(grad->bias), loss)});
  }
  return worst;
}

struct GradientBlock {
  const char* name;
  double (*check)(Rng&);
};

inline constexpr GradientBlock kGradientBlocks[] = {
    {"linear", check_linear},           {"sigmoid_head", check_sigmoid_head}, {"softmax2_head", check_softmax2_head},
    {"weighted_bce", check_weighted_bce}, {"lstm", check_lstm},               {"blstm", check_blstm},
};

/// Largest relative error over `instances` random instances of one block.
inline double worst_gradient_error(const GradientBlock& block, std::size_t instances, std::uint64_t seed) {
  double worst = 0.0;
  for (std::size_t i = 0; i < instances; ++i) {
    Rng rng(derive_seed({seed, i}));
    worst = std::max(worst, block.check(rng));
  }
  return worst;
}

}  // namespace gestures::testing
