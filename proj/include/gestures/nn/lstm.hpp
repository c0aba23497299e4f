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

// Single-layer LSTM and bidirectional LSTM returning the final hidden state,
// with exact backpropagation through time.
//
//   a_t = W_x x_t + W_h h_{t-1} + b            (4h, gate order i f g o)
//   i = sig(a_i)  f = sig(a_f)  g = tanh(a_g)  o = sig(a_o)
//   c_t = f * c_{t-1} + i * g
//   h_t = o * tanh(c_t)                          h_0 = c_0 = 0

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gestures/nn/tensor.hpp"

namespace gestures::nn {

struct LstmParams {
  Matrix input_weights;      // 4h x m
  Matrix recurrent_weights;  // 4h x h
  Vector bias;               // 4h

  static LstmParams zeros(std::size_t input_dim, std::size_t hidden) {
    const auto g = static_cast<Eigen::Index>(4 * hidden);
    return {Matrix::Zero(g, static_cast<Eigen::Index>(input_dim)),
            Matrix::Zero(g, static_cast<Eigen::Index>(hidden)), Vector::Zero(g)};
  }

  /// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, forget-gate bias 1.
  static LstmParams init(std::size_t input_dim, std::size_t hidden, Rng& rng) {
    auto p = zeros(input_dim, hidden);
    fill_uniform({p.input_weights.data(), static_cast<std::size_t>(p.input_weights.size())},
                 1.0 / std::sqrt(static_cast<double>(input_dim)), rng);
    fill_uniform({p.recurrent_weights.data(), static_cast<std::size_t>(p.recurrent_weights.size())},
                 1.0 / std::sqrt(static_cast<double>(hidden)), rng);
    p.bias.segment(static_cast<Eigen::Index>(hidden), static_cast<Eigen::Index>(hidden)).setOnes();
    return p;
  }

  std::size_t hidden() const noexcept { return static_cast<std::size_t>(recurrent_weights.cols()); }
  std::size_t input_dim() const noexcept { return static_cast<std::size_t>(input_weights.cols()); }

  void append_views(std::vector<TensorView>& out, const std::string& prefix) {
    out.push_back(view_of(prefix + "input_weights", input_weights));
    out.push_back(view_of(prefix + "recurrent_weights", recurrent_weights));
    out.push_back(view_of(prefix + "bias", bias));
  }
};

struct LstmTape {
  SequenceBatch input;
  Eigen::MatrixXd gates;   // 4h x (n*B), post-activation
  Eigen::MatrixXd cells;   // h x ((n+1)*B), block 0 is c_0
  Eigen::MatrixXd hidden;  // h x ((n+1)*B), block 0 is h_0
  TapeGuard guard;
};

/// Final hidden state h_n for every sequence in the batch (h x B).
inline Eigen::MatrixXd lstm_forward(const LstmParams& p, const SequenceBatch& x, LstmTape* tape = nullptr) {
  if (x.steps < 1 || x.batch < 1) throw ShapeError("lstm_forward: empty sequence");
  if (x.dim() != p.input_dim()) {
    throw ShapeError("lstm_forward: input dim " + std::to_string(x.dim()) + ", expected " +
                     std::to_string(p.input_dim()));
  }
  const auto h = static_cast<Eigen::Index>(p.hidden());
  const auto B = static_cast<Eigen::Index>(x.batch);
  const auto n = static_cast<Eigen::Index>(x.steps);

  Eigen::MatrixXd gates = p.input_weights * x.data;
  gates.colwise() += p.bias;
  Eigen::MatrixXd cells = Eigen::MatrixXd::Zero(h, (n + 1) * B);
  Eigen::MatrixXd hidden = Eigen::MatrixXd::Zero(h, (n + 1) * B);

  for (Eigen::Index t = 0; t < n; ++t) {
    auto a = gates.middleCols(t * B, B);
    a.noalias() += p.recurrent_weights * hidden.middleCols(t * B, B);
    a.topRows(2 * h) = sigmoid(a.topRows(2 * h).array()).matrix();
    a.middleRows(2 * h, h) = a.middleRows(2 * h, h).array().tanh().matrix();
    a.bottomRows(h) = sigmoid(a.bottomRows(h).array()).matrix();
    const auto i = a.topRows(h).array();
    const auto f = a.middleRows(h, h).array();
    const auto g = a.middleRows(2 * h, h).array();
    const auto o = a.bottomRows(h).array();
    cells.middleCols((t + 1) * B, B) = (f * cells.middleCols(t * B, B).array() + i * g).matrix();
    hidden.middleCols((t + 1) * B, B) = (o * cells.middleCols((t + 1) * B, B).array().tanh()).matrix();
  }

  Eigen::MatrixXd out = hidden.middleCols(n * B, B);
  if (tape) {
    tape->input = x;
    tape->gates = std::move(gates);
    tape->cells = std::move(cells);
    tape->hidden = std::move(hidden);
  }
  return out;
}

/// One sequence given as n x m rows; returns h_n.
inline Vector lstm_forward(const LstmParams& p, const Eigen::MatrixXd& rows) {
  if (rows.rows() < 1) throw ShapeError("lstm_forward: empty sequence");
  return lstm_forward(p, SequenceBatch::from_rows(rows)).col(0);
}

/// Backpropagates dL/dh_n through time. Parameter gradients accumulate into
/// `grad`; dL/dx is written if requested.
inline void lstm_backward(const LstmParams& p, LstmTape& tape, const Eigen::MatrixXd& d_final,
                          LstmParams& grad, SequenceBatch* grad_input = nullptr) {
  tape.guard.consume();
  const auto h = static_cast<Eigen::Index>(p.hidden());
  const auto B = static_cast<Eigen::Index>(tape.input.batch);
  const auto n = static_cast<Eigen::Index>(tape.input.steps);
  if (d_final.rows() != h || d_final.cols() != B) throw ShapeError("lstm_backward: upstream shape mismatch");

  Eigen::MatrixXd d_gates(4 * h, n * B);
  Eigen::MatrixXd dh = d_final;
  Eigen::ArrayXXd dc = Eigen::ArrayXXd::Zero(h, B);

  for (Eigen::Index t = n - 1; t >= 0; --t) {
    const auto a = tape.gates.middleCols(t * B, B);
    const auto i = a.topRows(h).array();
    const auto f = a.middleRows(h, h).array();
    const auto g = a.middleRows(2 * h, h).array();
    const auto o = a.bottomRows(h).array();
    const auto c_prev = tape.cells.middleCols(t * B, B).array();
    const Eigen::ArrayXXd tanh_c = tape.cells.middleCols((t + 1) * B, B).array().tanh();
    const auto dh_a = dh.array();

    dc += dh_a * o * (1.0 - tanh_c.square());
    auto da = d_gates.middleCols(t * B, B);
    da.topRows(h) = (dc * g * i * (1.0 - i)).matrix();
    da.middleRows(h, h) = (dc * c_prev * f * (1.0 - f)).matrix();
    da.middleRows(2 * h, h) = (dc * i * (1.0 - g.square())).matrix();
    da.bottomRows(h) = (dh_a * tanh_c * o * (1.0 - o)).matrix();
    dc *= f;
    dh.noalias() = p.recurrent_weights.transpose() * da;
  }

  grad.input_weights.noalias() += d_gates * tape.input.data.transpose();
  grad.recurrent_weights.noalias() += d_gates * tape.hidden.leftCols(n * B).transpose();
  grad.bias += d_gates.rowwise().sum();
  if (grad_input) {
    grad_input->steps = tape.input.steps;
    grad_input->batch = tape.input.batch;
    grad_input->data.noalias() = p.input_weights.transpose() * d_gates;
  }
}

struct BlstmTape {
  LstmTape forward;
  LstmTape backward;
};

/// [h_n of the forward pass ; h_n of the pass over the reversed sequence]
/// (2h x B).
inline Eigen::MatrixXd blstm_forward(const LstmParams& fwd, const LstmParams& bwd, const SequenceBatch& x,
                                     BlstmTape* tape = nullptr) {
  if (fwd.hidden() != bwd.hidden()) throw ShapeError("blstm_forward: direction hidden sizes differ");
  const auto h = static_cast<Eigen::Index>(fwd.hidden());
  Eigen::MatrixXd out(2 * h, static_cast<Eigen::Index>(x.batch));
  out.topRows(h) = lstm_forward(fwd, x, tape ? &tape->forward : nullptr);
  out.bottomRows(h) = lstm_forward(bwd, x.reversed(), tape ? &tape->backward : nullptr);
  return out;
}

inline Vector blstm_forward(const LstmParams& fwd, const LstmParams& bwd, const Eigen::MatrixXd& rows) {
  if (rows.rows() < 1) throw ShapeError("blstm_forward: empty sequence");
  return blstm_forward(fwd, bwd, SequenceBatch::from_rows(rows)).col(0);
}

inline void blstm_backward(const LstmParams& fwd, const LstmParams& bwd, BlstmTape& tape,
                           const Eigen::MatrixXd& upstream, LstmParams& grad_fwd, LstmParams& grad_bwd,
                           SequenceBatch* grad_input = nullptr) {
  const auto h = static_cast<Eigen::Index>(fwd.hidden());
  if (upstream.rows() != 2 * h) throw ShapeError("blstm_backward: upstream shape mismatch");
  if (!grad_input) {
    lstm_backward(fwd, tape.forward, upstream.topRows(h), grad_fwd);
    lstm_backward(bwd, tape.backward, upstream.bottomRows(h), grad_bwd);
    return;
  }
  SequenceBatch d_fwd, d_bwd;
  lstm_backward(fwd, tape.forward, upstream.topRows(h), grad_fwd, &d_fwd);
  lstm_backward(bwd, tape.backward, upstream.bottomRows(h), grad_bwd, &d_bwd);
  *grad_input = d_bwd.reversed();
  grad_input->data += d_fwd.data;
}

}  // namespace gestures::nn
