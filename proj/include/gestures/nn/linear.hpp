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

#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "gestures/nn/tensor.hpp"

namespace gestures::nn {

/// Fully-connected layer y = W x + b.
struct LinearParams {
  Matrix weight;  // out x in
  Vector bias;    // out

  static LinearParams zeros(std::size_t in, std::size_t out) {
    return {Matrix::Zero(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)),
            Vector::Zero(static_cast<Eigen::Index>(out))};
  }

  /// Uniform(-k, k) weights with k = 1/sqrt(in); zero bias.
  static LinearParams init(std::size_t in, std::size_t out, Rng& rng) {
    auto p = zeros(in, out);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    fill_uniform({p.weight.data(), static_cast<std::size_t>(p.weight.size())}, bound, rng);
    return p;
  }

  std::size_t in_dim() const noexcept { return static_cast<std::size_t>(weight.cols()); }
  std::size_t out_dim() const noexcept { return static_cast<std::size_t>(weight.rows()); }

  void append_views(std::vector<TensorView>& out, const std::string& prefix) {
    out.push_back(view_of(prefix + "weight", weight));
    out.push_back(view_of(prefix + "bias", bias));
  }
};

struct LinearTape {
  Eigen::MatrixXd input;  // in x batch
  TapeGuard guard;
};

/// Applies the layer to each column of `x` (in x batch).
inline Eigen::MatrixXd linear_forward(const LinearParams& p, const Eigen::MatrixXd& x,
                                      LinearTape* tape = nullptr) {
  if (static_cast<std::size_t>(x.rows()) != p.in_dim()) {
    throw ShapeError("linear_forward: input has " + std::to_string(x.rows()) + " rows, layer expects " +
                     std::to_string(p.in_dim()));
  }
  Eigen::MatrixXd y = p.weight * x;
  y.colwise() += p.bias;
  if (tape) tape->input = x;
  return y;
}

inline Vector linear_forward(const LinearParams& p, const Vector& x) {
  return linear_forward(p, Eigen::MatrixXd(x), nullptr).col(0);
}

/// Accumulates dL/dW and dL/db into `grad`; writes dL/dx if requested.
inline void linear_backward(const LinearParams& p, LinearTape& tape, const Eigen::MatrixXd& upstream,
                            LinearParams& grad, Eigen::MatrixXd* grad_input = nullptr) {
  tape.guard.consume();
  if (upstream.rows() != p.weight.rows() || upstream.cols() != tape.input.cols()) {
    throw ShapeError("linear_backward: upstream shape mismatch");
  }
  grad.weight.noalias() += upstream * tape.input.transpose();
  grad.bias += upstream.rowwise().sum();
  if (grad_input) *grad_input = p.weight.transpose() * upstream;
}

}  // namespace gestures::nn
