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

// Mean aggregation, probability heads and the weighted binary cross-entropy.

#pragma once

#include <algorithm>
#include <cmath>

#include "gestures/nn/tensor.hpp"

namespace gestures::nn {

/// Probabilities are clamped to [kProbClamp, 1 - kProbClamp] inside the loss.
inline constexpr double kProbClamp = 1e-7;

// ---------------------------------------------------------------------------
// Mean aggregation

/// Arithmetic mean over the steps of each sequence (dim x B).
inline Eigen::MatrixXd mean_aggregate(const SequenceBatch& x) {
  if (x.steps < 1) throw ShapeError("mean_aggregate: empty sequence");
  Eigen::MatrixXd sum = x.step(0);
  for (std::size_t t = 1; t < x.steps; ++t) sum += x.step(t);
  return sum / static_cast<double>(x.steps);
}

/// Rows of an n x m matrix averaged into an m-vector.
inline Vector mean_aggregate(const Eigen::MatrixXd& rows) {
  if (rows.rows() < 1) throw ShapeError("mean_aggregate: empty sequence");
  return rows.colwise().mean().transpose();
}

/// dL/dx for the mean: every step receives upstream / n.
inline SequenceBatch mean_aggregate_backward(const Eigen::MatrixXd& upstream, std::size_t steps) {
  SequenceBatch g(static_cast<std::size_t>(upstream.rows()), steps, static_cast<std::size_t>(upstream.cols()));
  for (std::size_t t = 0; t < steps; ++t) g.step(t) = upstream / static_cast<double>(steps);
  return g;
}

// ---------------------------------------------------------------------------
// Heads

inline double sigmoid_head(double logit) {
  if (logit >= 0) return 1.0 / (1.0 + std::exp(-logit));
  const double e = std::exp(logit);
  return e / (1.0 + e);
}

/// Probability of class 1 under a two-logit softmax.
inline double softmax2_head(double logit0, double logit1) {
  const double top = std::max(logit0, logit1);
  const double e0 = std::exp(logit0 - top);
  const double e1 = std::exp(logit1 - top);
  return e1 / (e0 + e1);
}

/// dp/dlogit for the sigmoid head.
inline double sigmoid_head_backward(double p, double upstream) { return upstream * p * (1.0 - p); }

/// (dp/dlogit0, dp/dlogit1) for the softmax head, scaled by `upstream`.
inline std::pair<double, double> softmax2_head_backward(double p, double upstream) {
  const double d = upstream * p * (1.0 - p);
  return {-d, d};
}

/// Column-wise class-1 probabilities of a 2 x B logit matrix.
inline Vector softmax2_probabilities(const Eigen::MatrixXd& logits) {
  if (logits.rows() != 2) throw ShapeError("softmax2 head expects two logits");
  Vector p(logits.cols());
  for (Eigen::Index b = 0; b < logits.cols(); ++b) p(b) = softmax2_head(logits(0, b), logits(1, b));
  return p;
}

/// Column-wise probabilities of a 1 x B logit matrix.
inline Vector sigmoid_probabilities(const Eigen::MatrixXd& logits) {
  if (logits.rows() != 1) throw ShapeError("sigmoid head expects one logit");
  Vector p(logits.cols());
  for (Eigen::Index b = 0; b < logits.cols(); ++b) p(b) = sigmoid_head(logits(0, b));
  return p;
}

// ---------------------------------------------------------------------------
// Weighted binary cross-entropy

inline double clamp_probability(double p) { return std::clamp(p, kProbClamp, 1.0 - kProbClamp); }

/// -[w_pos * y * ln p + (1 - y) * ln(1 - p)]
inline double weighted_bce(double p, int y, double w_pos) {
  if (!(w_pos > 0.0)) throw DomainError("weighted_bce requires w_pos > 0");
  const double q = clamp_probability(p);
  return y == 1 ? -w_pos * std::log(q) : -std::log(1.0 - q);
}

/// dL/dp, evaluated at the clamped probability and passed straight through
/// the clamp.
inline double weighted_bce_backward(double p, int y, double w_pos) {
  if (!(w_pos > 0.0)) throw DomainError("weighted_bce requires w_pos > 0");
  const double q = clamp_probability(p);
  return y == 1 ? -w_pos / q : 1.0 / (1.0 - q);
}

}  // namespace gestures::nn
