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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "gestures/error.hpp"
#include "gestures/nn/tensor.hpp"

namespace gestures::nn {

struct AdamWConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
};

/// First and second moments per named tensor, plus the shared step count.
struct AdamWState {
  struct Moments {
    std::vector<double> first;
    std::vector<double> second;
  };
  std::map<std::string, Moments> moments;
  std::uint64_t step = 0;
};

/// One decoupled-weight-decay Adam step:
///   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2
///   theta <- theta - lr * lambda * theta - lr * m_hat / (sqrt(v_hat) + eps)
/// with m_hat = m / (1 - b1^t), v_hat = v / (1 - b2^t).
/// Parameters are untouched if any gradient entry is non-finite.
inline void adamw_step(std::span<const TensorView> params, std::span<const TensorView> grads,
                       AdamWState& state, const AdamWConfig& cfg) {
  if (params.size() != grads.size()) throw ShapeError("adamw_step: parameter/gradient count mismatch");
  for (std::size_t k = 0; k < params.size(); ++k) {
    if (params[k].values.size() != grads[k].values.size()) {
      throw ShapeError("adamw_step: shape mismatch for " + params[k].name);
    }
    for (double g : grads[k].values) {
      if (!std::isfinite(g)) throw NumericError("poisoned update: non-finite gradient in " + params[k].name);
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);

  for (std::size_t k = 0; k < params.size(); ++k) {
    auto& mom = state.moments[params[k].name];
    const auto size = params[k].values.size();
    if (mom.first.size() != size) {
      mom.first.assign(size, 0.0);
      mom.second.assign(size, 0.0);
    }
    auto theta = params[k].values;
    auto g = grads[k].values;
    for (std::size_t j = 0; j < size; ++j) {
      mom.first[j] = cfg.beta1 * mom.first[j] + (1.0 - cfg.beta1) * g[j];
      mom.second[j] = cfg.beta2 * mom.second[j] + (1.0 - cfg.beta2) * g[j] * g[j];
      const double m_hat = mom.first[j] / bias1;
      const double v_hat = mom.second[j] / bias2;
      theta[j] -= cfg.lr * cfg.weight_decay * theta[j];
      theta[j] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
    }
  }
}

/// Global L2 norm over all gradient tensors, scaled by the largest entry so
/// that finite gradients never overflow.
inline double gradient_norm(std::span<const TensorView> grads) {
  double largest = 0.0;
  for (const auto& g : grads) {
    for (double x : g.values) {
      if (!std::isfinite(x)) return std::abs(x);
      largest = std::max(largest, std::abs(x));
    }
  }
  if (largest == 0.0) return 0.0;
  double sq = 0.0;
  for (const auto& g : grads) {
    for (double x : g.values) sq += (x / largest) * (x / largest);
  }
  return largest * std::sqrt(sq);
}

/// Rescales gradients so their global norm is at most `max_norm`; returns the
/// norm before clipping. Throws NumericError naming the first tensor with a
/// non-finite entry.
inline double clip_gradient_norm(std::span<const TensorView> grads, double max_norm) {
  for (const auto& g : grads) {
    for (double x : g.values) {
      if (!std::isfinite(x)) throw NumericError("non-finite gradient in " + g.name);
    }
  }
  const double norm = gradient_norm(grads);
  if (max_norm > 0.0 && norm > max_norm) {
    for (const auto& g : grads) {
      for (double& x : g.values) x = x / norm * max_norm;
    }
  }
  return norm;
}

}  // namespace gestures::nn
