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

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gestures/error.hpp"
#include "gestures/random.hpp"

namespace gestures::nn {

/// Parameter matrices are row-major so their flat storage matches the
/// checkpoint payload order.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// Named, shaped window onto a parameter (or gradient) tensor's storage.
struct TensorView {
  std::string name;
  std::vector<std::size_t> shape;
  std::span<double> values;
};

inline TensorView view_of(std::string name, Matrix& m) {
  return {std::move(name),
          {static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols())},
          {m.data(), static_cast<std::size_t>(m.size())}};
}

inline TensorView view_of(std::string name, Vector& v) {
  return {std::move(name), {static_cast<std::size_t>(v.size())}, {v.data(), static_cast<std::size_t>(v.size())}};
}

inline void fill_uniform(std::span<double> values, double bound, Rng& rng) {
  for (auto& x : values) x = rng.uniform(-bound, bound);
}

/// A batch of equal-length sequences laid out time-major: columns
/// [t*batch, (t+1)*batch) hold step t of every sequence.
struct SequenceBatch {
  Eigen::MatrixXd data;  // dim x (steps * batch)
  std::size_t steps = 0;
  std::size_t batch = 0;

  SequenceBatch() = default;
  SequenceBatch(std::size_t dim, std::size_t steps_, std::size_t batch_)
      : data(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim),
                                   static_cast<Eigen::Index>(steps_ * batch_))),
        steps(steps_),
        batch(batch_) {}

  /// One sequence given as an n x m matrix (one row per step).
  static SequenceBatch from_rows(const Eigen::MatrixXd& rows) {
    SequenceBatch b(static_cast<std::size_t>(rows.cols()), static_cast<std::size_t>(rows.rows()), 1);
    b.data = rows.transpose();
    return b;
  }

  std::size_t dim() const noexcept { return static_cast<std::size_t>(data.rows()); }

  auto step(std::size_t t) { return data.middleCols(static_cast<Eigen::Index>(t * batch), static_cast<Eigen::Index>(batch)); }
  auto step(std::size_t t) const {
    return data.middleCols(static_cast<Eigen::Index>(t * batch), static_cast<Eigen::Index>(batch));
  }
  auto at(std::size_t t, std::size_t b) { return data.col(static_cast<Eigen::Index>(t * batch + b)); }
  auto at(std::size_t t, std::size_t b) const { return data.col(static_cast<Eigen::Index>(t * batch + b)); }

  /// Same sequences with the time axis reversed.
  SequenceBatch reversed() const {
    SequenceBatch r(dim(), steps, batch);
    for (std::size_t t = 0; t < steps; ++t) r.step(t) = step(steps - 1 - t);
    return r;
  }
};

/// Marks a cached forward pass as consumed by its backward pass.
class TapeGuard {
 public:
  void consume() {
    if (consumed_) throw std::logic_error("tape already consumed by a backward pass");
    consumed_ = true;
  }
  bool consumed() const noexcept { return consumed_; }

 private:
  bool consumed_ = false;
};

inline Eigen::ArrayXXd sigmoid(const Eigen::ArrayXXd& x) { return (1.0 + (-x).exp()).inverse(); }

}  // namespace gestures::nn
