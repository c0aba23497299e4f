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

// The two trainable models: a snippet classifier (linear layer + sigmoid on
// one feature vector) and a seizure classifier (mean / LSTM / BLSTM over the
// n sampled feature vectors, then linear layer + two-way softmax).

#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "gestures/core.hpp"
#include "gestures/nn/checkpoint.hpp"
#include "gestures/nn/heads.hpp"
#include "gestures/nn/linear.hpp"
#include "gestures/nn/lstm.hpp"

namespace gestures {

struct SnippetModel {
  nn::LinearParams head;  // 1 x m

  static SnippetModel init(std::size_t dim, Rng& rng) { return {nn::LinearParams::init(dim, 1, rng)}; }
  static SnippetModel zeros(std::size_t dim) { return {nn::LinearParams::zeros(dim, 1)}; }

  std::size_t dim() const noexcept { return head.in_dim(); }

  std::vector<nn::TensorView> tensors() {
    std::vector<nn::TensorView> out;
    head.append_views(out, "head.");
    return out;
  }

  /// Probability for each column of `x` (m x B).
  nn::Vector probabilities(const Eigen::MatrixXd& x) const {
    return nn::sigmoid_probabilities(nn::linear_forward(head, x));
  }

  /// Mean weighted BCE over the batch; accumulates parameter gradients.
  double loss_and_gradient(const Eigen::MatrixXd& x, std::span<const int> labels, double w_pos,
                           SnippetModel& grad) const {
    nn::LinearTape tape;
    const Eigen::MatrixXd logits = nn::linear_forward(head, x, &tape);
    const auto batch = static_cast<double>(x.cols());
    Eigen::MatrixXd d_logits(1, x.cols());
    double loss = 0.0;
    for (Eigen::Index b = 0; b < x.cols(); ++b) {
      const double p = nn::sigmoid_head(logits(0, b));
      loss += nn::weighted_bce(p, labels[b], w_pos);
      d_logits(0, b) = nn::sigmoid_head_backward(p, nn::weighted_bce_backward(p, labels[b], w_pos) / batch);
    }
    nn::linear_backward(head, tape, d_logits, grad.head);
    return loss / batch;
  }
};

class SeizureModel {
 public:
  SeizureModel() = default;

  static SeizureModel init(Aggregator agg, std::size_t dim, std::size_t hidden, Rng& rng) {
    SeizureModel m(agg, dim, hidden);
    if (agg != Aggregator::mean) m.forward_ = nn::LstmParams::init(dim, hidden, rng);
    if (agg == Aggregator::blstm) m.backward_ = nn::LstmParams::init(dim, hidden, rng);
    m.head_ = nn::LinearParams::init(m.representation_dim(), 2, rng);
    return m;
  }

  static SeizureModel zeros(Aggregator agg, std::size_t dim, std::size_t hidden) {
    SeizureModel m(agg, dim, hidden);
    if (agg != Aggregator::mean) m.forward_ = nn::LstmParams::zeros(dim, hidden);
    if (agg == Aggregator::blstm) m.backward_ = nn::LstmParams::zeros(dim, hidden);
    m.head_ = nn::LinearParams::zeros(m.representation_dim(), 2);
    return m;
  }

  /// Zero-valued model of the same architecture (gradient accumulator).
  SeizureModel zeros_like() const { return zeros(aggregator_, dim_, hidden_); }

  Aggregator aggregator() const noexcept { return aggregator_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t hidden() const noexcept { return hidden_; }

  std::size_t representation_dim() const noexcept {
    switch (aggregator_) {
      case Aggregator::mean: return dim_;
      case Aggregator::lstm: return hidden_;
      case Aggregator::blstm: return 2 * hidden_;
    }
    return 0;
  }

  nn::LstmParams& forward_rnn() { return forward_; }
  nn::LstmParams& backward_rnn() { return backward_; }
  nn::LinearParams& head() { return head_; }
  const nn::LinearParams& head() const { return head_; }

  std::vector<nn::TensorView> tensors() {
    std::vector<nn::TensorView> out;
    if (aggregator_ != Aggregator::mean) forward_.append_views(out, "rnn.forward.");
    if (aggregator_ == Aggregator::blstm) backward_.append_views(out, "rnn.backward.");
    head_.append_views(out, "head.");
    return out;
  }

  /// Seizure representation z for each sequence in the batch.
  Eigen::MatrixXd represent(const nn::SequenceBatch& x) const {
    check_input(x);
    switch (aggregator_) {
      case Aggregator::mean: return nn::mean_aggregate(x);
      case Aggregator::lstm: return nn::lstm_forward(forward_, x);
      case Aggregator::blstm: return nn::blstm_forward(forward_, backward_, x);
    }
    return {};
  }

  nn::Vector probabilities(const nn::SequenceBatch& x) const {
    return nn::softmax2_probabilities(nn::linear_forward(head_, represent(x)));
  }

  /// Mean weighted BCE over the batch; accumulates gradients into `grad`.
  double loss_and_gradient(const nn::SequenceBatch& x, std::span<const int> labels, double w_pos,
                           SeizureModel& grad) const {
    check_input(x);
    nn::LstmTape lstm_tape;
    nn::BlstmTape blstm_tape;
    Eigen::MatrixXd z;
    switch (aggregator_) {
      case Aggregator::mean: z = nn::mean_aggregate(x); break;
      case Aggregator::lstm: z = nn::lstm_forward(forward_, x, &lstm_tape); break;
      case Aggregator::blstm: z = nn::blstm_forward(forward_, backward_, x, &blstm_tape); break;
    }
    nn::LinearTape head_tape;
    const Eigen::MatrixXd logits = nn::linear_forward(head_, z, &head_tape);

    const auto batch = static_cast<double>(x.batch);
    Eigen::MatrixXd d_logits(2, logits.cols());
    double loss = 0.0;
    for (Eigen::Index b = 0; b < logits.cols(); ++b) {
      const double p = nn::softmax2_head(logits(0, b), logits(1, b));
      loss += nn::weighted_bce(p, labels[b], w_pos);
      const auto [d0, d1] = nn::softmax2_head_backward(p, nn::weighted_bce_backward(p, labels[b], w_pos) / batch);
      d_logits(0, b) = d0;
      d_logits(1, b) = d1;
    }

    const bool need_z_grad = aggregator_ != Aggregator::mean;
    Eigen::MatrixXd d_z;
    nn::linear_backward(head_, head_tape, d_logits, grad.head_, need_z_grad ? &d_z : nullptr);
    if (aggregator_ == Aggregator::lstm) nn::lstm_backward(forward_, lstm_tape, d_z, grad.forward_);
    if (aggregator_ == Aggregator::blstm) {
      nn::blstm_backward(forward_, backward_, blstm_tape, d_z, grad.forward_, grad.backward_);
    }
    return loss / batch;
  }

  nlohmann::json architecture() const {
    return {{"aggregator", std::string(to_string(aggregator_))}, {"dim", dim_}, {"hidden_units", hidden_}};
  }

  nn::ModelBundle to_bundle() {
    nn::ModelBundle bundle;
    bundle.config["model"] = "seizure";
    bundle.config["architecture"] = architecture();
    for (const auto& t : tensors()) bundle.add(t);
    return bundle;
  }

  static SeizureModel from_bundle(const nn::ModelBundle& bundle) {
    try {
      const auto& arch = bundle.config.at("architecture");
      auto agg = parse_aggregator(arch.at("aggregator").get<std::string>());
      if (!agg) throw DataError("checkpoint has an unknown aggregator");
      auto m = zeros(*agg, arch.at("dim").get<std::size_t>(), arch.at("hidden_units").get<std::size_t>());
      for (const auto& t : m.tensors()) bundle.restore(t);
      return m;
    } catch (const nlohmann::json::exception& e) {
      throw DataError(std::string("checkpoint config is incomplete: ") + e.what());
    }
  }

 private:
  SeizureModel(Aggregator agg, std::size_t dim, std::size_t hidden)
      : aggregator_(agg), dim_(dim), hidden_(hidden) {}

  void check_input(const nn::SequenceBatch& x) const {
    if (x.steps < 1) throw ShapeError("seizure model: empty sequence");
    if (x.dim() != dim_) {
      throw ShapeError("seizure model: feature dim " + std::to_string(x.dim()) + ", model expects " +
                       std::to_string(dim_));
    }
  }

  Aggregator aggregator_ = Aggregator::mean;
  std::size_t dim_ = 0;
  std::size_t hidden_ = 0;
  nn::LstmParams forward_;
  nn::LstmParams backward_;
  nn::LinearParams head_;
};

inline nn::ModelBundle to_bundle(SnippetModel& model) {
  nn::ModelBundle bundle;
  bundle.config["model"] = "snippet";
  bundle.config["architecture"] = {{"dim", model.dim()}};
  for (const auto& t : model.tensors()) bundle.add(t);
  return bundle;
}

inline SnippetModel snippet_model_from_bundle(const nn::ModelBundle& bundle) {
  try {
    auto m = SnippetModel::zeros(bundle.config.at("architecture").at("dim").get<std::size_t>());
    for (const auto& t : m.tensors()) bundle.restore(t);
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("checkpoint config is incomplete: ") + e.what());
  }
}

}  // namespace gestures
