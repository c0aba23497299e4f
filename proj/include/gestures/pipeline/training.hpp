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

// Training and inference for the snippet and seizure experiments.
//
// Per fold, the held-out fold doubles as the validation set: every epoch is
// scored on it and the parameters of the lowest-validation-loss epoch (ties
// to the earliest) are kept. Blank streams never enter training; they are
// scored like any other stream.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gestures/core.hpp"
#include "gestures/io.hpp"
#include "gestures/nn/adamw.hpp"
#include "gestures/pipeline/models.hpp"
#include "gestures/random.hpp"
#include "gestures/sampler.hpp"
#include "gestures/stats/metrics.hpp"

namespace gestures {

// ---------------------------------------------------------------------------
// Splits and class weights

/// Non-blank views of every seizure outside `fold`.
inline std::vector<StreamEntry> training_streams(const Dataset& ds, const FoldAssignment& folds, std::size_t fold) {
  std::vector<StreamEntry> out;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (folds.at(ds.record(r).seizure_id) == fold) continue;
    for (std::size_t v = 0; v < 2; ++v) {
      if (!ds.record(r).views[v].blank) out.push_back({r, v});
    }
  }
  return out;
}

/// Every view, blank or not, of the seizures in `fold`.
inline std::vector<StreamEntry> validation_streams(const Dataset& ds, const FoldAssignment& folds, std::size_t fold) {
  std::vector<StreamEntry> out;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (folds.at(ds.record(r).seizure_id) != fold) continue;
    for (std::size_t v = 0; v < 2; ++v) out.push_back({r, v});
  }
  return out;
}

inline std::vector<std::size_t> records_in_fold(const Dataset& ds, const FoldAssignment& folds, std::size_t fold) {
  std::vector<std::size_t> out;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (folds.at(ds.record(r).seizure_id) == fold) out.push_back(r);
  }
  return out;
}

/// Counts of label-0 and label-1 feature positions over the given streams.
inline std::pair<std::size_t, std::size_t> count_position_labels(const Dataset& ds,
                                                                 std::span<const StreamEntry> streams) {
  std::size_t neg = 0, pos = 0;
  for (const auto& s : streams) {
    const auto& ann = ds.record(s.record).annotations;
    const auto length = ds.stream(s).length();
    for (std::size_t k = 0; k < length; ++k) {
      (position_label(ann, ds.manifest.step_seconds, k) == kTcs ? pos : neg) += 1;
    }
  }
  return {neg, pos};
}

/// Weight of the positive class for snippet training: label-0 positions over
/// label-1 positions.
inline double class_weight_snippet(const Dataset& ds, std::span<const StreamEntry> streams) {
  const auto [neg, pos] = count_position_labels(ds, streams);
  if (pos == 0) throw DataError("class_weight_snippet: no TCS-labelled positions in the training set");
  return static_cast<double>(neg) / static_cast<double>(pos);
}

/// Weight of the positive class for seizure training: #FOS / #TCS.
inline double class_weight_seizure(std::span<const int> labels) {
  const auto tcs = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), kTcs));
  if (tcs == 0) throw DataError("class_weight_seizure: no TCS records in the training set");
  return static_cast<double>(labels.size() - tcs) / static_cast<double>(tcs);
}

inline double class_weight_seizure(const Dataset& ds, const FoldAssignment& folds, std::size_t fold) {
  std::vector<int> labels;
  for (std::size_t r = 0; r < ds.size(); ++r) {
    if (folds.at(ds.record(r).seizure_id) != fold) labels.push_back(ds.record(r).label);
  }
  return class_weight_seizure(labels);
}

// ---------------------------------------------------------------------------
// Run logs

struct TrainRunLog {
  std::vector<double> train_loss;
  std::vector<double> val_loss;
  std::size_t chosen_epoch = 0;
  std::string checkpoint;
  double w_pos = 1.0;
};

/// argmin of the validation losses; ties go to the earliest epoch.
inline std::size_t select_best_epoch(std::span<const double> val_loss) {
  if (val_loss.empty()) throw DomainError("select_best_epoch: no epochs");
  std::size_t best = 0;
  for (std::size_t e = 1; e < val_loss.size(); ++e) {
    if (val_loss[e] < val_loss[best]) best = e;
  }
  return best;
}

namespace detail {

inline nn::AdamWConfig adamw_config(const ExperimentConfig& cfg) {
  return {cfg.lr, cfg.beta1, cfg.beta2, cfg.eps, cfg.weight_decay};
}

inline void zero(std::vector<nn::TensorView>& grads) {
  for (auto& g : grads) std::fill(g.values.begin(), g.values.end(), 0.0);
}

inline void require_finite(double loss, const char* what, std::size_t epoch) {
  if (!std::isfinite(loss)) {
    throw NumericError(std::string("non-finite ") + what + " loss at epoch " + std::to_string(epoch));
  }
}

// Seed tags keep the streams of different purposes apart.
inline constexpr std::uint64_t kInitTag = 1;
inline constexpr std::uint64_t kShuffleTag = 2;
inline constexpr std::uint64_t kSampleTag = 3;

}  // namespace detail

// ---------------------------------------------------------------------------
// Snippet experiment

struct SnippetTrainResult {
  TrainRunLog log;
  SnippetModel best;
  nn::AdamWState optimizer;
};

/// Linear + sigmoid classifier on individual feature vectors of the training
/// streams (views treated independently).
inline SnippetTrainResult train_snippet_classifier(const Dataset& ds, const FoldAssignment& folds, std::size_t fold,
                                                   const ExperimentConfig& cfg) {
  cfg.validate();
  const auto train = training_streams(ds, folds, fold);
  const auto val = validation_streams(ds, folds, fold);
  if (train.empty()) throw DataError("train_snippet_classifier: empty training set");

  struct Example {
    StreamEntry stream;
    std::size_t position;
    int label;
  };
  auto examples_of = [&](std::span<const StreamEntry> streams) {
    std::vector<Example> out;
    for (const auto& s : streams) {
      const auto& ann = ds.record(s.record).annotations;
      for (std::size_t k = 0; k < ds.stream(s).length(); ++k) {
        out.push_back({s, k, position_label(ann, ds.manifest.step_seconds, k)});
      }
    }
    return out;
  };
  auto train_examples = examples_of(train);
  const auto val_examples = examples_of(val);

  SnippetTrainResult result;
  result.log.w_pos = class_weight_snippet(ds, train);
  const double w_pos = result.log.w_pos;

  Rng init_rng(derive_seed({cfg.seed, fold, detail::kInitTag}));
  auto model = SnippetModel::init(ds.dim, init_rng);
  auto grad = SnippetModel::zeros(ds.dim);
  auto params = model.tensors();
  auto grads = grad.tensors();
  nn::AdamWState state;
  const auto adam = detail::adamw_config(cfg);

  auto gather = [&](std::span<const Example> batch, Eigen::MatrixXd& x, std::vector<int>& labels) {
    x.resize(static_cast<Eigen::Index>(ds.dim), static_cast<Eigen::Index>(batch.size()));
    labels.resize(batch.size());
    for (std::size_t b = 0; b < batch.size(); ++b) {
      x.col(static_cast<Eigen::Index>(b)) = ds.stream(batch[b].stream).vector(batch[b].position);
      labels[b] = batch[b].label;
    }
  };

  Eigen::MatrixXd x;
  std::vector<int> labels;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    Rng shuffle_rng(derive_seed({cfg.seed, fold, epoch, detail::kShuffleTag}));
    shuffle_rng.shuffle(train_examples);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < train_examples.size(); start += cfg.batch) {
      const auto count = std::min(cfg.batch, train_examples.size() - start);
      gather(std::span(train_examples).subspan(start, count), x, labels);
      detail::zero(grads);
      const double loss = model.loss_and_gradient(x, labels, w_pos, grad);
      detail::require_finite(loss, "training", epoch);
      epoch_loss += loss * static_cast<double>(count);
      nn::clip_gradient_norm(grads, cfg.grad_clip);
      nn::adamw_step(params, grads, state, adam);
    }
    result.log.train_loss.push_back(epoch_loss / static_cast<double>(train_examples.size()));

    double val_loss = 0.0;
    for (std::size_t start = 0; start < val_examples.size(); start += 4096) {
      const auto count = std::min<std::size_t>(4096, val_examples.size() - start);
      gather(std::span(val_examples).subspan(start, count), x, labels);
      const auto p = model.probabilities(x);
      for (std::size_t b = 0; b < count; ++b) val_loss += nn::weighted_bce(p(static_cast<Eigen::Index>(b)), labels[b], w_pos);
    }
    val_loss /= static_cast<double>(std::max<std::size_t>(1, val_examples.size()));
    detail::require_finite(val_loss, "validation", epoch);
    result.log.val_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      result.best = model;
      result.optimizer = state;
    }
  }
  result.log.chosen_epoch = select_best_epoch(result.log.val_loss);
  return result;
}

/// Probability for every feature position of a stream.
inline std::vector<double> infer_snippets_sliding(const SnippetModel& model, const FeatureSequence& stream) {
  if (stream.dim() != model.dim()) throw ShapeError("infer_snippets_sliding: feature dim mismatch");
  const auto p = model.probabilities(stream.matrix());
  return {p.data(), p.data() + p.size()};
}

// ---------------------------------------------------------------------------
// Seizure experiment

/// Copies the feature vectors at `indices` into sequence slot `slot` of a batch.
inline void gather_into(const FeatureSequence& stream, const SampledIndices& indices, nn::SequenceBatch& batch,
                        std::size_t slot) {
  for (std::size_t t = 0; t < indices.size(); ++t) batch.at(t, slot) = stream.vector(indices[t]);
}

inline nn::SequenceBatch gather_sequence(const FeatureSequence& stream, const SampledIndices& indices) {
  nn::SequenceBatch batch(stream.dim(), indices.size(), 1);
  gather_into(stream, indices, batch, 0);
  return batch;
}

/// Seizure-level probability of one view from the segment centres.
inline double infer_seizure_view(const SeizureModel& model, const FeatureSequence& stream, std::size_t n_segments) {
  if (stream.dim() != model.dim()) throw ShapeError("infer_seizure_view: feature dim mismatch");
  return model.probabilities(gather_sequence(stream, evaluation_indices(stream.length(), n_segments)))(0);
}

/// Evaluation-time probabilities for many streams at once.
inline std::vector<double> infer_seizure_streams(const SeizureModel& model, const Dataset& ds,
                                                 std::span<const StreamEntry> streams, std::size_t n_segments,
                                                 std::size_t chunk = 64) {
  std::vector<double> out;
  out.reserve(streams.size());
  for (std::size_t start = 0; start < streams.size(); start += chunk) {
    const auto count = std::min(chunk, streams.size() - start);
    nn::SequenceBatch batch(ds.dim, n_segments, count);
    for (std::size_t b = 0; b < count; ++b) {
      const auto& seq = ds.stream(streams[start + b]);
      gather_into(seq, evaluation_indices(seq.length(), n_segments), batch, b);
    }
    const auto p = model.probabilities(batch);
    out.insert(out.end(), p.data(), p.data() + p.size());
  }
  return out;
}

struct SeizureTrainResult {
  TrainRunLog log;
  SeizureModel best;
  nn::AdamWState optimizer;
};

/// Trains the aggregator and softmax head on Beta-sampled snippet sequences.
inline SeizureTrainResult train_seizure_model(const Dataset& ds, const FoldAssignment& folds, std::size_t fold,
                                              const ExperimentConfig& cfg) {
  cfg.validate();
  auto train = training_streams(ds, folds, fold);
  const auto val = validation_streams(ds, folds, fold);
  if (train.empty()) throw DataError("train_seizure_model: empty training set");

  SeizureTrainResult result;
  result.log.w_pos = class_weight_seizure(ds, folds, fold);
  const double w_pos = result.log.w_pos;

  Rng init_rng(derive_seed({cfg.seed, fold, detail::kInitTag}));
  auto model = SeizureModel::init(cfg.aggregator, ds.dim, cfg.hidden_units, init_rng);
  auto grad = model.zeros_like();
  auto params = model.tensors();
  auto grads = grad.tensors();
  nn::AdamWState state;
  const auto adam = detail::adamw_config(cfg);

  std::vector<int> val_labels;
  for (const auto& s : val) val_labels.push_back(ds.label(s));

  const std::size_t n = cfg.n_segments;
  std::vector<std::size_t> order(train.size());
  std::vector<int> labels;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(derive_seed({cfg.seed, fold, epoch, detail::kShuffleTag}));
    shuffle_rng.shuffle(order);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch) {
      const auto count = std::min(cfg.batch, order.size() - start);
      nn::SequenceBatch batch(ds.dim, n, count);
      labels.resize(count);
      for (std::size_t b = 0; b < count; ++b) {
        const auto stream_index = order[start + b];
        const auto& entry = train[stream_index];
        const auto& seq = ds.stream(entry);
        Rng sample_rng(derive_seed({cfg.seed, fold, epoch, entry.record, entry.view, detail::kSampleTag}));
        gather_into(seq, draw_training_indices(seq.length(), n, cfg.gamma, sample_rng), batch, b);
        labels[b] = ds.label(entry);
      }
      detail::zero(grads);
      const double loss = model.loss_and_gradient(batch, labels, w_pos, grad);
      detail::require_finite(loss, "training", epoch);
      epoch_loss += loss * static_cast<double>(count);
      nn::clip_gradient_norm(grads, cfg.grad_clip);
      nn::adamw_step(params, grads, state, adam);
    }
    result.log.train_loss.push_back(epoch_loss / static_cast<double>(order.size()));

    const auto p = infer_seizure_streams(model, ds, val, n);
    double val_loss = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) val_loss += nn::weighted_bce(p[i], val_labels[i], w_pos);
    val_loss /= static_cast<double>(std::max<std::size_t>(1, p.size()));
    detail::require_finite(val_loss, "validation", epoch);
    result.log.val_loss.push_back(val_loss);
    if (val_loss < best_val) {
      best_val = val_loss;
      result.best = model;
      result.optimizer = state;
    }
  }
  result.log.chosen_epoch = select_best_epoch(result.log.val_loss);
  return result;
}

// ---------------------------------------------------------------------------
// Two-view consensus

struct SeizurePrediction {
  std::string seizure_id;
  std::size_t fold = 0;
  double p_large = 0.0;
  double p_small = 0.0;
  double p_mean = 0.0;
  int decision = 0;
  int label = 0;
};

/// Mean of the two view probabilities, positive iff the mean is >= 0.5.
inline SeizurePrediction consensus_predict(double p_large, double p_small) {
  if (!(p_large >= 0.0 && p_large <= 1.0 && p_small >= 0.0 && p_small <= 1.0)) {
    throw DomainError("consensus_predict: probabilities must lie in [0, 1]");
  }
  SeizurePrediction out;
  out.p_large = p_large;
  out.p_small = p_small;
  out.p_mean = (p_large + p_small) / 2.0;
  out.decision = out.p_mean >= 0.5 ? 1 : 0;
  return out;
}

/// Consensus predictions for every seizure of `fold`.
inline std::vector<SeizurePrediction> predict_fold(const SeizureModel& model, const Dataset& ds,
                                                   const FoldAssignment& folds, std::size_t fold,
                                                   std::size_t n_segments) {
  const auto recs = records_in_fold(ds, folds, fold);
  std::vector<StreamEntry> streams;
  for (auto r : recs) {
    streams.push_back({r, *ds.record(r).view_index(ViewTag::large)});
    streams.push_back({r, *ds.record(r).view_index(ViewTag::small)});
  }
  const auto p = infer_seizure_streams(model, ds, streams, n_segments);
  std::vector<SeizurePrediction> out;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    auto pred = consensus_predict(p[2 * i], p[2 * i + 1]);
    pred.seizure_id = ds.record(recs[i]).seizure_id;
    pred.fold = fold;
    pred.label = ds.record(recs[i]).label;
    out.push_back(std::move(pred));
  }
  return out;
}

inline stats::MetricSet prediction_metrics(std::span<const SeizurePrediction> preds) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& p : preds) {
    scores.push_back(p.p_mean);
    labels.push_back(p.label);
  }
  return stats::compute_metrics(scores, labels);
}

inline stats::ConfusionCounts prediction_confusion(std::span<const SeizurePrediction> preds) {
  std::vector<int> decisions, labels;
  for (const auto& p : preds) {
    decisions.push_back(p.decision);
    labels.push_back(p.label);
  }
  return stats::confusion(decisions, labels);
}

}  // namespace gestures
