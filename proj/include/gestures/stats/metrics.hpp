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
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <vector>

#include "gestures/error.hpp"

namespace gestures::stats {

/// Binary confusion counts; TCS (label 1) is the positive class.
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t tn = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  std::size_t total() const noexcept { return tp + tn + fp + fn; }

  ConfusionCounts& operator+=(const ConfusionCounts& o) {
    tp += o.tp;
    tn += o.tn;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

inline ConfusionCounts confusion(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.size() != labels.size()) throw ShapeError("confusion: length mismatch");
  ConfusionCounts c;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const bool pred = predictions[i] == 1;
    const bool truth = labels[i] == 1;
    if (pred && truth) ++c.tp;
    else if (!pred && !truth) ++c.tn;
    else if (pred) ++c.fp;
    else ++c.fn;
  }
  return c;
}

inline double accuracy(const ConfusionCounts& c) {
  if (c.total() == 0) throw DomainError("accuracy of empty counts");
  return static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
}

/// 2tp / (2tp + fp + fn); empty when tp + fp + fn = 0.
inline std::optional<double> f1(const ConfusionCounts& c) {
  if (c.total() == 0) throw DomainError("f1 of empty counts");
  const auto denom = 2 * c.tp + c.fp + c.fn;
  if (denom == 0) return std::nullopt;
  return 2.0 * static_cast<double>(c.tp) / static_cast<double>(denom);
}

/// Area under the precision-recall curve of the positive class, as the
/// right-step sum  sum_i (R_i - R_{i-1}) P_i  over thresholds at the distinct
/// scores (tied scores enter together).
inline double auc_pr(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw ShapeError("auc_pr: length mismatch");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  if (positives == 0) throw DomainError("auc_pr requires at least one positive");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });

  double area = 0.0;
  double prev_recall = 0.0;
  std::size_t tp = 0, seen = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double threshold = scores[order[i]];
    while (i < order.size() && scores[order[i]] == threshold) {
      tp += labels[order[i]] == 1 ? 1 : 0;
      ++seen;
      ++i;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(positives);
    const double precision = static_cast<double>(tp) / static_cast<double>(seen);
    area += (recall - prev_recall) * precision;
    prev_recall = recall;
  }
  return area;
}

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman-Fan type 7).
inline double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile of empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

inline double median(std::vector<double> values) { return quantile(std::move(values), 0.5); }

inline double interquartile_range(const std::vector<double>& values) {
  return quantile(values, 0.75) - quantile(values, 0.25);
}

/// Accuracy, F1 and AUC-PR of one evaluation set. Undefined entries are NaN.
struct MetricSet {
  double accuracy = 0.0;
  double f1 = 0.0;
  double auc_pr = 0.0;
  bool f1_defined = true;
  bool auc_defined = true;
};

inline MetricSet compute_metrics(std::span<const double> scores, std::span<const int> labels,
                                 double threshold = 0.5) {
  std::vector<int> decisions(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) decisions[i] = scores[i] >= threshold ? 1 : 0;
  const auto c = confusion(decisions, labels);
  MetricSet m;
  m.accuracy = accuracy(c);
  const auto f = f1(c);
  m.f1_defined = f.has_value();
  m.f1 = f.value_or(std::nan(""));
  m.auc_defined = std::count(labels.begin(), labels.end(), 1) > 0;
  m.auc_pr = m.auc_defined ? auc_pr(scores, labels) : std::nan("");
  return m;
}

}  // namespace gestures::stats
