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
#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gestures/error.hpp"

namespace gestures {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Frames per source segment; one feature vector stands for this many frames.
inline constexpr int kFramesPerStep = 32;
inline constexpr double kDefaultFps = 15.0;
inline constexpr double kDefaultStepSeconds = kFramesPerStep / kDefaultFps;
inline constexpr std::size_t kDefaultFeatureDim = 512;

/// Class labels. TCS is the positive class throughout.
inline constexpr int kFos = 0;
inline constexpr int kTcs = 1;

/// Clinical time annotations of one seizure. A focal seizure has
/// `generalization = +inf`.
struct TimeAnnotations {
  double onset = 0.0;                  // t0
  double generalization = kInfinity;   // tG
  double offset = 0.0;                 // t1
  double fps = kDefaultFps;

  bool generalizes() const noexcept { return std::isfinite(generalization); }
  double duration() const noexcept { return offset - onset; }
};

enum class ViewTag { large, small };

inline std::string_view to_string(ViewTag tag) {
  return tag == ViewTag::large ? "large" : "small";
}

inline std::optional<ViewTag> parse_view_tag(std::string_view text) {
  if (text == "large") return ViewTag::large;
  if (text == "small") return ViewTag::small;
  return std::nullopt;
}

struct StreamRef {
  std::filesystem::path path;
  ViewTag view = ViewTag::large;
  bool blank = false;  // patient entirely out of the field of view
};

struct SeizureRecord {
  std::string seizure_id;
  std::string patient_id;
  int label = kFos;
  TimeAnnotations annotations;
  std::vector<StreamRef> views;  // exactly two in a valid manifest

  /// Index into `views` for the given tag, if present.
  std::optional<std::size_t> view_index(ViewTag tag) const {
    for (std::size_t i = 0; i < views.size(); ++i) {
      if (views[i].view == tag) return i;
    }
    return std::nullopt;
  }
};

struct Manifest {
  int version = 1;
  double step_seconds = kDefaultStepSeconds;
  std::vector<SeizureRecord> records;
};

/// One view's sequence of feature vectors, stored column-per-step so that a
/// step is a contiguous m-vector.
class FeatureSequence {
 public:
  FeatureSequence() = default;

  /// `steps` is m x T: column k is feature vector z_k.
  explicit FeatureSequence(Eigen::MatrixXd steps,
                           double step_seconds = kDefaultStepSeconds)
      : steps_(std::move(steps)), step_seconds_(step_seconds) {
    if (steps_.cols() < 1) throw DataError("feature sequence has no vectors");
    if (steps_.rows() < 1) throw DataError("feature dimension must be >= 1");
    if (!(step_seconds_ > 0.0)) throw DataError("step_seconds must be > 0");
    if (!steps_.allFinite()) throw DataError("feature sequence has non-finite entries");
  }

  /// Build from T x m row-major data (one row per vector).
  static FeatureSequence from_rows(const Eigen::MatrixXd& rows,
                                   double step_seconds = kDefaultStepSeconds) {
    return FeatureSequence(rows.transpose(), step_seconds);
  }

  std::size_t length() const noexcept { return static_cast<std::size_t>(steps_.cols()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(steps_.rows()); }
  double step_seconds() const noexcept { return step_seconds_; }

  auto vector(std::size_t k) const { return steps_.col(static_cast<Eigen::Index>(k)); }
  const Eigen::MatrixXd& matrix() const noexcept { return steps_; }

 private:
  Eigen::MatrixXd steps_;
  double step_seconds_ = kDefaultStepSeconds;
};

/// Seizure -> fold index. Assignment is per seizure, so both views share it.
struct FoldAssignment {
  std::size_t fold_count = 10;
  std::map<std::string, std::size_t> fold_of;

  std::size_t at(const std::string& seizure_id) const {
    auto it = fold_of.find(seizure_id);
    if (it == fold_of.end()) throw DataError("seizure '" + seizure_id + "' has no fold");
    return it->second;
  }
};

enum class Aggregator { mean, lstm, blstm };

inline std::string_view to_string(Aggregator agg) {
  switch (agg) {
    case Aggregator::mean: return "mean";
    case Aggregator::lstm: return "lstm";
    case Aggregator::blstm: return "blstm";
  }
  return "?";
}

inline std::optional<Aggregator> parse_aggregator(std::string_view text) {
  if (text == "mean") return Aggregator::mean;
  if (text == "lstm") return Aggregator::lstm;
  if (text == "blstm") return Aggregator::blstm;
  return std::nullopt;
}

/// Hyperparameters of one training run. Defaults are those of the
/// seizure-level experiment; the snippet experiment overrides lr, batch and
/// epochs (see `snippet_defaults`).
struct ExperimentConfig {
  std::size_t n_segments = 16;
  double gamma = 2.0;
  Aggregator aggregator = Aggregator::blstm;
  std::size_t hidden_units = 64;
  double lr = 1e-2;
  std::size_t epochs = 40;
  std::size_t batch = 64;
  std::uint64_t seed = 0;
  std::size_t fold_count = 10;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 1e-2;
  double grad_clip = 5.0;

  static ExperimentConfig snippet_defaults() {
    ExperimentConfig cfg;
    cfg.lr = 1e-3;
    cfg.batch = 1024;
    cfg.epochs = 400;
    return cfg;
  }

  void validate() const {
    if (n_segments < 1) throw DomainError("n_segments must be >= 1");
    if (!(gamma >= 1.0)) throw DomainError("gamma must be >= 1 or inf");
    if (hidden_units < 1) throw DomainError("hidden_units must be >= 1");
    if (!(lr > 0.0) || !std::isfinite(lr)) throw DomainError("lr must be positive");
    if (epochs < 1) throw DomainError("epochs must be >= 1");
    if (batch < 1) throw DomainError("batch must be >= 1");
    if (fold_count < 2) throw DomainError("fold_count must be >= 2");
  }
};

// ---------------------------------------------------------------------------
// Ground-truth rules

/// 0 before the clonic phase, 1 from it onwards; always 0 for a focal
/// seizure (tG = +inf).
inline int frame_label(double t, double generalization) noexcept {
  return t < generalization ? kFos : kTcs;
}

/// Label of a snippet spanning [t_start, t_end], decided at its midpoint.
inline int snippet_label(double t_start, double t_end, double generalization) {
  if (t_start > t_end) throw DomainError("invalid interval: t_start > t_end");
  return frame_label((t_start + t_end) / 2.0, generalization);
}

/// Fraction of the seizure elapsed before generalization.
inline double generalization_ratio(const TimeAnnotations& ann) {
  if (!ann.generalizes()) throw DomainError("not a TCS: tG is infinite");
  if (ann.offset == ann.onset) throw DomainError("degenerate duration: t1 == t0");
  return (ann.generalization - ann.onset) / (ann.offset - ann.onset);
}

/// Smallest segment count whose last segment starts at or after `r_max` on a
/// unit timeline, i.e. ceil(1 / (1 - r_max)).
inline std::size_t min_segments(double r_max) {
  if (!(r_max >= 0.0) || !(r_max < 1.0)) {
    throw DomainError("min_segments requires 0 <= r_max < 1");
  }
  auto n = static_cast<std::size_t>(std::ceil(1.0 / (1.0 - r_max)));
  if (n < 1) n = 1;
  // 1/(1-r) picks up rounding error (r = 0.8 gives 5.000000000000001); settle
  // on the exact predicate (n-1)/n >= r.
  while (n > 1 && static_cast<double>(n - 2) / static_cast<double>(n - 1) >= r_max) --n;
  while (static_cast<double>(n - 1) / static_cast<double>(n) < r_max) ++n;
  return n;
}

/// Start/end times of feature position k of a stream.
inline double position_start(const TimeAnnotations& ann, double step_seconds, std::size_t k) {
  return ann.onset + static_cast<double>(k) * step_seconds;
}

/// Snippet label of feature position k.
inline int position_label(const TimeAnnotations& ann, double step_seconds, std::size_t k) {
  const double start = position_start(ann, step_seconds, k);
  return snippet_label(start, start + step_seconds, ann.generalization);
}

}  // namespace gestures
