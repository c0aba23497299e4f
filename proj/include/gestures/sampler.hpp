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

// Temporal-segment sampling: a sequence of T feature positions is split into
// n contiguous, non-overlapping segments and one position is drawn from each,
// at a relative offset u ~ Beta(gamma, gamma). gamma = 1 is uniform within
// the segment and gamma = +inf always picks the centre.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gestures/error.hpp"
#include "gestures/random.hpp"

namespace gestures {

/// Draw from the symmetric Beta(gamma, gamma) law.
inline double beta_symmetric_sample(double gamma, Rng& rng) {
  if (!(gamma >= 1.0)) throw DomainError("beta_symmetric_sample requires gamma >= 1");
  if (std::isinf(gamma)) return 0.5;
  if (gamma == 1.0) return rng.uniform();
  const double a = rng.gamma(gamma);
  const double b = rng.gamma(gamma);
  return a / (a + b);
}

struct SegmentPartition {
  std::size_t length = 0;
  std::size_t count = 0;
  std::vector<std::size_t> boundaries;  // count + 1 entries, b_0 = 0, b_n = length

  std::size_t begin(std::size_t i) const { return boundaries[i]; }
  std::size_t end(std::size_t i) const { return boundaries[i + 1]; }
  std::size_t size(std::size_t i) const { return end(i) - begin(i); }
};

/// b_i = floor(i * T / n). Throws ShortSequenceError when T < n.
inline SegmentPartition partition(std::size_t length, std::size_t count) {
  if (length < 1 || count < 1) throw DomainError("partition requires T >= 1 and n >= 1");
  if (length < count) throw ShortSequenceError(length, count);
  SegmentPartition p{length, count, {}};
  p.boundaries.reserve(count + 1);
  for (std::size_t i = 0; i <= count; ++i) p.boundaries.push_back(i * length / count);
  return p;
}

struct SampledIndices {
  std::vector<std::size_t> indices;

  std::size_t size() const noexcept { return indices.size(); }
  std::size_t operator[](std::size_t i) const { return indices[i]; }
  friend bool operator==(const SampledIndices&, const SampledIndices&) = default;
};

/// Offset within a segment of length `segment_size` for relative position u.
inline std::size_t segment_offset(double u, std::size_t segment_size) {
  const double scaled = std::floor(u * static_cast<double>(segment_size));
  const auto offset = static_cast<std::size_t>(std::max(0.0, scaled));
  return std::min(segment_size - 1, offset);
}

inline SampledIndices sample_train(std::size_t length, std::size_t count, double gamma, Rng& rng) {
  const auto p = partition(length, count);
  SampledIndices out;
  out.indices.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = beta_symmetric_sample(gamma, rng);
    out.indices.push_back(p.begin(i) + segment_offset(u, p.size(i)));
  }
  return out;
}

/// Centre position of every segment; identical to sample_train at gamma = inf.
inline SampledIndices sample_eval(std::size_t length, std::size_t count) {
  const auto p = partition(length, count);
  SampledIndices out;
  out.indices.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.indices.push_back(p.begin(i) + segment_offset(0.5, p.size(i)));
  return out;
}

namespace detail {

inline SampledIndices pad_short(std::size_t length, std::size_t count) {
  SampledIndices out;
  out.indices.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.indices.push_back(std::min(i, length - 1));
  return out;
}

}  // namespace detail

/// Training indices that always have `count` entries: sequences shorter than
/// `count` use every position once and repeat the last one.
inline SampledIndices draw_training_indices(std::size_t length, std::size_t count, double gamma,
                                            Rng& rng) {
  if (length >= count) return sample_train(length, count, gamma, rng);
  if (length < 1) throw DomainError("empty sequence");
  return detail::pad_short(length, count);
}

/// Evaluation counterpart of draw_training_indices.
inline SampledIndices evaluation_indices(std::size_t length, std::size_t count) {
  if (length >= count) return sample_eval(length, count);
  if (length < 1) throw DomainError("empty sequence");
  return detail::pad_short(length, count);
}

}  // namespace gestures
