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

#include <gtest/gtest.h>

#include <cmath>

#include "gestures/core.hpp"
#include "gestures/random.hpp"

namespace gestures {
namespace {

TEST(FrameLabel, RuleAndBoundary) {
  EXPECT_EQ(frame_label(10, 12), 0);
  EXPECT_EQ(frame_label(12, 12), 1);
  EXPECT_EQ(frame_label(999, kInfinity), 0);
}

TEST(FrameLabel, MonotoneInTime) {
  Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const double tg = rng.uniform(0, 100);
    int previous = 0;
    for (double t = 0; t <= 100; t += 0.5) {
      const int y = frame_label(t, tg);
      EXPECT_GE(y, previous);
      previous = y;
    }
  }
}

TEST(SnippetLabel, Midpoint) {
  EXPECT_EQ(snippet_label(10, 14, 12), 1);
  EXPECT_EQ(snippet_label(10, 14, 12.01), 0);
  EXPECT_EQ(snippet_label(0, 100, kInfinity), 0);
  EXPECT_THROW(snippet_label(5, 4, 1), DomainError);
}

TEST(SnippetLabel, WholeSeizureLabelMatchesClass) {
  // A FOS never produces a positive snippet; a TCS generalizing before the
  // midpoint of [t0, t1] does.
  EXPECT_EQ(snippet_label(0, 100, kInfinity), kFos);
  EXPECT_EQ(snippet_label(0, 100, 40), kTcs);
}

TEST(GeneralizationRatio, Examples) {
  EXPECT_DOUBLE_EQ(generalization_ratio({0, 56, 100}), 0.56);
  EXPECT_DOUBLE_EQ(generalization_ratio({5, 5, 10}), 0.0);
  EXPECT_DOUBLE_EQ(generalization_ratio({0, 93, 100}), 0.93);
  EXPECT_THROW(generalization_ratio({0, kInfinity, 100}), DomainError);
  EXPECT_THROW(generalization_ratio({3, 3, 3}), DomainError);
}

TEST(GeneralizationRatio, InUnitIntervalForValidTcs) {
  Rng rng(5);
  for (int i = 0; i < 1000; ++i) {
    const double t0 = rng.uniform(0, 50);
    const double t1 = t0 + rng.uniform(0.1, 500);
    const double tg = rng.uniform(t0, t1);
    const double r = generalization_ratio({t0, tg, t1});
    EXPECT_GE(r, 0.0);
    EXPECT_LE(r, 1.0);
  }
}

TEST(MinSegments, Examples) {
  EXPECT_EQ(min_segments(0.93), 15u);
  EXPECT_EQ(min_segments(0.0), 1u);
  EXPECT_EQ(min_segments(0.5), 2u);
  EXPECT_EQ(min_segments(0.8), 5u);
  EXPECT_THROW(min_segments(1.0), DomainError);
  EXPECT_THROW(min_segments(-0.1), DomainError);
}

TEST(MinSegments, SmallestCountWhoseLastSegmentStartsAfterRatio) {
  Rng rng(3);
  std::size_t previous = 1;
  for (int i = 0; i <= 990; ++i) {
    const double r = i / 1000.0;
    const auto n = min_segments(r);
    EXPECT_GE(n, previous) << r;
    previous = n;
    // Brute force: first n with (n - 1) / n >= r.
    std::size_t brute = 1;
    while (static_cast<double>(brute - 1) / static_cast<double>(brute) < r) ++brute;
    EXPECT_EQ(n, brute) << r;
  }
  for (int i = 0; i < 1000; ++i) {
    const double r = rng.uniform(0.0, 0.999);
    const auto n = min_segments(r);
    EXPECT_GE(static_cast<double>(n - 1) / static_cast<double>(n), r);
    if (n > 1) EXPECT_LT(static_cast<double>(n - 2) / static_cast<double>(n - 1), r);
  }
}

TEST(PositionLabel, StepTiming) {
  const TimeAnnotations ann{0.0, 10.0, 20.0};
  const double step = 32.0 / 15.0;
  // Midpoint of position k is (k + 0.5) * step; 10 s falls in position 4.
  EXPECT_EQ(position_label(ann, step, 3), 0);  // midpoint 7.47
  EXPECT_EQ(position_label(ann, step, 4), 0);  // midpoint 9.6
  EXPECT_EQ(position_label(ann, step, 5), 1);  // midpoint 11.73
  EXPECT_DOUBLE_EQ(position_start(ann, step, 5), 5 * step);
}

TEST(FeatureSequence, Validation) {
  Eigen::MatrixXd ok = Eigen::MatrixXd::Ones(4, 3);
  FeatureSequence seq(ok);
  EXPECT_EQ(seq.length(), 3u);
  EXPECT_EQ(seq.dim(), 4u);
  EXPECT_THROW(FeatureSequence(Eigen::MatrixXd(4, 0)), DataError);
  Eigen::MatrixXd bad = ok;
  bad(1, 1) = std::nan("");
  EXPECT_THROW(FeatureSequence{bad}, DataError);
  EXPECT_THROW(FeatureSequence(ok, 0.0), DataError);
}

TEST(FeatureSequence, FromRowsTransposes) {
  Eigen::MatrixXd rows(2, 3);
  rows << 1, 2, 3, 4, 5, 6;
  const auto seq = FeatureSequence::from_rows(rows);
  EXPECT_EQ(seq.length(), 2u);
  EXPECT_EQ(seq.dim(), 3u);
  EXPECT_EQ(seq.vector(1)(2), 6.0);
}

TEST(ExperimentConfig, DefaultsAndValidation) {
  ExperimentConfig cfg;
  EXPECT_EQ(cfg.hidden_units, 64u);
  EXPECT_EQ(cfg.batch, 64u);
  EXPECT_DOUBLE_EQ(cfg.lr, 1e-2);
  EXPECT_NO_THROW(cfg.validate());
  const auto snippet = ExperimentConfig::snippet_defaults();
  EXPECT_DOUBLE_EQ(snippet.lr, 1e-3);
  EXPECT_EQ(snippet.batch, 1024u);
  EXPECT_EQ(snippet.epochs, 400u);
  cfg.gamma = 0.5;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg.gamma = kInfinity;
  EXPECT_NO_THROW(cfg.validate());
}

TEST(Parsing, TagsAndAggregators) {
  EXPECT_EQ(parse_view_tag("large"), ViewTag::large);
  EXPECT_EQ(parse_view_tag("small"), ViewTag::small);
  EXPECT_FALSE(parse_view_tag("medium"));
  EXPECT_EQ(parse_aggregator("blstm"), Aggregator::blstm);
  EXPECT_FALSE(parse_aggregator("gru"));
  EXPECT_EQ(to_string(Aggregator::lstm), "lstm");
}

}  // namespace
}  // namespace gestures
