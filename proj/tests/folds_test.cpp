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

#include <set>

#include "gestures/pipeline/folds.hpp"
#include "gestures/pipeline/training.hpp"
#include "gestures/synthgen.hpp"
#include "test_util.hpp"

namespace gestures {
namespace {

struct FoldSummary {
  std::vector<double> duration;
  std::vector<double> tcs_share;
  double mean_duration = 0.0;
  double global_tcs_share = 0.0;
};

FoldSummary summarize(const Manifest& m, const FoldAssignment& folds) {
  FoldSummary s;
  const auto k = folds.fold_count;
  s.duration.assign(k, 0.0);
  std::vector<double> tcs(k, 0.0), count(k, 0.0);
  double total_tcs = 0.0;
  for (const auto& r : m.records) {
    const auto f = folds.at(r.seizure_id);
    s.duration[f] += r.annotations.duration();
    count[f] += 1.0;
    tcs[f] += r.label == kTcs ? 1.0 : 0.0;
    total_tcs += r.label == kTcs ? 1.0 : 0.0;
  }
  for (std::size_t f = 0; f < k; ++f) {
    s.mean_duration += s.duration[f] / static_cast<double>(k);
    s.tcs_share.push_back(tcs[f] / count[f]);
  }
  s.global_tcs_share = total_tcs / static_cast<double>(m.records.size());
  return s;
}

TEST(Folds, BalancedOnDefaultSyntheticManifest) {
  SynthConfig cfg;
  cfg.dim = 2;  // durations and labels do not depend on dim
  const auto ds = synthesize(cfg);
  const auto folds = make_folds(ds.manifest, 10, 0);
  ASSERT_EQ(folds.fold_of.size(), ds.size());
  const auto s = summarize(ds.manifest, folds);
  for (std::size_t f = 0; f < 10; ++f) {
    EXPECT_NEAR(s.duration[f], s.mean_duration, 0.2 * s.mean_duration) << "fold " << f;
    EXPECT_NEAR(s.tcs_share[f], s.global_tcs_share, 0.2 * s.global_tcs_share) << "fold " << f;
  }
}

TEST(Folds, BalancedAcrossSeedsAndFoldCounts) {
  for (std::uint64_t seed : {1, 2, 3, 4}) {
    SynthConfig cfg;
    cfg.dim = 1;
    cfg.seed = seed;
    const auto ds = synthesize(cfg);
    for (std::size_t k : {5, 10}) {
      const auto folds = make_folds(ds.manifest, k, seed);
      const auto s = summarize(ds.manifest, folds);
      for (std::size_t f = 0; f < k; ++f) {
        EXPECT_NEAR(s.duration[f], s.mean_duration, 0.2 * s.mean_duration);
        EXPECT_NEAR(s.tcs_share[f], s.global_tcs_share, 0.2 * s.global_tcs_share);
      }
    }
  }
}

TEST(Folds, ViewsOfASeizureNeverStraddleTrainAndValidation) {
  SynthConfig cfg;
  cfg.dim = 1;
  cfg.blank_rate = 0.0;
  const auto ds = synthesize(cfg);
  const auto folds = make_folds(ds.manifest, 10, 0);
  for (std::size_t f = 0; f < 10; ++f) {
    std::set<std::size_t> train, val;
    for (const auto& s : training_streams(ds, folds, f)) train.insert(s.record);
    for (const auto& s : validation_streams(ds, folds, f)) val.insert(s.record);
    for (auto r : val) EXPECT_FALSE(train.count(r));
    EXPECT_EQ(train.size() + val.size(), ds.size());
    EXPECT_EQ(training_streams(ds, folds, f).size(), 2 * train.size());
  }
}

TEST(Folds, DeterministicAndSeedDependent) {
  SynthConfig cfg;
  cfg.dim = 1;
  const auto ds = synthesize(cfg);
  EXPECT_EQ(make_folds(ds.manifest, 10, 7).fold_of, make_folds(ds.manifest, 10, 7).fold_of);

  // The seed only breaks ties between equal durations.
  Manifest tied;
  for (int i = 0; i < 20; ++i) {
    tied.records.push_back(testing::make_record("R" + std::to_string(i), i % 2 ? kTcs : kFos, 0, i % 2 ? 5 : kInfinity, 10));
  }
  EXPECT_NE(make_folds(tied, 4, 7).fold_of, make_folds(tied, 4, 8).fold_of);
}

TEST(Folds, RejectsTooFewRecordsPerClass) {
  Manifest m;
  for (int i = 0; i < 5; ++i) m.records.push_back(testing::make_record("F" + std::to_string(i), kFos, 0, kInfinity, 10));
  m.records.push_back(testing::make_record("T0", kTcs, 0, 5, 10));
  EXPECT_THROW(make_folds(m, 2, 0), DataError);
  EXPECT_THROW(make_folds(m, 1, 0), DomainError);
}

TEST(Folds, JsonRoundTrip) {
  testing::TempDir tmp("folds");
  FoldAssignment folds;
  folds.fold_count = 3;
  folds.fold_of = {{"a", 0}, {"b", 2}, {"c", 1}};
  write_folds(tmp / "folds.json", folds);
  const auto back = read_folds(tmp / "folds.json");
  EXPECT_EQ(back.fold_count, 3u);
  EXPECT_EQ(back.fold_of, folds.fold_of);
  EXPECT_THROW(folds_from_json(nlohmann::json::parse(R"({"fold_count":2,"folds":{"a":5}})")), DataError);
  EXPECT_THROW(folds_from_json(nlohmann::json::parse(R"({"folds":{}})")), DataError);
  EXPECT_THROW(read_folds(tmp / "missing.json"), IoError);
}

}  // namespace
}  // namespace gestures
