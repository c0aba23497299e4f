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

// Stratified k-fold assignment balancing total duration and class mix.
//
// Seizures are visited longest first and each goes to the fold where it
// lowers (or least raises) the imbalance
//
//   |D_f - D*| / D*  +  penalty * sum_c |N_{f,c} - N*_c| / N*_c
//
// with D* and N*_c the per-fold targets for total duration and for the count
// of class c. Assignment is per seizure, so both views share a fold; patients
// may span folds.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <vector>

#include <json.hpp>

#include "gestures/core.hpp"
#include "gestures/error.hpp"
#include "gestures/io.hpp"
#include "gestures/random.hpp"

namespace gestures {

inline constexpr double kFoldClassPenalty = 1.0;

inline FoldAssignment make_folds(const Manifest& manifest, std::size_t fold_count, std::uint64_t seed) {
  if (fold_count < 2) throw DomainError("make_folds requires at least two folds");
  const auto& records = manifest.records;
  std::size_t per_class[2] = {0, 0};
  double total_duration = 0.0;
  for (const auto& r : records) {
    if (r.label != kFos && r.label != kTcs) throw DataError("record " + r.seizure_id + " has an invalid label");
    ++per_class[r.label];
    total_duration += r.annotations.duration();
  }
  if (per_class[kFos] < fold_count || per_class[kTcs] < fold_count) {
    throw DataError("make_folds: need at least " + std::to_string(fold_count) + " records of each class, have " +
                    std::to_string(per_class[kFos]) + " FOS and " + std::to_string(per_class[kTcs]) + " TCS");
  }

  // Seeded tie-break among equal durations, then longest first.
  std::vector<std::size_t> order(records.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(derive_seed({seed, 0xF01D5ULL}));
  rng.shuffle(order);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return records[a].annotations.duration() > records[b].annotations.duration();
  });

  const double k = static_cast<double>(fold_count);
  const double target_duration = total_duration / k;
  const double target_count[2] = {static_cast<double>(per_class[kFos]) / k, static_cast<double>(per_class[kTcs]) / k};
  std::vector<double> duration(fold_count, 0.0);
  std::vector<std::array<double, 2>> count(fold_count, {0.0, 0.0});

  auto sq = [](double x) { return x * x; };
  FoldAssignment folds;
  folds.fold_count = fold_count;
  for (auto idx : order) {
    const auto& r = records[idx];
    const double d = r.annotations.duration();
    const int c = r.label;
    std::size_t best = 0;
    double best_cost = std::numeric_limits<double>::infinity();
    for (std::size_t f = 0; f < fold_count; ++f) {
      const double dur_delta = (sq(duration[f] + d - target_duration) - sq(duration[f] - target_duration)) /
                               sq(target_duration);
      const double cls_delta =
          (sq(count[f][c] + 1.0 - target_count[c]) - sq(count[f][c] - target_count[c])) / sq(target_count[c]);
      const double cost = dur_delta + kFoldClassPenalty * cls_delta;
      if (cost < best_cost) {
        best_cost = cost;
        best = f;
      }
    }
    duration[best] += d;
    count[best][c] += 1.0;
    if (!folds.fold_of.emplace(r.seizure_id, best).second) {
      throw DataError("duplicate seizure_id " + r.seizure_id);
    }
  }
  return folds;
}

inline nlohmann::ordered_json folds_to_json(const FoldAssignment& folds) {
  nlohmann::ordered_json doc;
  doc["fold_count"] = folds.fold_count;
  doc["folds"] = nlohmann::ordered_json::object();
  for (const auto& [id, f] : folds.fold_of) doc["folds"][id] = f;
  return doc;
}

inline FoldAssignment folds_from_json(const nlohmann::json& doc) {
  try {
    FoldAssignment folds;
    folds.fold_count = doc.at("fold_count").get<std::size_t>();
    for (const auto& [id, f] : doc.at("folds").items()) {
      const auto fold = f.get<std::size_t>();
      if (fold >= folds.fold_count) throw DataError("fold index out of range for " + id);
      folds.fold_of[id] = fold;
    }
    return folds;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed folds file: ") + e.what());
  }
}

inline void write_folds(const std::filesystem::path& path, const FoldAssignment& folds) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot create folds file");
  out << folds_to_json(folds).dump(2) << '\n';
}

inline FoldAssignment read_folds(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open folds file");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, std::string("invalid JSON: ") + e.what());
  }
  return folds_from_json(doc);
}

}  // namespace gestures
