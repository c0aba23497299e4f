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

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "gestures/error.hpp"
#include "gestures/stats/mann_whitney.hpp"

namespace gestures::stats {

inline constexpr double kDefaultAlpha = 0.05;

/// Bonferroni-corrected threshold for e experiments compared pairwise in both
/// directions: alpha / (e (e - 1)).
inline double bonferroni_alpha(double alpha, std::size_t e) {
  if (e < 2) throw DomainError("bonferroni_alpha requires e >= 2");
  return alpha / (static_cast<double>(e) * static_cast<double>(e - 1));
}

inline bool significant(double p, double alpha, std::size_t e) { return p < bonferroni_alpha(alpha, e); }

/// Per-fold values of one metric for one model.
struct MetricColumn {
  std::string model;
  std::vector<double> per_fold;
};

struct ComparisonRow {
  std::string model_a;
  std::string model_b;
  std::string metric;
  double u = 0.0;
  double p = 1.0;
  double alpha_bonf = 0.0;
  bool significant = false;
  bool exact = false;
};

/// Tests every ordered pair (a, b), a != b, for "a better than b".
inline std::vector<ComparisonRow> compare_grid(const std::vector<MetricColumn>& columns, const std::string& metric,
                                               double alpha = kDefaultAlpha) {
  if (columns.size() < 2) throw DomainError("compare_grid needs at least two models");
  const auto folds = columns.front().per_fold.size();
  for (const auto& c : columns) {
    if (c.per_fold.size() != folds) throw ShapeError("compare_grid: ragged metric table for " + c.model);
  }
  const double threshold = bonferroni_alpha(alpha, columns.size());
  std::vector<ComparisonRow> rows;
  for (const auto& a : columns) {
    for (const auto& b : columns) {
      if (&a == &b) continue;
      const auto test = mann_whitney_one_tailed(a.per_fold, b.per_fold);
      rows.push_back({a.model, b.model, metric, test.u, test.p, threshold, test.p < threshold, test.exact});
    }
  }
  return rows;
}

inline void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "model_a,model_b,metric,U,p,alpha_bonf,significant\n";
  char buffer[64];
  for (const auto& r : rows) {
    out << r.model_a << ',' << r.model_b << ',' << r.metric << ',';
    std::snprintf(buffer, sizeof buffer, "%.1f,%.10g,%.10g", r.u, r.p, r.alpha_bonf);
    out << buffer << ',' << (r.significant ? 1 : 0) << '\n';
  }
}

inline void print_comparison_table(std::ostream& out, const std::vector<ComparisonRow>& rows) {
  out << "# one-tailed Mann-Whitney U (exact when tie-free and |a||b| <= " << kExactLimit
      << ", else tie-corrected normal approximation)\n";
  char buffer[256];
  std::snprintf(buffer, sizeof buffer, "%-24s %-24s %-10s %8s %12s %12s %s\n", "model_a", "model_b", "metric", "U",
                "p", "alpha_bonf", "sig");
  out << buffer;
  for (const auto& r : rows) {
    std::snprintf(buffer, sizeof buffer, "%-24s %-24s %-10s %8.1f %12.4g %12.4g %s\n", r.model_a.c_str(),
                  r.model_b.c_str(), r.metric.c_str(), r.u, r.p, r.alpha_bonf, r.significant ? "*" : "");
    out << buffer;
  }
}

}  // namespace gestures::stats
