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

// One-tailed Mann-Whitney U test for the alternative "a tends to exceed b".
//
// U counts pairs (a_i, b_j) with a_i > b_j, ties counting one half. Without
// ties and with |a|*|b| <= kExactLimit the p-value P(U >= u_obs) is exact,
// from the null distribution of U counted by dynamic programming over
// arrangements of the pooled ranks. Otherwise the normal approximation with
// tie-corrected variance and a 0.5 continuity correction is used.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "gestures/error.hpp"

namespace gestures::stats {

inline constexpr std::size_t kExactLimit = 400;

struct UTestResult {
  double u = 0.0;
  double p = 1.0;
  bool exact = false;
};

/// Number of arrangements of n1 a's and n2 b's producing each U = 0..n1*n2.
inline std::vector<std::uint64_t> u_null_counts(std::size_t n1, std::size_t n2) {
  // Recurrence on the largest pooled element: if it is an a it beats all n2
  // b's, f(i, j, u) = f(i-1, j, u-j) + f(i, j-1, u).
  std::vector<std::vector<std::uint64_t>> prev_row(n2 + 1);  // f(i-1, j, .)
  for (std::size_t j = 0; j <= n2; ++j) prev_row[j] = {1};
  for (std::size_t i = 1; i <= n1; ++i) {
    std::vector<std::vector<std::uint64_t>> row(n2 + 1);
    row[0] = {1};
    for (std::size_t j = 1; j <= n2; ++j) {
      std::vector<std::uint64_t> f(i * j + 1, 0);
      const auto& with_a = prev_row[j];   // size (i-1)*j + 1, shifted by j
      const auto& with_b = row[j - 1];    // size i*(j-1) + 1
      for (std::size_t u = 0; u < with_a.size(); ++u) f[u + j] += with_a[u];
      for (std::size_t u = 0; u < with_b.size(); ++u) f[u] += with_b[u];
      row[j] = std::move(f);
    }
    prev_row = std::move(row);
  }
  return prev_row[n2];
}

/// U statistic of a against b (midrank tie convention).
inline double u_statistic(std::span<const double> a, std::span<const double> b) {
  double u = 0.0;
  for (double x : a) {
    for (double y : b) {
      if (x > y) u += 1.0;
      else if (x == y) u += 0.5;
    }
  }
  return u;
}

inline UTestResult mann_whitney_one_tailed(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("mann_whitney requires two non-empty groups");
  const std::size_t n1 = a.size(), n2 = b.size();
  UTestResult result;
  result.u = u_statistic(a, b);

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  std::sort(pooled.begin(), pooled.end());
  double tie_term = 0.0;  // sum over tie groups of t^3 - t
  for (std::size_t i = 0; i < pooled.size();) {
    std::size_t j = i;
    while (j < pooled.size() && pooled[j] == pooled[i]) ++j;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }

  if (tie_term == 0.0 && n1 * n2 <= kExactLimit) {
    const auto counts = u_null_counts(n1, n2);
    const auto observed = static_cast<std::size_t>(result.u);
    std::uint64_t tail = 0, total = 0;
    for (std::size_t u = 0; u < counts.size(); ++u) {
      total += counts[u];
      if (u >= observed) tail += counts[u];
    }
    result.p = static_cast<double>(tail) / static_cast<double>(total);
    result.exact = true;
    return result;
  }

  const double N = static_cast<double>(n1 + n2);
  const double mean = static_cast<double>(n1 * n2) / 2.0;
  const double var = static_cast<double>(n1 * n2) / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
  if (!(var > 0.0)) {
    result.p = 1.0;
    return result;
  }
  const double z = (result.u - mean - 0.5) / std::sqrt(var);
  result.p = std::min(1.0, 0.5 * std::erfc(z / std::sqrt(2.0)));
  return result;
}

}  // namespace gestures::stats
