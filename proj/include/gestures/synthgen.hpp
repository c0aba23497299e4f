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

// Synthetic feature datasets calibrated to the scalar statistics of the
// clinical cohort (class counts, duration ranges, generalization ratio).
//
// Every feature is N(0, sigma^2) noise except:
//   - TCS: from step ceil(r T) on, a fixed random 10% of dimensions carry a
//     mean shift, identical in both views;
//   - distractor FOS: a window of 3x variance ("hyperkinetic" burst), at the
//     same place in both views;
//   - blank streams: pure noise regardless of class.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <numeric>
#include <string>
#include <vector>

#include "gestures/core.hpp"
#include "gestures/io.hpp"
#include "gestures/random.hpp"

namespace gestures {

struct SynthConfig {
  std::size_t n_fos = 106;
  std::size_t n_tcs = 77;
  std::size_t dim = kDefaultFeatureDim;
  double fps = kDefaultFps;
  int frames_per_step = kFramesPerStep;
  double fos_min_seconds = 16.0;
  double fos_max_seconds = 701.0;
  double tcs_min_seconds = 51.0;
  double tcs_max_seconds = 1098.0;
  double ratio_mean = 0.56;
  double ratio_sd = 0.18;
  double ratio_min = 0.05;
  double ratio_max = 0.93;
  double signal_shift = 0.6;
  double signal_fraction = 0.1;
  double noise_sigma = 1.0;
  double distractor_rate = 0.3;
  double burst_variance_factor = 3.0;
  double burst_min_fraction = 0.5;  // burst length as a fraction of T
  double burst_max_fraction = 1.0;
  double blank_rate = 6.0 / 366.0;
  std::size_t n_patients = 68;
  std::uint64_t seed = 0;

  double step_seconds() const { return frames_per_step / fps; }

  void validate() const {
    if (n_fos + n_tcs == 0) throw DomainError("synth: no records requested");
    if (dim < 1) throw DomainError("synth: dim must be >= 1");
    if (!(fps > 0.0) || frames_per_step < 1) throw DomainError("synth: fps and frames_per_step must be positive");
    if (!(fos_min_seconds > 0.0 && fos_min_seconds <= fos_max_seconds)) throw DomainError("synth: bad FOS range");
    if (!(tcs_min_seconds > 0.0 && tcs_min_seconds <= tcs_max_seconds)) throw DomainError("synth: bad TCS range");
    if (!(ratio_min >= 0.0 && ratio_min < ratio_max && ratio_max <= 0.93)) {
      throw DomainError("synth: ratio truncation must satisfy 0 <= lo < hi <= 0.93");
    }
    if (!(ratio_sd > 0.0)) throw DomainError("synth: ratio_sd must be > 0");
    if (!(noise_sigma > 0.0)) throw DomainError("synth: noise_sigma must be > 0");
    if (!(signal_fraction > 0.0 && signal_fraction <= 1.0)) throw DomainError("synth: signal_fraction in (0, 1]");
    if (!(distractor_rate >= 0.0 && distractor_rate <= 1.0)) throw DomainError("synth: distractor_rate in [0, 1]");
    if (!(blank_rate >= 0.0 && blank_rate <= 1.0)) throw DomainError("synth: blank_rate in [0, 1]");
    if (!(burst_min_fraction > 0.0 && burst_min_fraction <= burst_max_fraction && burst_max_fraction <= 1.0)) {
      throw DomainError("synth: bad burst fraction range");
    }
    if (n_patients < 1) throw DomainError("synth: n_patients must be >= 1");
  }
};

/// Number of feature vectors for a seizure of the given duration (at least 1).
inline std::size_t steps_for_duration(double seconds, double fps, int frames_per_step) {
  const auto steps = static_cast<std::size_t>(std::floor(seconds * fps / frames_per_step));
  return std::max<std::size_t>(1, steps);
}

/// r ~ Normal(mean, sd) truncated to [lo, hi] by rejection.
inline double sample_generalization_ratio(const SynthConfig& cfg, Rng& rng) {
  for (;;) {
    const double r = rng.normal(cfg.ratio_mean, cfg.ratio_sd);
    if (r >= cfg.ratio_min && r <= cfg.ratio_max) return r;
  }
}

/// Log-uniform draw on [lo, hi].
inline double sample_log_uniform(double lo, double hi, Rng& rng) {
  return std::exp(rng.uniform(std::log(lo), std::log(hi)));
}

/// Dimensions carrying the TCS signal: a seeded random subset of
/// round(fraction * dim) (at least one).
inline std::vector<std::size_t> signal_dimensions(const SynthConfig& cfg) {
  std::vector<std::size_t> dims(cfg.dim);
  std::iota(dims.begin(), dims.end(), 0);
  Rng rng(derive_seed({cfg.seed, 0x516ULL}));
  rng.shuffle(dims);
  const auto count = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(cfg.signal_fraction * cfg.dim)));
  dims.resize(count);
  std::sort(dims.begin(), dims.end());
  return dims;
}

/// Generates the dataset in memory. Feature values are rounded to float32 so
/// that the in-memory copy equals what the FSEQ files hold.
inline Dataset synthesize(const SynthConfig& cfg) {
  cfg.validate();
  Dataset ds;
  ds.dim = cfg.dim;
  ds.manifest.step_seconds = cfg.step_seconds();
  const auto signal = signal_dimensions(cfg);
  const auto m = static_cast<Eigen::Index>(cfg.dim);
  const std::size_t total = cfg.n_fos + cfg.n_tcs;

  for (std::size_t idx = 0; idx < total; ++idx) {
    Rng rng(derive_seed({cfg.seed, idx, 0x5EC0ULL}));
    const bool tcs = idx >= cfg.n_fos;
    SeizureRecord rec;
    char id[32];
    std::snprintf(id, sizeof id, "S%04zu", idx + 1);
    rec.seizure_id = id;
    std::snprintf(id, sizeof id, "P%03llu", static_cast<unsigned long long>(rng.below(cfg.n_patients) + 1));
    rec.patient_id = id;
    rec.label = tcs ? kTcs : kFos;

    const double duration = tcs ? sample_log_uniform(cfg.tcs_min_seconds, cfg.tcs_max_seconds, rng)
                                : sample_log_uniform(cfg.fos_min_seconds, cfg.fos_max_seconds, rng);
    rec.annotations.onset = 0.0;
    rec.annotations.offset = duration;
    rec.annotations.fps = cfg.fps;
    const std::size_t length = steps_for_duration(duration, cfg.fps, cfg.frames_per_step);

    // Per-step mean (shared by both views) and noise scale.
    std::size_t shift_start = length;
    if (tcs) {
      const double r = sample_generalization_ratio(cfg, rng);
      rec.annotations.generalization = r * duration;
      shift_start = static_cast<std::size_t>(std::ceil(r * static_cast<double>(length)));
    }
    std::size_t burst_begin = 0, burst_end = 0;
    if (!tcs && rng.uniform() < cfg.distractor_rate) {
      const double fraction = rng.uniform(cfg.burst_min_fraction, cfg.burst_max_fraction);
      const auto burst = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(fraction * length)));
      burst_begin = rng.below(length - std::min(burst, length) + 1);
      burst_end = std::min(length, burst_begin + burst);
    }

    std::array<FeatureSequence, 2> views;
    for (std::size_t v = 0; v < 2; ++v) {
      StreamRef ref;
      ref.view = v == 0 ? ViewTag::large : ViewTag::small;
      ref.blank = rng.uniform() < cfg.blank_rate;
      ref.path = std::filesystem::path("features") / (rec.seizure_id + "_" + std::string(to_string(ref.view)) + ".fseq");

      Eigen::MatrixXd steps(m, static_cast<Eigen::Index>(length));
      for (std::size_t k = 0; k < length; ++k) {
        const bool in_burst = !ref.blank && k >= burst_begin && k < burst_end;
        const double sd = cfg.noise_sigma * (in_burst ? std::sqrt(cfg.burst_variance_factor) : 1.0);
        auto col = steps.col(static_cast<Eigen::Index>(k));
        for (Eigen::Index j = 0; j < m; ++j) col(j) = sd * rng.normal();
        if (!ref.blank && k >= shift_start) {
          for (auto d : signal) col(static_cast<Eigen::Index>(d)) += cfg.signal_shift;
        }
      }
      steps = steps.cast<float>().cast<double>();
      views[v] = FeatureSequence(std::move(steps), ds.manifest.step_seconds);
      rec.views.push_back(std::move(ref));
    }
    ds.manifest.records.push_back(std::move(rec));
    ds.features.push_back(std::move(views));
  }
  return ds;
}

/// Writes manifest.json and the FSEQ files under `dir`.
inline void write_dataset(const Dataset& ds, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir / "features", ec);
  if (ec) throw IoError(dir, "cannot create dataset directory: " + ec.message());
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (std::size_t v = 0; v < 2; ++v) write_fseq_binary(dir / ds.record(r).views[v].path, ds.features[r][v]);
  }
  write_manifest(dir / "manifest.json", ds.manifest);
}

/// synthesize + write_dataset; returns the manifest.
inline Manifest generate(const SynthConfig& cfg, const std::filesystem::path& dir) {
  auto ds = synthesize(cfg);
  write_dataset(ds, dir);
  return ds.manifest;
}

}  // namespace gestures
