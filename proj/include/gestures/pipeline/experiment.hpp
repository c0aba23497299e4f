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

// Cross-validated experiments and their on-disk form.
//
// A run directory holds
//
//   config.json            every effective hyperparameter
//   folds.json             seizure -> fold
//   fold<k>/log.csv        epoch,train_loss,val_loss
//   fold<k>/best.ckpt      parameters of the chosen epoch (+ AdamW moments)
//   predictions.csv        written by eval (seizure models)
//   metrics.csv            per-fold and pooled metrics
//
// A grid directory holds config.json, folds.json, aggregation.csv (one row
// per configuration) and aggregation_folds.csv (one row per configuration
// and fold).

#pragma once

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gestures/core.hpp"
#include "gestures/io.hpp"
#include "gestures/nn/checkpoint.hpp"
#include "gestures/pipeline/folds.hpp"
#include "gestures/pipeline/models.hpp"
#include "gestures/pipeline/training.hpp"
#include "gestures/stats/metrics.hpp"

namespace gestures {

// ---------------------------------------------------------------------------
// Config echo

inline std::string gamma_to_string(double gamma) {
  if (std::isinf(gamma)) return "inf";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%g", gamma);
  return buffer;
}

/// Parses a Beta parameter; "inf" selects deterministic segment centres.
inline std::optional<double> parse_gamma(const std::string& text) {
  if (text == "inf" || text == "Inf" || text == "INF") return kInfinity;
  try {
    std::size_t used = 0;
    const double g = std::stod(text, &used);
    if (used != text.size() || !(g >= 1.0) || std::isinf(g)) return std::nullopt;
    return g;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

enum class RunKind { snippet, seizure };

inline nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg, RunKind kind) {
  nlohmann::ordered_json j;
  j["kind"] = kind == RunKind::snippet ? "snippet" : "seizure";
  if (kind == RunKind::seizure) {
    j["n_segments"] = cfg.n_segments;
    j["gamma"] = gamma_to_string(cfg.gamma);
    j["aggregator"] = std::string(to_string(cfg.aggregator));
    j["hidden_units"] = cfg.hidden_units;
  }
  j["lr"] = cfg.lr;
  j["epochs"] = cfg.epochs;
  j["batch"] = cfg.batch;
  j["seed"] = cfg.seed;
  j["fold_count"] = cfg.fold_count;
  j["beta1"] = cfg.beta1;
  j["beta2"] = cfg.beta2;
  j["eps"] = cfg.eps;
  j["weight_decay"] = cfg.weight_decay;
  j["grad_clip"] = cfg.grad_clip;
  return j;
}

inline RunKind run_kind_from_json(const nlohmann::json& j) {
  const auto kind = j.value("kind", std::string("seizure"));
  if (kind == "snippet") return RunKind::snippet;
  if (kind == "seizure") return RunKind::seizure;
  throw DataError("config.json has unknown kind '" + kind + "'");
}

inline ExperimentConfig config_from_json(const nlohmann::json& j) {
  try {
    ExperimentConfig cfg = run_kind_from_json(j) == RunKind::snippet ? ExperimentConfig::snippet_defaults()
                                                                       : ExperimentConfig{};
    if (j.contains("n_segments")) cfg.n_segments = j.at("n_segments").get<std::size_t>();
    if (j.contains("gamma")) {
      const auto g = parse_gamma(j.at("gamma").get<std::string>());
      if (!g) throw DataError("config.json has an invalid gamma");
      cfg.gamma = *g;
    }
    if (j.contains("aggregator")) {
      const auto agg = parse_aggregator(j.at("aggregator").get<std::string>());
      if (!agg) throw DataError("config.json has an unknown aggregator");
      cfg.aggregator = *agg;
    }
    cfg.hidden_units = j.value("hidden_units", cfg.hidden_units);
    cfg.lr = j.value("lr", cfg.lr);
    cfg.epochs = j.value("epochs", cfg.epochs);
    cfg.batch = j.value("batch", cfg.batch);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.fold_count = j.value("fold_count", cfg.fold_count);
    cfg.beta1 = j.value("beta1", cfg.beta1);
    cfg.beta2 = j.value("beta2", cfg.beta2);
    cfg.eps = j.value("eps", cfg.eps);
    cfg.weight_decay = j.value("weight_decay", cfg.weight_decay);
    cfg.grad_clip = j.value("grad_clip", cfg.grad_clip);
    return cfg;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("malformed config.json: ") + e.what());
  }
}

inline void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot create file");
  out << doc.dump(2) << '\n';
}

inline nlohmann::json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open file");
  try {
    nlohmann::json doc;
    in >> doc;
    return doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError(path, std::string("invalid JSON: ") + e.what());
  }
}

inline std::filesystem::path fold_dir(const std::filesystem::path& run, std::size_t fold) {
  return run / ("fold" + std::to_string(fold));
}

// ---------------------------------------------------------------------------
// Worker pool

/// Runs fn(0) .. fn(count - 1) on up to `jobs` threads. The first exception
/// thrown by any task is rethrown after all workers stop.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t jobs, Fn&& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const auto i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        failed = true;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

// ---------------------------------------------------------------------------
// CSV writers

inline void write_log_csv(const std::filesystem::path& path, const TrainRunLog& log) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot create log");
  out << "epoch,train_loss,val_loss\n";
  char buffer[96];
  for (std::size_t e = 0; e < log.val_loss.size(); ++e) {
    std::snprintf(buffer, sizeof buffer, "%zu,%.17g,%.17g\n", e, log.train_loss[e], log.val_loss[e]);
    out << buffer;
  }
}

inline void write_predictions_csv(const std::filesystem::path& path, std::span<const SeizurePrediction> preds) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot create predictions file");
  out << "seizure_id,fold,p_large,p_small,p_mean,decision,label\n";
  char buffer[128];
  for (const auto& p : preds) {
    std::snprintf(buffer, sizeof buffer, ",%zu,%.17g,%.17g,%.17g,%d,%d\n", p.fold, p.p_large, p.p_small, p.p_mean,
                  p.decision, p.label);
    out << p.seizure_id << buffer;
  }
}

inline std::vector<SeizurePrediction> read_predictions_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open predictions file");
  std::string line;
  std::getline(in, line);
  std::vector<SeizurePrediction> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 7) throw IoError(path, "expected 7 columns");
    SeizurePrediction p;
    p.seizure_id = cells[0];
    p.fold = static_cast<std::size_t>(detail::parse_double(cells[1], path));
    p.p_large = detail::parse_double(cells[2], path);
    p.p_small = detail::parse_double(cells[3], path);
    p.p_mean = detail::parse_double(cells[4], path);
    p.decision = static_cast<int>(detail::parse_double(cells[5], path));
    p.label = static_cast<int>(detail::parse_double(cells[6], path));
    out.push_back(std::move(p));
  }
  return out;
}

namespace detail {

inline std::string metric_cell(double value, bool defined) {
  if (!defined) return "";
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.10g", value);
  return buffer;
}

}  // namespace detail

struct FoldMetrics {
  std::string fold;  // fold index, or "pooled"
  stats::MetricSet metrics;
  stats::ConfusionCounts counts;
};

inline void write_metrics_csv(const std::filesystem::path& path, std::span<const FoldMetrics> rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot create metrics file");
  out << "fold,accuracy,f1,auc_pr,tp,tn,fp,fn\n";
  for (const auto& r : rows) {
    out << r.fold << ',' << detail::metric_cell(r.metrics.accuracy, true) << ','
        << detail::metric_cell(r.metrics.f1, r.metrics.f1_defined) << ','
        << detail::metric_cell(r.metrics.auc_pr, r.metrics.auc_defined) << ',' << r.counts.tp << ',' << r.counts.tn
        << ',' << r.counts.fp << ',' << r.counts.fn << '\n';
  }
}

/// Per-fold rows followed by a pooled row.
inline std::vector<FoldMetrics> seizure_metrics(std::span<const SeizurePrediction> preds, std::size_t fold_count) {
  std::vector<FoldMetrics> rows;
  for (std::size_t f = 0; f < fold_count; ++f) {
    std::vector<SeizurePrediction> in_fold;
    for (const auto& p : preds) {
      if (p.fold == f) in_fold.push_back(p);
    }
    if (in_fold.empty()) continue;
    rows.push_back({std::to_string(f), prediction_metrics(in_fold), prediction_confusion(in_fold)});
  }
  rows.push_back({"pooled", prediction_metrics(preds), prediction_confusion(preds)});
  return rows;
}

// ---------------------------------------------------------------------------
// Seizure experiment

struct SeizureFoldOutcome {
  std::size_t fold = 0;
  TrainRunLog log;
  SeizureModel model;
  nn::AdamWState optimizer;
  std::vector<SeizurePrediction> predictions;
};

/// Trains and evaluates every fold; folds run on up to `jobs` threads.
inline std::vector<SeizureFoldOutcome> run_seizure_folds(const Dataset& ds, const FoldAssignment& folds,
                                                         const ExperimentConfig& cfg, std::size_t jobs) {
  std::vector<SeizureFoldOutcome> out(folds.fold_count);
  parallel_for(folds.fold_count, jobs, [&](std::size_t f) {
    auto result = train_seizure_model(ds, folds, f, cfg);
    out[f].fold = f;
    out[f].predictions = predict_fold(result.best, ds, folds, f, cfg.n_segments);
    out[f].log = std::move(result.log);
    out[f].model = std::move(result.best);
    out[f].optimizer = std::move(result.optimizer);
  });
  return out;
}

inline std::vector<SeizurePrediction> pooled_predictions(std::span<const SeizureFoldOutcome> outcomes) {
  std::vector<SeizurePrediction> all;
  for (const auto& o : outcomes) all.insert(all.end(), o.predictions.begin(), o.predictions.end());
  return all;
}

inline nn::ModelBundle seizure_checkpoint(SeizureFoldOutcome& outcome, const ExperimentConfig& cfg) {
  auto bundle = outcome.model.to_bundle();
  bundle.config["fold"] = outcome.fold;
  bundle.config["epoch"] = outcome.log.chosen_epoch;
  bundle.config["w_pos"] = outcome.log.w_pos;
  bundle.config["experiment"] = config_to_json(cfg, RunKind::seizure);
  bundle.add_optimizer_state(outcome.optimizer, outcome.model.tensors());
  return bundle;
}

/// Creates `dir`, refusing to reuse an existing one unless `force`.
inline void prepare_output_dir(const std::filesystem::path& dir, bool force) {
  if (std::filesystem::exists(dir)) {
    if (!force) throw UsageError("output directory " + dir.string() + " exists; pass --force to overwrite");
    std::filesystem::remove_all(dir);
  }
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError(dir, "cannot create directory: " + ec.message());
}

inline void write_run_header(const std::filesystem::path& dir, const ExperimentConfig& cfg, RunKind kind,
                             const FoldAssignment& folds) {
  write_json(dir / "config.json", config_to_json(cfg, kind));
  write_folds(dir / "folds.json", folds);
}

/// Writes config, folds, logs and checkpoints of a trained seizure run.
inline void write_seizure_run(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                              const FoldAssignment& folds, std::span<SeizureFoldOutcome> outcomes) {
  write_run_header(dir, cfg, RunKind::seizure, folds);
  for (auto& o : outcomes) {
    const auto fd = fold_dir(dir, o.fold);
    std::filesystem::create_directories(fd);
    write_log_csv(fd / "log.csv", o.log);
    nn::write_checkpoint(fd / "best.ckpt", seizure_checkpoint(o, cfg));
  }
}

/// Loads each fold's best.ckpt and scores the held-out seizures.
inline std::vector<SeizurePrediction> evaluate_seizure_run(const std::filesystem::path& dir, const Dataset& ds,
                                                           const FoldAssignment& folds, const ExperimentConfig& cfg) {
  std::vector<SeizurePrediction> all;
  for (std::size_t f = 0; f < folds.fold_count; ++f) {
    const auto path = fold_dir(dir, f) / "best.ckpt";
    if (!std::filesystem::exists(path)) throw IoError(path, "missing checkpoint");
    const auto model = SeizureModel::from_bundle(nn::read_checkpoint(path));
    if (model.dim() != ds.dim) throw DataError("checkpoint feature dim does not match the dataset");
    const auto preds = predict_fold(model, ds, folds, f, cfg.n_segments);
    all.insert(all.end(), preds.begin(), preds.end());
  }
  return all;
}

// ---------------------------------------------------------------------------
// Snippet experiment

struct SnippetFoldOutcome {
  std::size_t fold = 0;
  TrainRunLog log;
  SnippetModel model;
  nn::AdamWState optimizer;
};

inline std::vector<SnippetFoldOutcome> run_snippet_folds(const Dataset& ds, const FoldAssignment& folds,
                                                         const ExperimentConfig& cfg, std::size_t jobs) {
  std::vector<SnippetFoldOutcome> out(folds.fold_count);
  parallel_for(folds.fold_count, jobs, [&](std::size_t f) {
    auto result = train_snippet_classifier(ds, folds, f, cfg);
    out[f] = {f, std::move(result.log), std::move(result.best), std::move(result.optimizer)};
  });
  return out;
}

/// Position-level metrics of a snippet model on the streams of one fold.
inline std::pair<stats::MetricSet, stats::ConfusionCounts> snippet_fold_metrics(const SnippetModel& model,
                                                                                const Dataset& ds,
                                                                                const FoldAssignment& folds,
                                                                                std::size_t fold) {
  std::vector<double> scores;
  std::vector<int> labels;
  for (const auto& s : validation_streams(ds, folds, fold)) {
    const auto p = infer_snippets_sliding(model, ds.stream(s));
    const auto& ann = ds.record(s.record).annotations;
    for (std::size_t k = 0; k < p.size(); ++k) {
      scores.push_back(p[k]);
      labels.push_back(position_label(ann, ds.manifest.step_seconds, k));
    }
  }
  std::vector<int> decisions(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) decisions[i] = scores[i] >= 0.5 ? 1 : 0;
  return {stats::compute_metrics(scores, labels), stats::confusion(decisions, labels)};
}

inline void write_snippet_run(const std::filesystem::path& dir, const ExperimentConfig& cfg,
                              const FoldAssignment& folds, std::span<SnippetFoldOutcome> outcomes) {
  write_run_header(dir, cfg, RunKind::snippet, folds);
  for (auto& o : outcomes) {
    const auto fd = fold_dir(dir, o.fold);
    std::filesystem::create_directories(fd);
    write_log_csv(fd / "log.csv", o.log);
    auto bundle = to_bundle(o.model);
    bundle.config["fold"] = o.fold;
    bundle.config["epoch"] = o.log.chosen_epoch;
    bundle.config["w_pos"] = o.log.w_pos;
    bundle.config["experiment"] = config_to_json(cfg, RunKind::snippet);
    bundle.add_optimizer_state(o.optimizer, o.model.tensors());
    nn::write_checkpoint(fd / "best.ckpt", bundle);
  }
}

inline std::vector<FoldMetrics> evaluate_snippet_run(const std::filesystem::path& dir, const Dataset& ds,
                                                     const FoldAssignment& folds) {
  std::vector<FoldMetrics> rows;
  stats::ConfusionCounts pooled;
  for (std::size_t f = 0; f < folds.fold_count; ++f) {
    const auto path = fold_dir(dir, f) / "best.ckpt";
    if (!std::filesystem::exists(path)) throw IoError(path, "missing checkpoint");
    const auto model = snippet_model_from_bundle(nn::read_checkpoint(path));
    if (model.dim() != ds.dim) throw DataError("checkpoint feature dim does not match the dataset");
    auto [metrics, counts] = snippet_fold_metrics(model, ds, folds, f);
    pooled += counts;
    rows.push_back({std::to_string(f), metrics, counts});
  }
  stats::MetricSet summary;
  summary.accuracy = stats::accuracy(pooled);
  const auto f1 = stats::f1(pooled);
  summary.f1_defined = f1.has_value();
  summary.f1 = f1.value_or(std::nan(""));
  summary.auc_defined = false;  // scores are not comparable across fold models
  rows.push_back({"pooled", summary, pooled});
  return rows;
}

// ---------------------------------------------------------------------------
// Grid

inline constexpr std::size_t kGridSegments[] = {2, 4, 8, 16};
inline constexpr double kGridGammas[] = {1.0, 1.25, 2.0, 4.0, kInfinity};
inline constexpr Aggregator kGridAggregators[] = {Aggregator::mean, Aggregator::lstm, Aggregator::blstm};

inline std::string model_name(const ExperimentConfig& cfg) {
  return std::string(to_string(cfg.aggregator)) + "_n" + std::to_string(cfg.n_segments) + "_g" +
         gamma_to_string(cfg.gamma);
}

/// The 4 x 5 x 3 grid over segment count, Beta parameter and aggregator.
inline std::vector<ExperimentConfig> grid_configs(const ExperimentConfig& base) {
  std::vector<ExperimentConfig> out;
  for (auto n : kGridSegments) {
    for (auto g : kGridGammas) {
      for (auto agg : kGridAggregators) {
        auto cfg = base;
        cfg.n_segments = n;
        cfg.gamma = g;
        cfg.aggregator = agg;
        out.push_back(cfg);
      }
    }
  }
  return out;
}

struct GridFoldRow {
  std::string model;
  std::size_t n_segments = 0;
  double gamma = 0.0;
  Aggregator aggregator = Aggregator::mean;
  std::size_t fold = 0;
  stats::MetricSet metrics;
};

struct GridRow {
  std::string model;
  std::size_t n_segments = 0;
  double gamma = 0.0;
  Aggregator aggregator = Aggregator::mean;
  std::vector<GridFoldRow> folds;
  stats::MetricSet pooled;
};

/// Trains every (configuration, fold) pair on up to `jobs` threads.
inline std::vector<GridRow> run_grid(const Dataset& ds, const FoldAssignment& folds,
                                     const std::vector<ExperimentConfig>& configs, std::size_t jobs) {
  const std::size_t k = folds.fold_count;
  std::vector<std::vector<SeizurePrediction>> preds(configs.size() * k);
  parallel_for(configs.size() * k, jobs, [&](std::size_t job) {
    const auto& cfg = configs[job / k];
    const auto fold = job % k;
    const auto result = train_seizure_model(ds, folds, fold, cfg);
    preds[job] = predict_fold(result.best, ds, folds, fold, cfg.n_segments);
  });

  std::vector<GridRow> rows;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const auto& cfg = configs[c];
    GridRow row{model_name(cfg), cfg.n_segments, cfg.gamma, cfg.aggregator, {}, {}};
    std::vector<SeizurePrediction> all;
    for (std::size_t f = 0; f < k; ++f) {
      const auto& p = preds[c * k + f];
      row.folds.push_back({row.model, cfg.n_segments, cfg.gamma, cfg.aggregator, f, prediction_metrics(p)});
      all.insert(all.end(), p.begin(), p.end());
    }
    row.pooled = prediction_metrics(all);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace detail {

inline std::pair<double, double> median_iqr(const std::vector<GridFoldRow>& folds, double stats::MetricSet::*field,
                                            bool stats::MetricSet::*defined) {
  std::vector<double> values;
  for (const auto& f : folds) {
    if (f.metrics.*defined) values.push_back(f.metrics.*field);
  }
  if (values.empty()) return {std::nan(""), std::nan("")};
  return {stats::median(values), stats::interquartile_range(values)};
}

inline std::string number_cell(double v) { return metric_cell(v, std::isfinite(v)); }

}  // namespace detail

inline void write_aggregation_csv(const std::filesystem::path& path, const std::vector<GridRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot create aggregation file");
  out << "model,n,gamma,aggregator,accuracy_median,accuracy_iqr,f1_median,f1_iqr,auc_pr_median,auc_pr_iqr,"
         "pooled_accuracy,pooled_f1,pooled_auc_pr\n";
  for (const auto& r : rows) {
    std::vector<double> acc;
    for (const auto& f : r.folds) acc.push_back(f.metrics.accuracy);
    const auto [f1_med, f1_iqr] = detail::median_iqr(r.folds, &stats::MetricSet::f1, &stats::MetricSet::f1_defined);
    const auto [auc_med, auc_iqr] =
        detail::median_iqr(r.folds, &stats::MetricSet::auc_pr, &stats::MetricSet::auc_defined);
    out << r.model << ',' << r.n_segments << ',' << gamma_to_string(r.gamma) << ',' << to_string(r.aggregator) << ','
        << detail::number_cell(stats::median(acc)) << ',' << detail::number_cell(stats::interquartile_range(acc))
        << ',' << detail::number_cell(f1_med) << ',' << detail::number_cell(f1_iqr) << ','
        << detail::number_cell(auc_med) << ',' << detail::number_cell(auc_iqr) << ','
        << detail::number_cell(r.pooled.accuracy) << ',' << detail::metric_cell(r.pooled.f1, r.pooled.f1_defined)
        << ',' << detail::metric_cell(r.pooled.auc_pr, r.pooled.auc_defined) << '\n';
  }
}

inline void write_aggregation_folds_csv(const std::filesystem::path& path, const std::vector<GridRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError(path, "cannot create per-fold aggregation file");
  out << "model,n,gamma,aggregator,fold,accuracy,f1,auc_pr\n";
  for (const auto& r : rows) {
    for (const auto& f : r.folds) {
      out << f.model << ',' << f.n_segments << ',' << gamma_to_string(f.gamma) << ',' << to_string(f.aggregator)
          << ',' << f.fold << ',' << detail::metric_cell(f.metrics.accuracy, true) << ','
          << detail::metric_cell(f.metrics.f1, f.metrics.f1_defined) << ','
          << detail::metric_cell(f.metrics.auc_pr, f.metrics.auc_defined) << '\n';
    }
  }
}

inline std::vector<GridFoldRow> read_aggregation_folds_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path, "cannot open per-fold aggregation file");
  std::string line;
  std::getline(in, line);
  std::vector<GridFoldRow> out;
  auto optional_cell = [&](const std::string& cell, double& value, bool& defined) {
    defined = !cell.empty();
    value = defined ? detail::parse_double(cell, path) : std::nan("");
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv(line);
    if (cells.size() != 8) throw IoError(path, "expected 8 columns");
    GridFoldRow row;
    row.model = cells[0];
    row.n_segments = static_cast<std::size_t>(detail::parse_double(cells[1], path));
    const auto g = parse_gamma(cells[2]);
    const auto agg = parse_aggregator(cells[3]);
    if (!g || !agg) throw IoError(path, "bad gamma or aggregator in row for " + cells[0]);
    row.gamma = *g;
    row.aggregator = *agg;
    row.fold = static_cast<std::size_t>(detail::parse_double(cells[4], path));
    row.metrics.accuracy = detail::parse_double(cells[5], path);
    optional_cell(cells[6], row.metrics.f1, row.metrics.f1_defined);
    optional_cell(cells[7], row.metrics.auc_pr, row.metrics.auc_defined);
    out.push_back(std::move(row));
  }
  return out;
}

}  // namespace gestures
