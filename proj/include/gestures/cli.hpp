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

// The `gestures` command line.
//
//   synth          write a synthetic dataset
//   folds          write a stratified fold assignment
//   train-snippet  cross-validated snippet classifier -> run dir
//   train-seizure  cross-validated seizure classifier -> run dir
//   eval           score a run dir -> predictions.csv, metrics.csv
//   grid           n x gamma x aggregator sweep -> aggregation.csv
//   compare        pairwise one-tailed U tests over a grid's folds
//
// Exit codes: 0 ok, 2 usage, 3 data or I/O, 4 numeric failure.

#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "gestures/core.hpp"
#include "gestures/error.hpp"
#include "gestures/io.hpp"
#include "gestures/pipeline/experiment.hpp"
#include "gestures/pipeline/folds.hpp"
#include "gestures/stats/compare.hpp"
#include "gestures/synthgen.hpp"

namespace gestures::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

namespace detail {

struct Options {
  std::string data;
  std::string out;
  std::string fold_file;
  std::size_t n = 16;
  std::string gamma = "2";
  std::string agg = "blstm";
  std::vector<std::string> agg_filter;
  std::size_t folds = 10;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  std::size_t epochs = 0;  // 0 = command default
  double lr = 0.0;
  std::size_t batch = 0;
  bool force = false;
  std::string metric = "accuracy";
  SynthConfig synth;
};

inline ExperimentConfig experiment_config(const Options& o, CLI::App* cmd, bool snippet) {
  ExperimentConfig cfg = snippet ? ExperimentConfig::snippet_defaults() : ExperimentConfig{};
  cfg.n_segments = o.n;
  const auto g = parse_gamma(o.gamma);
  if (!g) throw UsageError("--gamma must be a number >= 1 or 'inf', got '" + o.gamma + "'");
  cfg.gamma = *g;
  const auto agg = parse_aggregator(o.agg);
  if (!agg) throw UsageError("--agg must be mean, lstm or blstm, got '" + o.agg + "'");
  cfg.aggregator = *agg;
  cfg.fold_count = o.folds;
  cfg.seed = o.seed;
  if (cmd->count("--epochs")) cfg.epochs = o.epochs;
  if (cmd->count("--lr")) cfg.lr = o.lr;
  if (cmd->count("--batch")) cfg.batch = o.batch;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

inline FoldAssignment fold_assignment(const Options& o, const Dataset& ds) {
  if (!o.fold_file.empty()) {
    auto folds = read_folds(o.fold_file);
    for (const auto& r : ds.manifest.records) {
      if (!folds.fold_of.count(r.seizure_id)) throw DataError("fold file has no entry for " + r.seizure_id);
    }
    return folds;
  }
  return make_folds(ds.manifest, o.folds, o.seed);
}

inline void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

inline void cmd_synth(const Options& o, std::ostream& out) {
  require(o.out, "--out");
  auto cfg = o.synth;
  cfg.seed = o.seed;
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  prepare_output_dir(o.out, o.force);
  const auto manifest = generate(cfg, o.out);
  out << "wrote " << manifest.records.size() << " seizures to " << o.out << '\n';
}

inline void cmd_folds(const Options& o, std::ostream& out) {
  require(o.data, "--data");
  const std::filesystem::path target = o.out.empty() ? std::filesystem::path(o.data) / "folds.json" : std::filesystem::path(o.out);
  const auto manifest = read_manifest(std::filesystem::path(o.data) / "manifest.json");
  const auto folds = make_folds(manifest, o.folds, o.seed);
  if (std::filesystem::exists(target) && !o.force) {
    throw UsageError(target.string() + " exists; pass --force to overwrite");
  }
  write_folds(target, folds);
  out << "wrote " << target.string() << '\n';
}

inline void cmd_train(const Options& o, CLI::App* cmd, bool snippet, std::ostream& out) {
  require(o.data, "--data");
  require(o.out, "--out");
  const auto cfg = experiment_config(o, cmd, snippet);
  if (std::filesystem::exists(o.out) && !o.force) {
    throw UsageError("output directory " + o.out + " exists; pass --force to overwrite");
  }
  const auto ds = load_dataset(o.data);
  const auto folds = fold_assignment(o, ds);
  prepare_output_dir(o.out, o.force);
  if (snippet) {
    auto outcomes = run_snippet_folds(ds, folds, cfg, o.jobs);
    write_snippet_run(o.out, cfg, folds, outcomes);
  } else {
    auto outcomes = run_seizure_folds(ds, folds, cfg, o.jobs);
    write_seizure_run(o.out, cfg, folds, outcomes);
  }
  out << "trained " << folds.fold_count << " folds into " << o.out << '\n';
}

inline void cmd_eval(const Options& o, std::ostream& out) {
  require(o.data, "--data");
  require(o.out, "--run");
  const std::filesystem::path run = o.out;
  if (!std::filesystem::is_directory(run)) throw IoError(run, "not a run directory");
  const auto cfg_json = read_json(run / "config.json");
  const auto cfg = config_from_json(cfg_json);
  const auto folds = read_folds(run / "folds.json");
  const auto ds = load_dataset(o.data);
  std::vector<FoldMetrics> rows;
  if (run_kind_from_json(cfg_json) == RunKind::snippet) {
    rows = evaluate_snippet_run(run, ds, folds);
  } else {
    const auto preds = evaluate_seizure_run(run, ds, folds, cfg);
    write_predictions_csv(run / "predictions.csv", preds);
    rows = seizure_metrics(preds, folds.fold_count);
  }
  write_metrics_csv(run / "metrics.csv", rows);
  const auto& pooled = rows.back();
  out << "accuracy " << pooled.metrics.accuracy << " tp " << pooled.counts.tp << " tn " << pooled.counts.tn << " fp "
      << pooled.counts.fp << " fn " << pooled.counts.fn << '\n';
}

inline void cmd_grid(const Options& o, CLI::App* cmd, std::ostream& out) {
  require(o.data, "--data");
  require(o.out, "--out");
  const auto base = experiment_config(o, cmd, false);
  if (std::filesystem::exists(o.out) && !o.force) {
    throw UsageError("output directory " + o.out + " exists; pass --force to overwrite");
  }
  const auto ds = load_dataset(o.data);
  const auto folds = fold_assignment(o, ds);
  prepare_output_dir(o.out, o.force);
  auto header = config_to_json(base, RunKind::seizure);
  header.erase("n_segments");
  header.erase("gamma");
  header.erase("aggregator");
  header["grid"] = {{"n", kGridSegments}, {"gamma", {"1", "1.25", "2", "4", "inf"}}, {"aggregator", {"mean", "lstm", "blstm"}}};
  write_json(std::filesystem::path(o.out) / "config.json", header);
  write_folds(std::filesystem::path(o.out) / "folds.json", folds);
  const auto rows = run_grid(ds, folds, grid_configs(base), o.jobs);
  write_aggregation_csv(std::filesystem::path(o.out) / "aggregation.csv", rows);
  write_aggregation_folds_csv(std::filesystem::path(o.out) / "aggregation_folds.csv", rows);
  out << "wrote " << rows.size() << " configurations to " << o.out << '\n';
}

inline void cmd_compare(const Options& o, CLI::App* cmd, std::ostream& out) {
  require(o.out, "--run");
  const std::filesystem::path dir = o.out;
  double stats::MetricSet::*field = nullptr;
  bool stats::MetricSet::*defined = nullptr;
  if (o.metric == "accuracy") {
    field = &stats::MetricSet::accuracy;
  } else if (o.metric == "f1") {
    field = &stats::MetricSet::f1;
    defined = &stats::MetricSet::f1_defined;
  } else if (o.metric == "auc_pr") {
    field = &stats::MetricSet::auc_pr;
    defined = &stats::MetricSet::auc_defined;
  } else {
    throw UsageError("--metric must be accuracy, f1 or auc_pr");
  }
  std::optional<double> gamma;
  if (cmd->count("--gamma")) {
    gamma = parse_gamma(o.gamma);
    if (!gamma) throw UsageError("--gamma must be a number >= 1 or 'inf'");
  }
  std::vector<Aggregator> aggs;
  for (const auto& a : o.agg_filter) {
    const auto agg = parse_aggregator(a);
    if (!agg) throw UsageError("--agg must be mean, lstm or blstm, got '" + a + "'");
    aggs.push_back(*agg);
  }

  std::vector<stats::MetricColumn> columns;
  for (const auto& row : read_aggregation_folds_csv(dir / "aggregation_folds.csv")) {
    if (cmd->count("--n") && row.n_segments != o.n) continue;
    if (gamma && !(row.gamma == *gamma)) continue;
    if (!aggs.empty() && std::find(aggs.begin(), aggs.end(), row.aggregator) == aggs.end()) continue;
    if (defined && !(row.metrics.*defined)) {
      throw DataError(o.metric + " is undefined for " + row.model + " fold " + std::to_string(row.fold));
    }
    auto it = std::find_if(columns.begin(), columns.end(), [&](const auto& c) { return c.model == row.model; });
    if (it == columns.end()) {
      columns.push_back({row.model, {}});
      it = std::prev(columns.end());
    }
    it->per_fold.push_back(row.metrics.*field);
  }
  if (columns.size() < 2) throw UsageError("compare needs at least two models after filtering");
  const auto rows = stats::compare_grid(columns, o.metric);
  const auto csv_path = dir / ("comparison_" + o.metric + ".csv");
  std::ofstream csv(csv_path, std::ios::trunc);
  if (!csv) throw IoError(csv_path, "cannot create comparison file");
  stats::write_comparison_csv(csv, rows);
  stats::print_comparison_table(out, rows);
}

inline void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--data", o.data, "dataset directory (manifest.json + features)");
  cmd->add_option("--folds", o.folds, "number of folds")->check(CLI::Range(2, 1000));
  cmd->add_option("--seed", o.seed, "experiment seed");
  cmd->add_flag("--force", o.force, "overwrite an existing output");
}

inline void add_training(CLI::App* cmd, Options& o) {
  cmd->add_option("--out", o.out, "run directory to create");
  cmd->add_option("--fold-file", o.fold_file, "use this folds.json instead of computing folds");
  cmd->add_option("--jobs", o.jobs, "worker threads")->check(CLI::Range(1, 1024));
  cmd->add_option("--epochs", o.epochs, "training epochs")->check(CLI::PositiveNumber);
  cmd->add_option("--lr", o.lr, "initial learning rate")->check(CLI::PositiveNumber);
  cmd->add_option("--batch", o.batch, "mini-batch size")->check(CLI::PositiveNumber);
}

}  // namespace detail

/// Parses `args` (without the program name) and runs the chosen command.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  detail::Options o;
  CLI::App app{"Seizure classification from precomputed feature sequences", "gestures"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
  synth->add_option("--out", o.out, "dataset directory to create");
  synth->add_option("--seed", o.seed, "generator seed");
  synth->add_option("--n-fos", o.synth.n_fos, "number of focal seizures");
  synth->add_option("--n-tcs", o.synth.n_tcs, "number of tonic-clonic seizures");
  synth->add_option("--dim", o.synth.dim, "feature dimension")->check(CLI::PositiveNumber);
  synth->add_flag("--force", o.force, "overwrite an existing directory");

  auto* folds = app.add_subcommand("folds", "write a stratified fold assignment");
  detail::add_common(folds, o);
  folds->add_option("--out", o.out, "output file (default <data>/folds.json)");

  auto* snippet = app.add_subcommand("train-snippet", "train the snippet classifier per fold");
  detail::add_common(snippet, o);
  detail::add_training(snippet, o);

  auto* seizure = app.add_subcommand("train-seizure", "train the seizure classifier per fold");
  detail::add_common(seizure, o);
  detail::add_training(seizure, o);
  seizure->add_option("--n", o.n, "segments per sequence")->check(CLI::PositiveNumber);
  seizure->add_option("--gamma", o.gamma, "Beta parameter (>= 1 or inf)");
  seizure->add_option("--agg", o.agg, "aggregator: mean | lstm | blstm");

  auto* eval = app.add_subcommand("eval", "score a run directory");
  eval->add_option("--data", o.data, "dataset directory");
  eval->add_option("--run,--out", o.out, "run directory");

  auto* grid = app.add_subcommand("grid", "n x gamma x aggregator sweep");
  detail::add_common(grid, o);
  detail::add_training(grid, o);

  auto* compare = app.add_subcommand("compare", "pairwise significance tests over a grid");
  compare->add_option("--run,--out", o.out, "grid directory");
  compare->add_option("--metric", o.metric, "accuracy | f1 | auc_pr");
  compare->add_option("--n", o.n, "keep configurations with this segment count");
  compare->add_option("--gamma", o.gamma, "keep configurations with this Beta parameter");
  compare->add_option("--agg", o.agg_filter, "keep these aggregators")->delimiter(',');

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << e.what() << '\n';
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*synth) detail::cmd_synth(o, out);
    if (*folds) detail::cmd_folds(o, out);
    if (*snippet) detail::cmd_train(o, snippet, true, out);
    if (*seizure) detail::cmd_train(o, seizure, false, out);
    if (*eval) detail::cmd_eval(o, out);
    if (*grid) detail::cmd_grid(o, grid, out);
    if (*compare) detail::cmd_compare(o, compare, out);
    return kExitOk;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

inline int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args);
}

}  // namespace gestures::cli
