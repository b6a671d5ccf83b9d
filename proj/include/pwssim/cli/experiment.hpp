// SPDX-FileCopyrightText: Copyright (c) 2026 The pwssim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Experiment runner: configuration, single runs, sweeps and their output
// files (report.json, counters.csv, plot_<metric>.svg, trace CSVs).

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "pwssim/metrics/metrics.hpp"

namespace pwssim::cli {

struct ExperimentConfig {
  metrics::RunParams run;
  bool seed_set = false;
  bool trace = false;
  std::string out_dir = ".";
  /// axis name -> values, in the order given
  std::vector<std::pair<std::string, std::vector<std::string>>> sweep;
  std::uint64_t sweep_cap = 256;

  ExperimentConfig();
};

/// Sets one option by its flag name without dashes ("alg", "n", "miss-cost",
/// ...). Underscores are accepted for dashes. Throws ConfigError.
void set_option(ExperimentConfig& c, const std::string& key, const std::string& value);
/// "axis=v1,v2,..."
void add_sweep_axis(ExperimentConfig& c, const std::string& spec);
/// Flat "key = value" lines; '#' starts a comment. `sweep` lines add axes.
void load_config_file(ExperimentConfig& c, const std::string& path);
void validate(const ExperimentConfig& c);

struct RunOutput {
  metrics::RunSummary summary;
  metrics::ExcessReport excess;
  metrics::IdleBreakdown idle;
  std::uint32_t write_budget = 0;
  bool tall_cache_ok = true;
  bool invariants_ok = false;
  std::vector<std::string> failures;
  std::vector<mem::CoreCounters> per_core;
  // trace only
  std::vector<sched::StealRecord> steals;
  std::vector<sched::TaskRecord> tasks;
  std::vector<sched::TaskEventRecord> events;
  std::vector<mem::TransferEvent> transfers;
  std::vector<metrics::SizeClassFL> fl;
  std::uint64_t max_stack_delay = 0;
};

/// Runs the configuration plus a p = 1 sequential baseline of the same input.
RunOutput run_experiment(const ExperimentConfig& c);

nlohmann::json report_json(const RunOutput& r);
std::vector<std::string> csv_columns();
std::vector<std::string> csv_row(const RunOutput& r);

/// Writes report.json, counters.csv, plot_<metric>.svg and, with trace,
/// events.csv, steals.csv and tasks.csv.
void write_outputs(const RunOutput& r, const std::string& dir);

struct SweepOutput {
  std::vector<RunOutput> runs;  // sorted by configuration key
  std::string axis;             // first axis, used for plots
  bool invariants_ok = true;
  /// soft checks only; never affect the exit status
  std::vector<std::string> warnings;
};

/// Throws ConfigError for an empty axis list or a product above the cap.
SweepOutput run_sweep(const ExperimentConfig& c);
void write_sweep_outputs(const SweepOutput& s, const std::string& dir);

/// Minimal SVG line chart.
std::string svg_line_plot(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                          const std::vector<std::pair<std::string, std::vector<std::pair<double, double>>>>& series);

}  // namespace pwssim::cli
