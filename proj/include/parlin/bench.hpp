// Copyright 2026 The Parlin Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "parlin/cluster.hpp"

namespace parlin {

struct Environment {
  std::string label;
  std::uint32_t worker_count = 0;  // 0 = standalone
};

/// Standalone followed by Cluster_1 .. Cluster_4.
std::vector<Environment> default_environments();

struct ExperimentPlan {
  std::vector<Environment> environments = default_environments();
  std::uint32_t repetitions = 5;
  /// Template job; expected_workers and the label are set per environment.
  JobSpec job;
  /// Binary started as `<exe> worker --master 127.0.0.1:<port> --rank <i>`.
  std::filesystem::path worker_executable;
  std::string worker_log_level = "warn";
  std::chrono::milliseconds admission_timeout = kDefaultAdmissionTimeout;

  void validate() const;
};

struct TimingRecord {
  std::string environment_label;
  std::uint32_t run_index = 1;
  double wall_seconds = 0.0;

  bool operator==(const TimingRecord&) const = default;
};

struct PlanRun {
  TimingRecord timing;
  JobResult result;
};

using RunObserver = std::function<void(const PlanRun&)>;

/// Runs every environment `repetitions` times, in blocks, in plan order.
/// Worker processes are spawned per run and reaped before the next run. The
/// first failure aborts the plan with the environment and run in the message.
std::vector<PlanRun> run_plan(const ExperimentPlan& plan, const RunObserver& observer = {});

struct SummaryRow {
  std::string environment;
  std::vector<double> runs;  // by run_index
  double average = 0.0;

  bool operator==(const SummaryRow&) const = default;
};

struct SummaryTable {
  std::vector<SummaryRow> rows;  // first-appearance order

  const SummaryRow* find(std::string_view environment) const;
  bool operator==(const SummaryTable&) const = default;
};

SummaryTable summarize(std::span<const TimingRecord> records);

/// 100 * (baseline - candidate) / baseline; negative for a slowdown.
double percent_reduction(double baseline_avg, double candidate_avg);

double round_half_up(double value, int decimals);

/// Two-decimal display form, e.g. "39.76".
std::string format_percent(double percent);

struct ReportPaths {
  std::filesystem::path summary_csv;
  std::filesystem::path scaling_svg;
  std::filesystem::path report_json;
};

/// Writes summary.csv, scaling.svg and report.json into `output_dir`. The
/// first row of the table is the baseline.
ReportPaths emit_report(const SummaryTable& table, const std::filesystem::path& output_dir);

/// Reads a summary.csv back into timing records (the average column is
/// recomputed, not trusted).
std::vector<TimingRecord> parse_summary_csv(const std::filesystem::path& path);

void write_records(std::span<const PlanRun> runs, const std::filesystem::path& path);
std::vector<PlanRun> read_records(const std::filesystem::path& path);

std::vector<TimingRecord> timings_of(std::span<const PlanRun> runs);

}  // namespace parlin
