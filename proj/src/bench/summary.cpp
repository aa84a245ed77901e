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

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include <fmt/format.h>

#include "parlin/bench.hpp"
#include "parlin/error.hpp"

namespace parlin {

const SummaryRow* SummaryTable::find(std::string_view environment) const {
  for (const auto& row : rows) {
    if (row.environment == environment) return &row;
  }
  return nullptr;
}

SummaryTable summarize(std::span<const TimingRecord> records) {
  if (records.empty()) throw Error(ErrorCode::kInvalidArgument, "no timing records");

  std::vector<std::string> order;
  std::map<std::string, std::vector<const TimingRecord*>> by_env;
  for (const auto& r : records) {
    if (!(r.wall_seconds > 0.0) || !std::isfinite(r.wall_seconds)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "non-positive wall time in " + r.environment_label);
    }
    auto [it, inserted] = by_env.try_emplace(r.environment_label);
    if (inserted) order.push_back(r.environment_label);
    it->second.push_back(&r);
  }

  SummaryTable table;
  for (const auto& label : order) {
    auto& recs = by_env[label];
    std::stable_sort(recs.begin(), recs.end(), [](const auto* a, const auto* b) {
      return a->run_index < b->run_index;
    });
    SummaryRow row{label, {}, 0.0};
    // Compensated (Neumaier) sum, so 131.02 does not come out as
    // 131.01999999999998.
    double sum = 0.0, carry = 0.0;
    for (const auto* r : recs) {
      const double v = r->wall_seconds;
      row.runs.push_back(v);
      const double t = sum + v;
      carry += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
      sum = t;
    }
    row.average = (sum + carry) / static_cast<double>(recs.size());
    table.rows.push_back(std::move(row));
  }
  return table;
}

double percent_reduction(double baseline_avg, double candidate_avg) {
  if (!(baseline_avg > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "baseline average must be positive");
  }
  return 100.0 * (baseline_avg - candidate_avg) / baseline_avg;
}

double round_half_up(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  const double scaled = value * scale;
  // Nudge values like 0.125 whose binary form sits just under the tie.
  const double nudge = 1e-9 * std::max(1.0, std::abs(scaled));
  const double rounded = std::floor(scaled + 0.5 + nudge) / scale;
  return rounded == 0.0 ? 0.0 : rounded;
}

std::string format_percent(double percent) {
  return fmt::format("{:.2f}", round_half_up(percent, 2));
}

}  // namespace parlin
