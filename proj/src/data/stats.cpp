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
#include <string>

#include "parlin/data.hpp"
#include "parlin/error.hpp"

namespace parlin {

namespace {

void reject_constant(const ColumnStats& stats, const CsvSchema& schema) {
  for (std::size_t j = 0; j < stats.stddev.size(); ++j) {
    if (!(stats.stddev[j] > 0.0)) {
      throw Error(ErrorCode::kIo, "column '" + schema.feature_columns[j] +
                                      "' is constant over the training rows");
    }
  }
}

}  // namespace

ColumnStats column_stats(const std::filesystem::path& path,
                         const CsvSchema& schema,
                         std::span<const std::uint64_t> train_indices) {
  if (train_indices.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "column_stats needs at least one training row");
  }
  std::vector<std::uint64_t> rows(train_indices.begin(), train_indices.end());
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  const SampleBlock block = CsvFile(path, schema).read_rows(rows);

  const std::size_t d = schema.feature_dim();
  const auto n = static_cast<double>(block.size());
  ColumnStats stats{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < block.size(); ++r) {
    auto x = block.features(r);
    for (std::size_t j = 0; j < d; ++j) stats.mean[j] += x[j];
  }
  for (double& m : stats.mean) m /= n;
  for (std::size_t r = 0; r < block.size(); ++r) {
    auto x = block.features(r);
    for (std::size_t j = 0; j < d; ++j) {
      const double dev = x[j] - stats.mean[j];
      stats.stddev[j] += dev * dev;
    }
  }
  for (double& s : stats.stddev) s = std::sqrt(s / n);
  reject_constant(stats, schema);
  return stats;
}

ColumnStats column_stats_from_gram(const GramPartial& g,
                                   const CsvSchema& schema) {
  if (g.n == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "column statistics need at least one training row");
  }
  if (g.feature_dim() != schema.feature_dim()) {
    throw Error(ErrorCode::kInvalidArgument,
                "Gram partial dimension does not match the schema");
  }
  const std::size_t d = g.feature_dim();
  const auto n = static_cast<double>(g.n);
  ColumnStats stats{std::vector<double>(d), std::vector<double>(d)};
  for (std::size_t j = 0; j < d; ++j) {
    const double mean = g.at(0, j + 1) / n;
    const double var = g.at(j + 1, j + 1) / n - mean * mean;
    stats.mean[j] = mean;
    // Cancellation can leave a tiny positive variance for a constant column.
    const double floor = 1e-12 * std::max(1.0, mean * mean);
    stats.stddev[j] = var > floor ? std::sqrt(var) : 0.0;
  }
  reject_constant(stats, schema);
  return stats;
}

}  // namespace parlin
