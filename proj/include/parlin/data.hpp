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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parlin/core.hpp"

namespace parlin {

inline constexpr std::string_view kTargetColumn = "delay_minutes";
inline constexpr std::uint64_t kFlightRecordCount = 2702218;
inline constexpr double kDefaultNoiseSigma = 13.149;

/// Column layout of a dataset file: feature columns then the target.
struct CsvSchema {
  std::vector<std::string> feature_columns;
  std::string target_column{kTargetColumn};

  /// The built-in flight-delay schema; counts above eight continue as
  /// feature_9, feature_10, ...
  static CsvSchema synthetic(std::size_t n_features = 8);

  std::size_t feature_dim() const { return feature_columns.size(); }
  std::vector<std::string> columns() const;
  std::string header_line() const;  // without trailing newline

  bool operator==(const CsvSchema&) const = default;
};

struct DatasetSpec {
  std::uint64_t n_records = kFlightRecordCount;
  std::size_t n_features = 8;
  double true_intercept = 15.0;
  /// Empty means the schema defaults (see default_weights).
  std::vector<double> true_weights;
  double noise_sigma = kDefaultNoiseSigma;
  std::uint64_t seed = 42;

  static std::vector<double> default_weights(std::size_t n_features);

  /// Weights actually used by the generator.
  std::vector<double> resolved_weights() const;
  void validate() const;
};

struct GenerateSummary {
  std::uint64_t rows = 0;
  std::string path;
  std::uint32_t checksum = 0;  // CRC-32 of the file bytes
  std::uint64_t seed = 0;

  std::string to_json() const;
};

GenerateSummary generate_synthetic(const DatasetSpec& spec,
                                   const std::filesystem::path& output_path);

/// CRC-32 (zlib polynomial) of a whole file.
std::uint32_t file_crc32(const std::filesystem::path& path);

/// A contiguous half-open row range [row_start, row_end).
struct PartitionSpec {
  std::uint32_t partition_id = 0;
  std::uint64_t row_start = 0;
  std::uint64_t row_end = 0;

  std::uint64_t size() const { return row_end - row_start; }
  bool operator==(const PartitionSpec&) const = default;
};

/// k balanced contiguous ranges over [0, n_rows); earlier ranges take the
/// remainder rows.
std::vector<PartitionSpec> make_partitions(std::uint64_t n_rows,
                                           std::uint32_t k);

struct ColumnStats {
  std::vector<double> mean;
  std::vector<double> stddev;  // population
};

/// Read-only view of a dataset CSV. The header is validated on open; rows are
/// parsed on demand by scanning, so memory stays proportional to the rows
/// actually requested.
class CsvFile {
 public:
  CsvFile(const std::filesystem::path& path, CsvSchema schema);
  ~CsvFile();
  CsvFile(CsvFile&&) noexcept;
  CsvFile& operator=(CsvFile&&) noexcept;

  const CsvSchema& schema() const { return schema_; }
  const std::filesystem::path& path() const { return path_; }
  std::uint64_t row_count() const;

  SampleBlock read_range(std::uint64_t row_start, std::uint64_t row_end) const;
  /// `rows` must be strictly increasing; samples come back in that order.
  SampleBlock read_rows(std::span<const std::uint64_t> rows) const;

 private:
  struct Mapping;
  std::filesystem::path path_;
  CsvSchema schema_;
  std::unique_ptr<Mapping> map_;
  std::size_t body_offset_ = 0;
};

SampleBlock load_partition(const std::filesystem::path& path,
                           const CsvSchema& schema, const PartitionSpec& part);

/// Mean and population stddev over the given rows (any order). A constant
/// column is kIo naming the column.
ColumnStats column_stats(const std::filesystem::path& path,
                         const CsvSchema& schema,
                         std::span<const std::uint64_t> train_indices);

/// The same statistics read off a train-set Gram partial: mean_j = a[0][j]/n,
/// var_j = a[j][j]/n - mean_j^2.
ColumnStats column_stats_from_gram(const GramPartial& g,
                                   const CsvSchema& schema);

/// Counts data rows after validating the header.
std::uint64_t count_rows(const std::filesystem::path& path,
                         const CsvSchema& schema);

/// Shortest decimal text that parses back to exactly `value`.
std::string format_real(double value);

}  // namespace parlin
