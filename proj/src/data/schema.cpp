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

#include <charconv>
#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "parlin/data.hpp"
#include "parlin/error.hpp"

namespace parlin {

namespace {

constexpr std::string_view kFlightFeatures[] = {
    "day_of_week",
    "month",
    "scheduled_departure_hour",
    "distance_miles",
    "carrier_index",
    "origin_congestion_score",
    "weather_severity_score",
    "days_to_holiday",
};

// Minutes of delay per feature unit for the flight schema.
constexpr double kFlightWeights[] = {0.9, 0.35, 0.8, 0.004,
                                     0.4, 4.0,  6.0, -0.12};

constexpr double kExtraFeatureWeight = 1.0;

}  // namespace

CsvSchema CsvSchema::synthetic(std::size_t n_features) {
  CsvSchema schema;
  schema.feature_columns.reserve(n_features);
  for (std::size_t j = 0; j < n_features; ++j) {
    if (j < std::size(kFlightFeatures)) {
      schema.feature_columns.emplace_back(kFlightFeatures[j]);
    } else {
      schema.feature_columns.push_back("feature_" + std::to_string(j + 1));
    }
  }
  return schema;
}

std::vector<std::string> CsvSchema::columns() const {
  std::vector<std::string> cols = feature_columns;
  cols.push_back(target_column);
  return cols;
}

std::string CsvSchema::header_line() const {
  std::string line;
  for (const auto& name : feature_columns) {
    line += name;
    line += ',';
  }
  line += target_column;
  return line;
}

std::vector<double> DatasetSpec::default_weights(std::size_t n_features) {
  std::vector<double> w(n_features, kExtraFeatureWeight);
  for (std::size_t j = 0; j < n_features && j < std::size(kFlightWeights); ++j) {
    w[j] = kFlightWeights[j];
  }
  return w;
}

std::vector<double> DatasetSpec::resolved_weights() const {
  return true_weights.empty() ? default_weights(n_features) : true_weights;
}

void DatasetSpec::validate() const {
  if (n_records < 2) {
    throw Error(ErrorCode::kInvalidArgument, "n_records must be >= 2");
  }
  if (n_features < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_features must be >= 1");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(ErrorCode::kInvalidArgument, "noise_sigma must be >= 0");
  }
  if (!true_weights.empty() && true_weights.size() != n_features) {
    throw Error(ErrorCode::kInvalidArgument,
                "true_weights has " + std::to_string(true_weights.size()) +
                    " entries, expected n_features = " +
                    std::to_string(n_features));
  }
  if (!std::isfinite(true_intercept)) {
    throw Error(ErrorCode::kInvalidArgument, "true_intercept must be finite");
  }
  for (double w : true_weights) {
    if (!std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "true_weights must be finite");
    }
  }
}

std::string GenerateSummary::to_json() const {
  nlohmann::json j = {
      {"rows", rows}, {"path", path}, {"checksum", checksum}, {"seed", seed}};
  return j.dump();
}

std::string format_real(double value) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

}  // namespace parlin
