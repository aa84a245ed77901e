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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "parlin/bench.hpp"
#include "parlin/cluster.hpp"
#include "parlin/data.hpp"

namespace parlin {

struct ClusterConfig {
  std::uint16_t port = kDefaultPort;
  std::uint32_t expected_workers = 0;
  double admission_timeout_s = 60.0;
};

struct BenchConfig {
  std::vector<Environment> environments = default_environments();
  std::uint32_t repetitions = 5;
  std::filesystem::path output_dir = "bench_out";
};

/// Everything a subcommand needs, parsed strictly: any key not listed in the
/// README's config reference is an error naming the key.
struct Config {
  std::filesystem::path dataset_path;
  std::optional<std::vector<std::string>> feature_columns;
  DatasetSpec generator;
  TrainConfig train;
  bool train_mode_given = false;
  double split_ratio = 0.7;
  std::uint64_t split_seed = 0;
  ClusterConfig cluster;
  BenchConfig bench;

  CsvSchema schema() const;
  /// Job for `run`/`master`; expected_workers comes from the cluster section.
  JobSpec job() const;
  /// The bench template job: gradient descent unless train.mode is given.
  JobSpec bench_job() const;
};

/// Relative paths resolve against `base_dir`. Throws kIo on unknown keys,
/// wrong types or invalid values.
Config parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir);
Config load_config(const std::filesystem::path& path);

}  // namespace parlin
