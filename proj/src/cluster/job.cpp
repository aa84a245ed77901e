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

#include <string>

#include "parlin/cluster.hpp"
#include "parlin/error.hpp"

namespace parlin {

void JobSpec::validate() const {
  if (dataset_path.empty()) throw Error(ErrorCode::kInvalidArgument, "job has no dataset path");
  if (expected_workers > kMaxWorkers) {
    throw Error(ErrorCode::kInvalidArgument,
                "expected_workers must be in [0, " + std::to_string(kMaxWorkers) + "]");
  }
  if (!(split_ratio > 0.0 && split_ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "split_ratio must lie in (0, 1)");
  }
  if (schema.feature_columns.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "schema has no feature columns");
  }
  train.validate();
}

std::string default_environment_label(std::uint32_t workers) {
  return workers == 0 ? "Standalone" : "Cluster_" + std::to_string(workers);
}

std::string JobSpec::label() const {
  return environment_label.empty() ? default_environment_label(expected_workers)
                                   : environment_label;
}

nlohmann::json to_json(const JobResult& r) {
  return {
      {"coefficients",
       {{"intercept", r.coefficients.intercept}, {"weights", r.coefficients.weights}}},
      {"eval", {{"rmse", r.eval.rmse}, {"n_test", r.eval.n_test}, {"sse", r.eval.sse}}},
      {"wall_seconds", r.wall_seconds},
      {"environment_label", r.environment_label},
      {"workers_used", r.workers_used},
      {"ridge_fallback", r.ridge_fallback},
  };
}

JobResult job_result_from_json(const nlohmann::json& j) {
  JobResult r;
  const auto& c = j.at("coefficients");
  r.coefficients.intercept = c.at("intercept").get<double>();
  r.coefficients.weights = c.at("weights").get<std::vector<double>>();
  const auto& e = j.at("eval");
  r.eval.rmse = e.at("rmse").get<double>();
  r.eval.n_test = e.at("n_test").get<std::uint64_t>();
  r.eval.sse = e.at("sse").get<double>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  r.environment_label = j.at("environment_label").get<std::string>();
  r.workers_used = j.at("workers_used").get<std::uint32_t>();
  r.ridge_fallback = j.value("ridge_fallback", false);
  return r;
}

}  // namespace parlin
