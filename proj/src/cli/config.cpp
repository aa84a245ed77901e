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

#include <fstream>
#include <initializer_list>
#include <limits>
#include <type_traits>
#include <string>

#include "parlin/config.hpp"
#include "parlin/error.hpp"

namespace parlin {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorCode::kIo, "config: " + what);
}

const json& section(const json& doc, const std::string& path) {
  if (!doc.is_object()) config_error("'" + path + "' must be an object");
  return doc;
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) config_error("unknown key '" + (path.empty() ? key : path + "." + key) + "'");
  }
}

template <class T>
void read(const json& obj, const std::string& path, const char* key, T& out) {
  if (!obj.contains(key)) return;
  if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    const json& v = obj.at(key);
    if (!v.is_number_unsigned() || v.get<std::uint64_t>() > std::numeric_limits<T>::max()) {
      config_error("'" + path + "." + key + "' must be a non-negative integer in range");
    }
  }
  try {
    out = obj.at(key).get<T>();
  } catch (const json::exception&) {
    config_error("'" + path + "." + key + "' has the wrong type");
  }
}

TrainMode parse_mode(const std::string& s) {
  if (s == "normal_equations") return TrainMode::kNormalEquations;
  if (s == "gradient_descent") return TrainMode::kGradientDescent;
  config_error("train.mode must be normal_equations or gradient_descent, got '" + s + "'");
}

}  // namespace

CsvSchema Config::schema() const {
  if (feature_columns) {
    CsvSchema s;
    s.feature_columns = *feature_columns;
    return s;
  }
  return CsvSchema::synthetic(generator.n_features);
}

JobSpec Config::job() const {
  JobSpec job;
  job.dataset_path = dataset_path;
  job.schema = schema();
  job.train = train;
  job.split_ratio = split_ratio;
  job.split_seed = split_seed;
  job.expected_workers = cluster.expected_workers;
  return job;
}

JobSpec Config::bench_job() const {
  JobSpec job = this->job();
  if (!train_mode_given) job.train.mode = TrainMode::kGradientDescent;
  job.expected_workers = 0;
  return job;
}

Config parse_config(const json& doc, const std::filesystem::path& base_dir) {
  Config cfg;
  section(doc, "<root>");
  reject_unknown(doc, "", {"dataset", "train", "split", "cluster", "bench"});

  if (doc.contains("dataset")) {
    const json& d = section(doc.at("dataset"), "dataset");
    reject_unknown(d, "dataset", {"path", "features", "spec"});
    std::string path;
    read(d, "dataset", "path", path);
    if (!path.empty()) {
      cfg.dataset_path = std::filesystem::absolute(base_dir / path).lexically_normal();
    }
    if (d.contains("features")) {
      std::vector<std::string> cols;
      read(d, "dataset", "features", cols);
      if (cols.empty()) config_error("dataset.features must not be empty");
      cfg.feature_columns = cols;
      cfg.generator.n_features = cols.size();
    }
    if (d.contains("spec")) {
      const json& s = section(d.at("spec"), "dataset.spec");
      reject_unknown(s, "dataset.spec",
                     {"n_records", "n_features", "true_intercept", "true_weights",
                      "noise_sigma", "seed"});
      DatasetSpec& g = cfg.generator;
      read(s, "dataset.spec", "n_records", g.n_records);
      read(s, "dataset.spec", "n_features", g.n_features);
      read(s, "dataset.spec", "true_intercept", g.true_intercept);
      read(s, "dataset.spec", "true_weights", g.true_weights);
      read(s, "dataset.spec", "noise_sigma", g.noise_sigma);
      read(s, "dataset.spec", "seed", g.seed);
      if (cfg.feature_columns && cfg.feature_columns->size() != g.n_features) {
        config_error("dataset.features and dataset.spec.n_features disagree");
      }
    }
  }

  if (doc.contains("train")) {
    const json& t = section(doc.at("train"), "train");
    reject_unknown(t, "train", {"mode", "iterations", "learning_rate", "ridge_epsilon", "seed"});
    if (t.contains("mode")) {
      std::string mode;
      read(t, "train", "mode", mode);
      cfg.train.mode = parse_mode(mode);
      cfg.train_mode_given = true;
    }
    read(t, "train", "iterations", cfg.train.iterations);
    read(t, "train", "learning_rate", cfg.train.learning_rate);
    read(t, "train", "ridge_epsilon", cfg.train.ridge_epsilon);
    read(t, "train", "seed", cfg.train.seed);
  }

  if (doc.contains("split")) {
    const json& s = section(doc.at("split"), "split");
    reject_unknown(s, "split", {"ratio", "seed"});
    read(s, "split", "ratio", cfg.split_ratio);
    read(s, "split", "seed", cfg.split_seed);
  }

  if (doc.contains("cluster")) {
    const json& c = section(doc.at("cluster"), "cluster");
    reject_unknown(c, "cluster", {"port", "expected_workers", "admission_timeout_s"});
    read(c, "cluster", "port", cfg.cluster.port);
    read(c, "cluster", "expected_workers", cfg.cluster.expected_workers);
    read(c, "cluster", "admission_timeout_s", cfg.cluster.admission_timeout_s);
    if (!(cfg.cluster.admission_timeout_s > 0.0)) {
      config_error("cluster.admission_timeout_s must be positive");
    }
  }

  if (doc.contains("bench")) {
    const json& b = section(doc.at("bench"), "bench");
    reject_unknown(b, "bench", {"environments", "repetitions", "output_dir"});
    if (b.contains("environments")) {
      const json& envs = b.at("environments");
      if (!envs.is_array() || envs.empty()) {
        config_error("bench.environments must be a non-empty array");
      }
      cfg.bench.environments.clear();
      for (std::size_t i = 0; i < envs.size(); ++i) {
        const std::string path = "bench.environments[" + std::to_string(i) + "]";
        const json& e = section(envs[i], path);
        reject_unknown(e, path, {"label", "workers"});
        Environment env;
        read(e, path, "workers", env.worker_count);
        env.label = default_environment_label(env.worker_count);
        read(e, path, "label", env.label);
        cfg.bench.environments.push_back(env);
      }
    }
    read(b, "bench", "repetitions", cfg.bench.repetitions);
    std::string out;
    read(b, "bench", "output_dir", out);
    if (!out.empty()) cfg.bench.output_dir = (base_dir / out).lexically_normal();
  }

  try {
    cfg.generator.validate();
    cfg.job().validate();
  } catch (const Error& e) {
    config_error(e.what());
  }
  return cfg;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot read config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIo, "config " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(doc, path.has_parent_path() ? path.parent_path() : ".");
}

}  // namespace parlin
