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

#include <unistd.h>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "parlin/cli.hpp"
#include "parlin/config.hpp"
#include "parlin/error.hpp"

namespace parlin {

namespace {

std::filesystem::path self_executable() {
  std::error_code ec;
  auto p = std::filesystem::read_symlink("/proc/self/exe", ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot locate the parlin executable");
  return p;
}

void require_dataset(const Config& cfg) {
  if (cfg.dataset_path.empty()) throw Error(ErrorCode::kIo, "config: dataset.path is required");
  if (!std::filesystem::is_regular_file(cfg.dataset_path)) {
    throw Error(ErrorCode::kIo, "dataset " + cfg.dataset_path.string() + " does not exist");
  }
}

void require_parent_dir(const std::filesystem::path& out) {
  const auto parent = std::filesystem::absolute(out).parent_path();
  if (!std::filesystem::is_directory(parent)) {
    throw Error(ErrorCode::kIo, "output directory " + parent.string() + " does not exist");
  }
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << std::endl; }

}  // namespace

void configure_logging(std::string_view level) {
  std::string name(level);
  if (name.empty()) {
    const char* env = std::getenv("PARLIN_LOG");
    name = env ? env : "info";
  }
  spdlog::level::level_enum lvl;
  if (name == "error") {
    lvl = spdlog::level::err;
  } else if (name == "warn") {
    lvl = spdlog::level::warn;
  } else if (name == "info") {
    lvl = spdlog::level::info;
  } else if (name == "debug") {
    lvl = spdlog::level::debug;
  } else {
    throw Error(ErrorCode::kUsage, "log level must be error, warn, info or debug, got '" + name + "'");
  }
  auto logger = spdlog::get("parlin");
  if (!logger) logger = spdlog::stderr_color_mt("parlin");
  logger->set_pattern("[%H:%M:%S.%e] [%^%l%$] [pid %P] %v");
  spdlog::set_default_logger(logger);
  spdlog::set_level(lvl);
}

int cli_dispatch(int argc, const char* const* argv) {
  CLI::App app{"Data-parallel linear regression on a master/worker cluster", "parlin"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed;
  std::string log_level;
  app.add_option("--seed", seed,
                 "Override the generator seed (gen-data) or the split seed (run, master, bench)");
  app.add_option("--log-level", log_level, "error|warn|info|debug (default $PARLIN_LOG or info)");

  std::string config_path, out_path, master_address, records_path;
  std::uint32_t rank = 0;
  std::optional<std::uint16_t> port;

  auto* gen = app.add_subcommand("gen-data", "Write a synthetic flight-delay CSV");
  gen->add_option("--config", config_path, "Config file")->required();
  gen->add_option("--out", out_path, "Output CSV path (default: dataset.path)");

  auto* worker = app.add_subcommand("worker", "Serve one partition for a master");
  worker->add_option("--master", master_address, "HOST:PORT of the master")->required();
  worker->add_option("--rank", rank, "Worker rank in [0, k)")->required();

  auto* master = app.add_subcommand("master", "Coordinate a cluster job");
  master->add_option("--config", config_path, "Config file")->required();
  master->add_option("--port", port, "Listen port (default: cluster.port or 7077)");

  auto* run = app.add_subcommand("run", "Run a job standalone, without workers");
  run->add_option("--config", config_path, "Config file")->required();

  auto* bench = app.add_subcommand("bench", "Run the standalone-vs-cluster benchmark plan");
  bench->add_option("--config", config_path, "Config file")->required();
  bench->add_option("--out", out_path, "Report directory (default: bench.output_dir)");

  auto* report = app.add_subcommand("report", "Re-render reports from a records file");
  report->add_option("--records", records_path, "records.json from a bench run")->required();
  report->add_option("--out", out_path, "Report directory")->required();

  for (auto* sub : {gen, worker, master, run, bench, report}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "parlin: " << e.what() << "\n\n" << app.help();
    return 1;
  }

  try {
    configure_logging(log_level);

    if (gen->parsed()) {
      const Config cfg = load_config(config_path);
      DatasetSpec spec = cfg.generator;
      if (seed) spec.seed = *seed;
      const std::filesystem::path out =
          out_path.empty() ? cfg.dataset_path : std::filesystem::path(out_path);
      if (out.empty()) throw Error(ErrorCode::kIo, "gen-data needs --out or dataset.path");
      require_parent_dir(out);
      std::cout << generate_synthetic(spec, out).to_json() << std::endl;
      return 0;
    }

    if (worker->parsed()) {
      const auto [host, master_port] = parse_host_port(master_address);
      return worker_run(host, master_port, rank);
    }

    if (master->parsed()) {
      const Config cfg = load_config(config_path);
      if (cfg.cluster.expected_workers < 1) {
        throw Error(ErrorCode::kIo, "config: cluster.expected_workers must be >= 1 for master");
      }
      require_dataset(cfg);
      JobSpec job = cfg.job();
      if (seed) job.split_seed = *seed;
      const auto timeout = std::chrono::milliseconds(
          static_cast<std::int64_t>(cfg.cluster.admission_timeout_s * 1000.0));
      print_json(to_json(master_run(job, port.value_or(cfg.cluster.port), timeout)));
      return 0;
    }

    if (run->parsed()) {
      const Config cfg = load_config(config_path);
      require_dataset(cfg);
      JobSpec job = cfg.job();
      job.expected_workers = 0;
      if (seed) job.split_seed = *seed;
      print_json(to_json(standalone_run(job)));
      return 0;
    }

    if (bench->parsed()) {
      const Config cfg = load_config(config_path);
      require_dataset(cfg);
      ExperimentPlan plan;
      plan.environments = cfg.bench.environments;
      plan.repetitions = cfg.bench.repetitions;
      plan.job = cfg.bench_job();
      if (seed) plan.job.split_seed = *seed;
      plan.worker_executable = self_executable();
      plan.worker_log_level = spdlog::get_level() <= spdlog::level::debug ? "debug" : "warn";
      plan.admission_timeout = std::chrono::milliseconds(
          static_cast<std::int64_t>(cfg.cluster.admission_timeout_s * 1000.0));
      const std::filesystem::path out =
          out_path.empty() ? cfg.bench.output_dir : std::filesystem::path(out_path);
      std::filesystem::create_directories(out);

      const auto runs = run_plan(plan);
      write_records(runs, out / "records.json");
      const auto records = timings_of(runs);
      const auto paths = emit_report(summarize(records), out);
      print_json({{"records", (out / "records.json").string()},
                  {"summary_csv", paths.summary_csv.string()},
                  {"scaling_svg", paths.scaling_svg.string()},
                  {"report_json", paths.report_json.string()}});
      return 0;
    }

    if (report->parsed()) {
      const auto runs = read_records(records_path);
      const auto records = timings_of(runs);
      const auto paths = emit_report(summarize(records), out_path);
      print_json({{"summary_csv", paths.summary_csv.string()},
                  {"scaling_svg", paths.scaling_svg.string()},
                  {"report_json", paths.report_json.string()}});
      return 0;
    }
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    if (e.code() == ErrorCode::kUsage) std::cerr << app.help();
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("{}", e.what());
    return 4;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return 2;
  }
  return 1;
}

}  // namespace parlin
