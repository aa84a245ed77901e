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

#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <set>
#include <string>

#include <spdlog/spdlog.h>

#include "parlin/bench.hpp"
#include "parlin/error.hpp"

extern char** environ;

namespace parlin {

namespace {

class ChildProcess {
 public:
  explicit ChildProcess(const std::vector<std::string>& argv) {
    std::vector<char*> args;
    for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
    args.push_back(nullptr);
    const int rc = ::posix_spawn(&pid_, args[0], nullptr, nullptr, args.data(), environ);
    if (rc != 0) {
      throw Error(ErrorCode::kIo, "cannot spawn " + argv[0] + ": " + std::strerror(rc));
    }
  }

  ~ChildProcess() {
    if (pid_ > 0) {
      ::kill(pid_, SIGKILL);
      wait();
    }
  }

  ChildProcess(const ChildProcess&) = delete;
  ChildProcess& operator=(const ChildProcess&) = delete;

  /// Exit status, or 128 + signal.
  int wait() {
    int status = 0;
    while (::waitpid(pid_, &status, 0) < 0 && errno == EINTR) {
    }
    pid_ = -1;
    if (WIFEXITED(status)) return WEXITSTATUS(status);
    if (WIFSIGNALED(status)) return 128 + WTERMSIG(status);
    return -1;
  }

 private:
  pid_t pid_ = -1;
};

JobResult run_cluster(const ExperimentPlan& plan, const JobSpec& job) {
  Master master(0, "127.0.0.1");
  const std::string address = "127.0.0.1:" + std::to_string(master.port());

  // unique_ptr so an exception mid-spawn still reaps the earlier children.
  std::vector<std::unique_ptr<ChildProcess>> workers;
  for (std::uint32_t r = 0; r < job.expected_workers; ++r) {
    workers.push_back(std::make_unique<ChildProcess>(std::vector<std::string>{
        plan.worker_executable.string(), "worker", "--master", address, "--rank",
        std::to_string(r), "--log-level", plan.worker_log_level}));
  }
  JobResult result = master.run(job, plan.admission_timeout);
  for (std::uint32_t r = 0; r < workers.size(); ++r) {
    if (int status = workers[r]->wait(); status != 0) {
      throw Error(ErrorCode::kWorkerFailure, "worker rank " + std::to_string(r) +
                                                 " exited with status " +
                                                 std::to_string(status));
    }
  }
  return result;
}

}  // namespace

std::vector<Environment> default_environments() {
  std::vector<Environment> envs{{"Standalone", 0}};
  for (std::uint32_t k = 1; k <= 4; ++k) envs.push_back({default_environment_label(k), k});
  return envs;
}

void ExperimentPlan::validate() const {
  if (environments.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "plan needs at least one environment");
  }
  if (repetitions < 1) throw Error(ErrorCode::kInvalidArgument, "repetitions must be >= 1");
  std::set<std::string> labels;
  for (const auto& env : environments) {
    if (env.label.empty() || env.label.find_first_of(",\"\n") != std::string::npos) {
      throw Error(ErrorCode::kInvalidArgument,
                  "environment label '" + env.label + "' is empty or not CSV-safe");
    }
    if (!labels.insert(env.label).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate environment label " + env.label);
    }
    if (env.worker_count > kMaxWorkers) {
      throw Error(ErrorCode::kInvalidArgument, "too many workers in " + env.label);
    }
    if (env.worker_count > 0 && worker_executable.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "cluster environments need a worker executable");
    }
  }
  job.validate();
}

std::vector<PlanRun> run_plan(const ExperimentPlan& plan, const RunObserver& observer) {
  plan.validate();
  std::vector<PlanRun> runs;
  for (const Environment& env : plan.environments) {
    JobSpec job = plan.job;
    job.expected_workers = env.worker_count;
    job.environment_label = env.label;
    for (std::uint32_t run = 1; run <= plan.repetitions; ++run) {
      JobResult result;
      try {
        result = env.worker_count == 0 ? standalone_run(job) : run_cluster(plan, job);
      } catch (const Error& e) {
        throw Error(e.code(), env.label + " run " + std::to_string(run) + ": " + e.what());
      }
      spdlog::info("{} run {}: {:.3f} s", env.label, run, result.wall_seconds);
      runs.push_back({{env.label, run, result.wall_seconds}, std::move(result)});
      if (observer) observer(runs.back());
    }
  }
  return runs;
}

std::vector<TimingRecord> timings_of(std::span<const PlanRun> runs) {
  std::vector<TimingRecord> out;
  out.reserve(runs.size());
  for (const auto& r : runs) out.push_back(r.timing);
  return out;
}

}  // namespace parlin
