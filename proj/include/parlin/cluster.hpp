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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "parlin/core.hpp"
#include "parlin/data.hpp"
#include "parlin/error.hpp"
#include "parlin/net.hpp"
#include "parlin/protocol.hpp"

namespace parlin {

inline constexpr std::uint16_t kDefaultPort = 7077;
inline constexpr std::uint32_t kMaxWorkers = 64;
inline constexpr std::chrono::milliseconds kDefaultAdmissionTimeout{60'000};

struct JobSpec {
  std::filesystem::path dataset_path;
  CsvSchema schema = CsvSchema::synthetic();
  TrainConfig train;
  double split_ratio = 0.7;
  std::uint64_t split_seed = 0;
  std::uint32_t expected_workers = 0;  // 0 = standalone
  std::string environment_label;       // empty: "Standalone" / "Cluster_<k>"

  void validate() const;
  std::string label() const;
};

struct JobResult {
  ModelCoefficients coefficients;
  EvalReport eval;
  double wall_seconds = 0.0;
  std::string environment_label;
  std::uint32_t workers_used = 0;
  bool ridge_fallback = false;
};

nlohmann::json to_json(const JobResult& r);
JobResult job_result_from_json(const nlohmann::json& j);

std::string default_environment_label(std::uint32_t workers);

/// One compute round fanned out over the partitions of a job. Every call
/// returns one entry per partition, in ascending rank order.
class ComputeBackend {
 public:
  virtual ~ComputeBackend() = default;
  virtual std::vector<GramPartial> gram(Scope scope) = 0;
  virtual std::vector<GradientPartial> gradient(const ModelCoefficients& theta) = 0;
  virtual std::vector<SsePartial> sse(const ModelCoefficients& theta) = 0;
};

struct TrainOutcome {
  ModelCoefficients coefficients;
  EvalReport eval;
  bool ridge_fallback = false;
};

/// Train on the train scope and evaluate on the test scope. Partials are
/// reduced in rank order, so the result is bitwise reproducible for a fixed
/// partitioning.
///
/// Gradient descent runs in standardized coordinates: the column statistics
/// come from the train Gram round, workers always see raw-space coefficients,
/// and the master maps gradients between the two spaces. The intercept starts
/// at the train-target mean.
TrainOutcome train_and_evaluate(ComputeBackend& backend, const TrainConfig& config,
                                const CsvSchema& schema);

/// Serves one worker's share of a job: the messages after the Hello handshake.
/// Data is loaded on the first compute request.
class WorkerSession {
 public:
  explicit WorkerSession(std::uint32_t rank) : rank_(rank) {}

  /// Reply for a request, or nullopt after Shutdown. Failures become Fail.
  std::optional<Message> handle(const Message& request);

  bool finished() const { return finished_; }
  std::uint32_t rank() const { return rank_; }
  /// Kind of the most recent failure turned into a Fail reply.
  std::optional<ErrorCode> last_error() const { return last_error_; }

 private:
  const SampleBlock& rows(Scope scope);

  std::uint32_t rank_;
  std::optional<msg::Assign> assignment_;
  std::optional<SampleBlock> train_;
  std::optional<SampleBlock> test_;
  std::optional<ErrorCode> last_error_;
  bool finished_ = false;
};

struct WorkerOptions {
  std::chrono::milliseconds connect_timeout{30'000};
};

/// Connects, handshakes and serves until Shutdown. Returns the process exit
/// status: 0 after a clean Shutdown, otherwise exit_code_for(kind).
int worker_run(const std::string& host, std::uint16_t port, std::uint32_t rank,
               const WorkerOptions& options = {});

/// Runs the whole pipeline in-process over one partition.
JobResult standalone_run(const JobSpec& job);

struct AssignmentRecord {
  std::uint32_t rank = 0;
  PartitionSpec train;
  PartitionSpec test;
};

/// Coordinator for one job. The listening socket is bound on construction so
/// callers can learn an ephemeral port before starting workers.
class Master {
 public:
  explicit Master(std::uint16_t port = kDefaultPort,
                  const std::string& bind_address = "0.0.0.0");
  ~Master();

  std::uint16_t port() const { return listener_->port(); }

  /// Admission, assignment, training and evaluation. Throws kTimeout when
  /// admission does not complete, kWorkerFailure naming the rank when a worker
  /// fails or disconnects, kIo when the master cannot read the dataset.
  JobResult run(const JobSpec& job,
                std::chrono::milliseconds admission_timeout = kDefaultAdmissionTimeout);

  const std::vector<AssignmentRecord>& assignment_log() const { return assignments_; }
  /// Number of request rounds completed during the last run.
  std::uint64_t rounds() const { return rounds_; }

 private:
  class Connections;

  std::unique_ptr<Listener> listener_;
  std::vector<AssignmentRecord> assignments_;
  std::uint64_t rounds_ = 0;
};

JobResult master_run(const JobSpec& job, std::uint16_t port,
                     std::chrono::milliseconds admission_timeout = kDefaultAdmissionTimeout);

}  // namespace parlin
