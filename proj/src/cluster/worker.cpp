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
#include <chrono>
#include <string>

#include <spdlog/spdlog.h>

#include "parlin/cluster.hpp"
#include "parlin/error.hpp"

namespace parlin {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::vector<std::uint64_t> sorted_slice(const std::vector<std::uint64_t>& indices,
                                        const PartitionSpec& part, const char* what) {
  if (part.row_start > part.row_end || part.row_end > indices.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                std::string(what) + " partition [" + std::to_string(part.row_start) +
                    ", " + std::to_string(part.row_end) + ") exceeds the " +
                    std::to_string(indices.size()) + " rows of that split");
  }
  std::vector<std::uint64_t> rows(indices.begin() + static_cast<std::ptrdiff_t>(part.row_start),
                                  indices.begin() + static_cast<std::ptrdiff_t>(part.row_end));
  std::sort(rows.begin(), rows.end());
  return rows;
}

}  // namespace

const SampleBlock& WorkerSession::rows(Scope scope) {
  if (!assignment_) throw Error(ErrorCode::kProtocol, "compute request before Assign");
  if (!train_) {
    const msg::Assign& a = *assignment_;
    const CsvFile file(a.dataset_path, a.schema);
    const SplitIndices split =
        train_test_split(file.row_count(), a.split_ratio, a.split_seed);
    train_ = file.read_rows(sorted_slice(split.train, a.partition, "train"));
    test_ = file.read_rows(sorted_slice(split.test, a.test_partition, "test"));
    spdlog::debug("worker {} loaded {} train and {} test rows", rank_, train_->size(),
                  test_->size());
  }
  return scope == Scope::kTrain ? *train_ : *test_;
}

std::optional<Message> WorkerSession::handle(const Message& request) {
  try {
    return std::visit(
        Overloaded{
            [&](const msg::Assign& a) -> std::optional<Message> {
              assignment_ = a;
              train_.reset();
              test_.reset();
              return msg::Done{};
            },
            [&](const msg::ComputeGram& c) -> std::optional<Message> {
              return msg::GramResult{compute_gram_partial(rows(c.scope))};
            },
            [&](const msg::ComputeGradient& c) -> std::optional<Message> {
              GradientPartial g = compute_gradient_partial(rows(Scope::kTrain), c.theta);
              return msg::GradientResult{std::move(g.grad_sum), g.n};
            },
            [&](const msg::ComputeSse& c) -> std::optional<Message> {
              const SsePartial s = compute_sse_partial(rows(Scope::kTest), c.theta);
              return msg::SseResult{s.sse, s.n};
            },
            [&](const msg::Shutdown&) -> std::optional<Message> {
              finished_ = true;
              return std::nullopt;
            },
            [&](const auto& other) -> std::optional<Message> {
              return msg::Fail{"worker " + std::to_string(rank_) + " cannot handle " +
                               std::string(kind_name(other))};
            },
        },
        request);
  } catch (const Error& e) {
    last_error_ = e.code();
    return msg::Fail{"worker " + std::to_string(rank_) + ": " + e.what()};
  } catch (const std::exception& e) {
    last_error_ = ErrorCode::kIo;
    return msg::Fail{"worker " + std::to_string(rank_) + ": " + e.what()};
  }
}

int worker_run(const std::string& host, std::uint16_t port, std::uint32_t rank,
               const WorkerOptions& options) {
  try {
    Socket sock = connect_tcp_retry(host, port, options.connect_timeout);
    sock.send_message(msg::Hello{rank, kProtocolVersion});

    auto reply = sock.recv_message();
    if (!reply) throw Error(ErrorCode::kWorkerFailure, "master closed during handshake");
    if (const auto* f = std::get_if<msg::Fail>(&*reply)) {
      throw Error(ErrorCode::kWorkerFailure, "master rejected worker: " + f->reason);
    }
    const auto* ack = std::get_if<msg::HelloAck>(&*reply);
    if (!ack) {
      sock.send_message(msg::Fail{"expected HelloAck, got " + std::string(kind_name(*reply))});
      throw Error(ErrorCode::kProtocol, "unexpected handshake reply");
    }
    spdlog::info("worker {} admitted to job {}", rank, ack->job_id);

    WorkerSession session(rank);
    while (!session.finished()) {
      std::optional<Message> request;
      try {
        request = sock.recv_message();
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kProtocol) {
          // Undecodable traffic: report and hang up.
          sock.send_message(msg::Fail{e.what()});
        }
        throw;
      }
      if (!request) throw Error(ErrorCode::kWorkerFailure, "master disconnected");
      if (auto out = session.handle(*request)) {
        if (const auto* f = std::get_if<msg::Fail>(&*out)) {
          spdlog::error("{}", f->reason);
        }
        sock.send_message(*out);
      }
    }
    spdlog::info("worker {} shut down cleanly", rank);
    return 0;
  } catch (const Error& e) {
    spdlog::error("worker {}: {}", rank, e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    spdlog::error("worker {}: {}", rank, e.what());
    return 2;
  }
}

namespace {

// In-process backend: a single WorkerSession owning the whole split.
class LocalBackend final : public ComputeBackend {
 public:
  explicit LocalBackend(WorkerSession& session) : session_(session) {}

  std::vector<GramPartial> gram(Scope scope) override {
    return {std::get<msg::GramResult>(call(msg::ComputeGram{scope})).partial};
  }
  std::vector<GradientPartial> gradient(const ModelCoefficients& theta) override {
    auto r = std::get<msg::GradientResult>(call(msg::ComputeGradient{theta}));
    return {GradientPartial{std::move(r.grad_sum), r.n}};
  }
  std::vector<SsePartial> sse(const ModelCoefficients& theta) override {
    const auto r = std::get<msg::SseResult>(call(msg::ComputeSse{theta}));
    return {SsePartial{r.sse, r.n}};
  }

 private:
  Message call(const Message& request) {
    Message reply = *session_.handle(request);
    if (const auto* f = std::get_if<msg::Fail>(&reply)) {
      throw Error(session_.last_error().value_or(ErrorCode::kIo), f->reason);
    }
    return reply;
  }

  WorkerSession& session_;
};

}  // namespace

JobResult standalone_run(const JobSpec& job) {
  job.validate();
  if (job.expected_workers != 0) {
    throw Error(ErrorCode::kInvalidArgument, "standalone_run needs expected_workers = 0");
  }
  const auto start = std::chrono::steady_clock::now();
  const CsvFile file(job.dataset_path, job.schema);
  const std::uint64_t n_rows = file.row_count();
  const auto n_train = static_cast<std::uint64_t>(
      std::floor(job.split_ratio * static_cast<double>(n_rows)));

  WorkerSession session(0);
  session.handle(msg::Assign{job.dataset_path.string(), job.schema,
                             PartitionSpec{0, 0, n_train},
                             PartitionSpec{0, 0, n_rows - n_train}, job.split_seed,
                             job.split_ratio});
  LocalBackend backend(session);
  TrainOutcome outcome = train_and_evaluate(backend, job.train, job.schema);
  const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;

  JobResult result;
  result.coefficients = std::move(outcome.coefficients);
  result.eval = outcome.eval;
  result.ridge_fallback = outcome.ridge_fallback;
  result.wall_seconds = elapsed.count();
  result.environment_label = job.label();
  result.workers_used = 0;
  return result;
}

}  // namespace parlin
