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

#include <poll.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "parlin/cluster.hpp"
#include "parlin/error.hpp"

namespace parlin {

namespace {

using Clock = std::chrono::steady_clock;

std::string next_job_id() {
  static std::atomic<std::uint64_t> counter{0};
  return "job-" + std::to_string(::getpid()) + "-" + std::to_string(++counter);
}

std::string missing_ranks(const std::vector<Socket>& admitted) {
  std::string out;
  for (std::size_t r = 0; r < admitted.size(); ++r) {
    if (admitted[r].valid()) continue;
    if (!out.empty()) out += ", ";
    out += std::to_string(r);
  }
  return out;
}

void reject(Socket& sock, const std::string& reason) {
  spdlog::warn("rejecting connection: {}", reason);
  try {
    sock.send_message(msg::Fail{reason});
  } catch (const Error&) {
  }
  sock.close();
}

// Collects one Hello per rank in [0, k). Bad or duplicate ranks and version
// mismatches are answered with Fail and dropped; admission continues.
std::vector<Socket> admit(Listener& listener, std::uint32_t k,
                          std::chrono::milliseconds timeout, const std::string& job_id) {
  const auto deadline = Clock::now() + timeout;
  std::vector<Socket> admitted(k);
  std::uint32_t n_admitted = 0;
  std::vector<Socket> pending;

  while (n_admitted < k) {
    const auto remaining =
        std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    if (remaining.count() <= 0) {
      throw Error(ErrorCode::kTimeout,
                  "admission timed out after " + std::to_string(timeout.count()) +
                      " ms: " + std::to_string(n_admitted) + " of " + std::to_string(k) +
                      " workers joined (missing ranks " + missing_ranks(admitted) + ")");
    }

    std::vector<pollfd> fds;
    fds.push_back({listener.fd(), POLLIN, 0});
    for (const Socket& s : pending) fds.push_back({s.fd(), POLLIN, 0});
    const int rc = ::poll(fds.data(), fds.size(), static_cast<int>(remaining.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, "poll failed during admission");
    }
    if (rc == 0) continue;

    std::vector<Socket> still_pending;
    for (std::size_t i = 1; i < fds.size(); ++i) {
      Socket& sock = pending[i - 1];
      if (fds[i].revents == 0) {
        still_pending.push_back(std::move(sock));
        continue;
      }
      std::optional<Message> m;
      try {
        m = sock.recv_message();
      } catch (const Error& e) {
        reject(sock, std::string("bad handshake: ") + e.what());
        continue;
      }
      if (!m) continue;  // peer left before saying hello
      const auto* hello = std::get_if<msg::Hello>(&*m);
      if (!hello) {
        reject(sock, "expected Hello, got " + std::string(kind_name(*m)));
      } else if (hello->protocol_version != kProtocolVersion) {
        reject(sock, "protocol version mismatch: master speaks " +
                         std::to_string(kProtocolVersion) + ", worker " +
                         std::to_string(hello->protocol_version));
      } else if (hello->worker_rank >= k) {
        reject(sock, "rank " + std::to_string(hello->worker_rank) +
                         " out of range for " + std::to_string(k) + " workers");
      } else if (admitted[hello->worker_rank].valid()) {
        reject(sock, "duplicate rank " + std::to_string(hello->worker_rank));
      } else {
        try {
          sock.send_message(msg::HelloAck{job_id});
        } catch (const Error&) {
          continue;
        }
        spdlog::info("admitted worker rank {}", hello->worker_rank);
        admitted[hello->worker_rank] = std::move(sock);
        ++n_admitted;
      }
    }
    pending = std::move(still_pending);

    if (fds[0].revents & POLLIN) {
      if (auto sock = listener.accept(std::chrono::milliseconds(0))) {
        pending.push_back(std::move(*sock));
      }
    }
  }
  return admitted;
}

}  // namespace

// Admitted worker connections, indexed by rank. Each round sends one request
// per worker, then waits for exactly one reply from every worker before the
// caller sees any of them.
class Master::Connections final : public ComputeBackend {
 public:
  Connections(std::vector<Socket> workers, std::uint64_t& rounds)
      : workers_(std::move(workers)), rounds_(rounds) {}

  std::vector<Message> round(const std::vector<Message>& requests,
                             std::string_view expected_reply) {
    for (std::size_t r = 0; r < workers_.size(); ++r) {
      try {
        workers_[r].send_message(requests[r]);
      } catch (const Error& e) {
        fail(r, std::string("unreachable: ") + e.what());
      }
    }

    std::vector<std::optional<Message>> replies(workers_.size());
    std::size_t outstanding = workers_.size();
    while (outstanding > 0) {
      std::vector<pollfd> fds;
      std::vector<std::size_t> ranks;
      for (std::size_t r = 0; r < workers_.size(); ++r) {
        if (replies[r]) continue;
        fds.push_back({workers_[r].fd(), POLLIN, 0});
        ranks.push_back(r);
      }
      if (::poll(fds.data(), fds.size(), -1) < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::kIo, "poll failed while gathering replies");
      }
      for (std::size_t i = 0; i < fds.size(); ++i) {
        if (fds[i].revents == 0) continue;
        const std::size_t r = ranks[i];
        std::optional<Message> m;
        try {
          m = workers_[r].recv_message();
        } catch (const Error& e) {
          fail(r, e.what());
        }
        if (!m) fail(r, "disconnected mid-job");
        if (const auto* f = std::get_if<msg::Fail>(&*m)) fail(r, "failed: " + f->reason);
        if (kind_name(*m) != expected_reply) {
          fail(r, "sent " + std::string(kind_name(*m)) + ", expected " +
                      std::string(expected_reply));
        }
        replies[r] = std::move(m);
        --outstanding;
      }
    }
    ++rounds_;

    std::vector<Message> out;
    out.reserve(replies.size());
    for (auto& m : replies) out.push_back(std::move(*m));
    return out;
  }

  std::vector<Message> broadcast(const Message& request, std::string_view expected_reply) {
    return round(std::vector<Message>(workers_.size(), request), expected_reply);
  }

  std::vector<GramPartial> gram(Scope scope) override {
    std::vector<GramPartial> out;
    for (auto& m : broadcast(msg::ComputeGram{scope}, "GramResult")) {
      out.push_back(std::move(std::get<msg::GramResult>(m).partial));
    }
    return out;
  }

  std::vector<GradientPartial> gradient(const ModelCoefficients& theta) override {
    std::vector<GradientPartial> out;
    for (auto& m : broadcast(msg::ComputeGradient{theta}, "GradientResult")) {
      auto& g = std::get<msg::GradientResult>(m);
      out.push_back({std::move(g.grad_sum), g.n});
    }
    return out;
  }

  std::vector<SsePartial> sse(const ModelCoefficients& theta) override {
    std::vector<SsePartial> out;
    for (auto& m : broadcast(msg::ComputeSse{theta}, "SseResult")) {
      const auto& s = std::get<msg::SseResult>(m);
      out.push_back({s.sse, s.n});
    }
    return out;
  }

  void shutdown_all() {
    for (Socket& s : workers_) {
      if (!s.valid()) continue;
      try {
        s.send_message(msg::Shutdown{});
      } catch (const Error&) {
      }
      s.close();
    }
  }

 private:
  [[noreturn]] void fail(std::size_t rank, const std::string& what) {
    workers_[rank].close();
    throw Error(ErrorCode::kWorkerFailure,
                "worker rank " + std::to_string(rank) + " " + what + "; job aborted");
  }

  std::vector<Socket> workers_;
  std::uint64_t& rounds_;
};

Master::Master(std::uint16_t port, const std::string& bind_address)
    : listener_(std::make_unique<Listener>(port, bind_address)) {}

Master::~Master() = default;

JobResult Master::run(const JobSpec& job, std::chrono::milliseconds admission_timeout) {
  job.validate();
  const std::uint32_t k = job.expected_workers;
  if (k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "a cluster job needs expected_workers >= 1");
  }
  assignments_.clear();
  rounds_ = 0;

  const std::uint64_t n_rows = count_rows(job.dataset_path, job.schema);
  const auto n_train = static_cast<std::uint64_t>(
      std::floor(job.split_ratio * static_cast<double>(n_rows)));
  const std::uint64_t n_test = n_rows - n_train;
  if (n_train < k || n_test < k) {
    throw Error(ErrorCode::kInvalidArgument,
                "dataset of " + std::to_string(n_rows) + " rows is too small for " +
                    std::to_string(k) + " workers");
  }
  const auto train_parts = make_partitions(n_train, k);
  const auto test_parts = make_partitions(n_test, k);

  const std::string job_id = next_job_id();
  spdlog::info("{} waiting for {} workers on port {}", job_id, k, port());
  std::vector<Socket> sockets = admit(*listener_, k, admission_timeout, job_id);
  listener_->close();

  const auto start = Clock::now();
  Connections conns(std::move(sockets), rounds_);
  TrainOutcome outcome;
  try {
    std::vector<Message> assigns;
    for (std::uint32_t r = 0; r < k; ++r) {
      assigns.push_back(msg::Assign{job.dataset_path.string(), job.schema, train_parts[r],
                                    test_parts[r], job.split_seed, job.split_ratio});
      assignments_.push_back({r, train_parts[r], test_parts[r]});
    }
    conns.round(assigns, "Done");
    outcome = train_and_evaluate(conns, job.train, job.schema);
  } catch (...) {
    conns.shutdown_all();
    throw;
  }
  const std::chrono::duration<double> elapsed = Clock::now() - start;
  conns.shutdown_all();

  JobResult result;
  result.coefficients = std::move(outcome.coefficients);
  result.eval = outcome.eval;
  result.ridge_fallback = outcome.ridge_fallback;
  result.wall_seconds = elapsed.count();
  result.environment_label = job.label();
  result.workers_used = k;
  spdlog::info("{} finished in {:.3f} s, rmse {:.4f}", job_id, result.wall_seconds,
               result.eval.rmse);
  return result;
}

JobResult master_run(const JobSpec& job, std::uint16_t port,
                     std::chrono::milliseconds admission_timeout) {
  Master master(port);
  return master.run(job, admission_timeout);
}

}  // namespace parlin
