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

#include <doctest.h>

#include <future>
#include <thread>

#include "parlin/cluster.hpp"
#include "parlin/error.hpp"
#include "support.hpp"

using namespace parlin;
using namespace parlin::testing;
using namespace std::chrono_literals;

namespace {

struct Fixture {
  TempDir dir;
  JobSpec job;

  explicit Fixture(std::uint64_t rows = 6000, double sigma = 13.149) {
    DatasetSpec spec;
    spec.n_records = rows;
    spec.noise_sigma = sigma;
    spec.seed = 1234;
    generate_synthetic(spec, dir / "d.csv");
    job.dataset_path = dir / "d.csv";
    job.split_seed = 77;
  }
};

// Runs a cluster job in-process: one master thread, k worker threads.
JobResult run_cluster(JobSpec job, std::uint32_t k, Master* keep = nullptr) {
  job.expected_workers = k;
  Master local(0, "127.0.0.1");
  Master& master = keep ? *keep : local;
  std::vector<std::future<int>> workers;
  for (std::uint32_t r = 0; r < k; ++r) {
    workers.push_back(std::async(std::launch::async, [port = master.port(), r] {
      return worker_run("127.0.0.1", port, r, {5s});
    }));
  }
  JobResult result = master.run(job, 10s);
  for (auto& w : workers) CHECK(w.get() == 0);
  return result;
}

// Answers requests on an already admitted connection with a WorkerSession.
void serve(Socket& sock, std::uint32_t rank) {
  WorkerSession session(rank);
  while (auto m = sock.recv_message()) {
    auto reply = session.handle(*m);
    if (!reply) return;
    sock.send_message(*reply);
  }
}

Socket hello(std::uint16_t port, std::uint32_t rank, std::uint32_t version = kProtocolVersion) {
  Socket s = connect_tcp_retry("127.0.0.1", port, 5s);
  s.send_message(msg::Hello{rank, version});
  return s;
}

ErrorCode code_of(std::future<JobResult>& f) {
  try {
    f.get();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("job unexpectedly succeeded");
  return ErrorCode::kUsage;
}

}  // namespace

TEST_CASE("job spec validation and labels") {
  JobSpec job;
  CHECK_THROWS_AS(job.validate(), Error);  // no dataset
  job.dataset_path = "/x.csv";
  CHECK_NOTHROW(job.validate());
  CHECK(job.label() == "Standalone");
  job.expected_workers = 3;
  CHECK(job.label() == "Cluster_3");
  job.environment_label = "custom";
  CHECK(job.label() == "custom");
  job.split_ratio = 1.0;
  CHECK_THROWS_AS(job.validate(), Error);
  job.split_ratio = 0.7;
  job.expected_workers = kMaxWorkers + 1;
  CHECK_THROWS_AS(job.validate(), Error);
}

TEST_CASE("job results serialize") {
  JobResult r{{1.5, {2.0, -0.25}}, {3.0, 10, 90.0}, 0.125, "Cluster_2", 2, true};
  const JobResult back = job_result_from_json(to_json(r));
  CHECK(back.coefficients == r.coefficients);
  CHECK(back.eval.rmse == 3.0);
  CHECK(back.eval.n_test == 10);
  CHECK(back.environment_label == "Cluster_2");
  CHECK(back.workers_used == 2);
  CHECK(back.ridge_fallback);
}

TEST_CASE("standalone recovers noiseless coefficients and repeats exactly") {
  Fixture f(3000, 0.0);
  const JobResult a = standalone_run(f.job);
  DatasetSpec spec;
  CHECK(rel_close(a.coefficients.intercept, spec.true_intercept, 1e-9));
  const auto w = spec.resolved_weights();
  for (std::size_t j = 0; j < w.size(); ++j) CHECK(rel_close(a.coefficients.weights[j], w[j], 1e-9));
  CHECK(a.eval.n_test == 900);
  CHECK(a.eval.rmse < 1e-8);
  CHECK(a.workers_used == 0);
  CHECK(a.environment_label == "Standalone");

  const JobResult b = standalone_run(f.job);
  CHECK(b.coefficients == a.coefficients);
  CHECK(b.eval.rmse == a.eval.rmse);
}

TEST_CASE("standalone reports an unreadable dataset") {
  JobSpec job;
  job.dataset_path = "/nonexistent/parlin.csv";
  try {
    standalone_run(job);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}

TEST_CASE("clusters of one to four workers match standalone") {
  Fixture f;
  const JobResult local = standalone_run(f.job);
  const auto want = local.coefficients.to_vector();
  for (std::uint32_t k = 1; k <= 4; ++k) {
    Master master(0, "127.0.0.1");
    const JobResult r = run_cluster(f.job, k, &master);
    CHECK(max_rel_diff(r.coefficients.to_vector(), want) <= 1e-8);
    CHECK(rel_close(r.eval.rmse, local.eval.rmse, 1e-8));
    CHECK(r.eval.n_test == local.eval.n_test);
    CHECK(r.workers_used == k);
    CHECK(r.environment_label == "Cluster_" + std::to_string(k));
    CHECK(master.rounds() == 3);

    // The assignment log covers the train split exactly once.
    const auto& log = master.assignment_log();
    REQUIRE(log.size() == k);
    std::uint64_t next = 0;
    for (std::uint32_t i = 0; i < k; ++i) {
      CHECK(log[i].rank == i);
      CHECK(log[i].train.row_start == next);
      next = log[i].train.row_end;
    }
    CHECK(next == 4200);

    // Fixed merge order: the same k reproduces bit for bit.
    CHECK(run_cluster(f.job, k).coefficients == r.coefficients);
  }
}

TEST_CASE("gradient descent runs the same on a cluster") {
  Fixture f;
  f.job.train.mode = TrainMode::kGradientDescent;
  f.job.train.iterations = 30;
  const JobResult local = standalone_run(f.job);
  Master master(0, "127.0.0.1");
  const JobResult r = run_cluster(f.job, 3, &master);
  CHECK(max_rel_diff(r.coefficients.to_vector(), local.coefficients.to_vector()) <= 1e-8);
  CHECK(master.rounds() == 1 + 1 + 30 + 1);

  f.job.train.mode = TrainMode::kNormalEquations;
  const JobResult exact = standalone_run(f.job);
  CHECK(r.eval.rmse <= exact.eval.rmse * 1.05);
}

TEST_CASE("worker gram reply equals the library call on its rows") {
  Fixture f(2000);
  const auto schema = CsvSchema::synthetic();
  const SplitIndices split = train_test_split(2000, 0.7, 5);
  const auto parts = make_partitions(split.train.size(), 3);
  const auto test_parts = make_partitions(split.test.size(), 3);

  WorkerSession session(1);
  REQUIRE(session.handle(msg::Assign{f.job.dataset_path.string(), schema, parts[1], test_parts[1],
                                     5, 0.7}) == Message{msg::Done{}});
  const auto reply = session.handle(msg::ComputeGram{Scope::kTrain});
  REQUIRE(reply);
  const auto* got = std::get_if<msg::GramResult>(&*reply);
  REQUIRE(got);

  std::vector<std::uint64_t> rows(split.train.begin() + parts[1].row_start,
                                  split.train.begin() + parts[1].row_end);
  std::sort(rows.begin(), rows.end());
  const CsvFile file(f.job.dataset_path, schema);
  CHECK(got->partial == compute_gram_partial(file.read_rows(rows)));

  CHECK_FALSE(session.handle(msg::Shutdown{}).has_value());
  CHECK(session.finished());
}

TEST_CASE("worker session failures become Fail replies") {
  WorkerSession early(0);
  auto r = early.handle(msg::ComputeGram{});
  CHECK(std::holds_alternative<msg::Fail>(*r));
  CHECK(early.last_error() == ErrorCode::kProtocol);

  WorkerSession missing(0);
  missing.handle(msg::Assign{"/nonexistent.csv", CsvSchema::synthetic(), {0, 0, 1}, {0, 0, 1}, 0,
                             0.7});
  r = missing.handle(msg::ComputeSse{ModelCoefficients::zero(8)});
  REQUIRE(std::holds_alternative<msg::Fail>(*r));
  CHECK(std::get<msg::Fail>(*r).reason.find("nonexistent") != std::string::npos);
  CHECK(missing.last_error() == ErrorCode::kIo);

  WorkerSession confused(0);
  CHECK(std::holds_alternative<msg::Fail>(*confused.handle(msg::Hello{})));
}

TEST_CASE("worker exits cleanly on shutdown right after the handshake") {
  Listener listener(0, "127.0.0.1");
  auto worker = std::async(std::launch::async, [port = listener.port()] {
    return worker_run("127.0.0.1", port, 0, {5s});
  });
  auto sock = listener.accept(5s);
  REQUIRE(sock);
  auto m = sock->recv_message();
  REQUIRE(m);
  CHECK(*m == Message{msg::Hello{0, kProtocolVersion}});
  sock->send_message(msg::HelloAck{"job"});
  sock->send_message(msg::Shutdown{});
  CHECK(worker.get() == 0);
}

TEST_CASE("worker reports a master that never answers") {
  Listener listener(0, "127.0.0.1");
  const auto port = listener.port();
  listener.close();
  CHECK(worker_run("127.0.0.1", port, 0, {200ms}) != 0);
}

TEST_CASE("duplicate and bad ranks are rejected during admission") {
  Fixture f(2000);
  f.job.expected_workers = 2;
  Master master(0, "127.0.0.1");
  auto job = std::async(std::launch::async, [&] { return master.run(f.job, 10s); });

  Socket first = hello(master.port(), 0);
  REQUIRE(first.wait_readable(5s));
  CHECK(std::holds_alternative<msg::HelloAck>(*first.recv_message()));

  Socket dup = hello(master.port(), 0);
  auto reply = dup.recv_message();
  REQUIRE(reply);
  REQUIRE(std::holds_alternative<msg::Fail>(*reply));
  CHECK(std::get<msg::Fail>(*reply).reason.find("duplicate rank 0") != std::string::npos);

  Socket out_of_range = hello(master.port(), 2);
  reply = out_of_range.recv_message();
  CHECK(std::holds_alternative<msg::Fail>(*reply));

  Socket old = hello(master.port(), 1, kProtocolVersion + 1);
  reply = old.recv_message();
  REQUIRE(std::holds_alternative<msg::Fail>(*reply));
  CHECK(std::get<msg::Fail>(*reply).reason.find("version") != std::string::npos);

  auto second = std::async(std::launch::async,
                           [&] { return worker_run("127.0.0.1", master.port(), 1, {5s}); });
  serve(first, 0);
  const JobResult r = job.get();
  CHECK(second.get() == 0);
  CHECK(r.workers_used == 2);
}

TEST_CASE("admission timeout names the missing ranks") {
  Fixture f(500);
  f.job.expected_workers = 3;
  Master master(0, "127.0.0.1");
  auto job = std::async(std::launch::async, [&] { return master.run(f.job, 400ms); });
  auto w = std::async(std::launch::async,
                      [&] { return worker_run("127.0.0.1", master.port(), 1, {2s}); });
  try {
    job.get();
    FAIL("expected a timeout");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTimeout);
    CHECK(std::string(e.what()).find("missing ranks 0, 2") != std::string::npos);
  }
  // The admitted worker loses its master without a Shutdown.
  CHECK(w.get() != 0);
}

TEST_CASE("a worker vanishing mid-job aborts the job naming its rank") {
  Fixture f(3000);
  f.job.train.mode = TrainMode::kGradientDescent;
  f.job.train.iterations = 20;
  f.job.expected_workers = 2;
  Master master(0, "127.0.0.1");
  auto job = std::async(std::launch::async, [&] { return master.run(f.job, 10s); });
  auto good = std::async(std::launch::async,
                         [&] { return worker_run("127.0.0.1", master.port(), 0, {5s}); });

  Socket flaky = hello(master.port(), 1);
  WorkerSession session(1);
  int gradients = 0;
  while (auto m = flaky.recv_message()) {
    if (std::holds_alternative<msg::HelloAck>(*m)) continue;
    if (std::holds_alternative<msg::ComputeGradient>(*m) && ++gradients == 5) break;
    flaky.send_message(*session.handle(*m));
  }
  flaky.close();

  try {
    job.get();
    FAIL("expected the job to abort");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kWorkerFailure);
    CHECK(exit_code_for(e.code()) == 2);
    CHECK(std::string(e.what()).find("worker rank 1") != std::string::npos);
  }
  CHECK(good.get() == 0);
}

TEST_CASE("a Fail reply mid-job aborts the job") {
  Fixture f(1000);
  f.job.expected_workers = 1;
  Master master(0, "127.0.0.1");
  auto job = std::async(std::launch::async, [&] { return master.run(f.job, 10s); });
  Socket s = hello(master.port(), 0);
  CHECK(std::holds_alternative<msg::HelloAck>(*s.recv_message()));
  CHECK(std::holds_alternative<msg::Assign>(*s.recv_message()));
  s.send_message(msg::Done{});
  CHECK(std::holds_alternative<msg::ComputeGram>(*s.recv_message()));
  s.send_message(msg::Fail{"disk on fire"});
  CHECK(code_of(job) == ErrorCode::kWorkerFailure);
}

TEST_CASE("master refuses impossible jobs before admission") {
  Fixture f(10);
  f.job.expected_workers = 4;
  Master master(0, "127.0.0.1");
  CHECK_THROWS_AS(master.run(f.job, 100ms), Error);

  JobSpec missing = f.job;
  missing.dataset_path = f.dir / "absent.csv";
  missing.expected_workers = 1;
  Master other(0, "127.0.0.1");
  try {
    other.run(missing, 100ms);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
}
