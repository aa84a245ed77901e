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

#include <cmath>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "parlin/bench.hpp"
#include "parlin/cluster.hpp"
#include "parlin/core.hpp"
#include "parlin/data.hpp"
#include "parlin/error.hpp"

namespace py = pybind11;
using namespace parlin;

namespace {

PyObject* g_error_type = nullptr;

using Matrix = py::array_t<double, py::array::c_style | py::array::forcecast>;

SampleBlock block_from_arrays(const Matrix& x, const Matrix& y) {
  if (x.ndim() != 2) throw py::value_error("features must be a 2-D array");
  if (y.ndim() != 1 || y.shape(0) != x.shape(0)) {
    throw py::value_error("targets must be a 1-D array with one entry per row");
  }
  const auto rows = static_cast<std::size_t>(x.shape(0));
  const auto d = static_cast<std::size_t>(x.shape(1));
  SampleBlock block(d);
  block.reserve(rows);
  const double* xs = x.data();
  const double* ys = y.data();
  for (std::size_t r = 0; r < rows; ++r) {
    const std::span<const double> row(xs + r * d, d);
    for (double v : row) {
      if (!std::isfinite(v)) {
        throw Error(ErrorCode::kInvalidArgument, "non-finite feature in row " + std::to_string(r));
      }
    }
    block.append(row, ys[r]);
  }
  return block;
}

py::array_t<double> gram_matrix(const GramPartial& g) {
  py::array_t<double> out({g.dim, g.dim});
  std::copy(g.a.begin(), g.a.end(), out.mutable_data());
  return out;
}

py::dict result_dict(const JobResult& r) {
  py::dict d;
  d["intercept"] = r.coefficients.intercept;
  d["weights"] = r.coefficients.weights;
  d["rmse"] = r.eval.rmse;
  d["n_test"] = r.eval.n_test;
  d["sse"] = r.eval.sse;
  d["wall_seconds"] = r.wall_seconds;
  d["environment_label"] = r.environment_label;
  d["workers_used"] = r.workers_used;
  d["ridge_fallback"] = r.ridge_fallback;
  return d;
}

const char* code_id(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kSingularSystem: return "singular_system";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kProtocol: return "protocol";
    case ErrorCode::kWorkerFailure: return "worker_failure";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kUsage: return "usage";
  }
  return "unknown";
}

TrainMode parse_mode(const std::string& mode) {
  if (mode == "normal_equations") return TrainMode::kNormalEquations;
  if (mode == "gradient_descent") return TrainMode::kGradientDescent;
  throw py::value_error("mode must be 'normal_equations' or 'gradient_descent'");
}

}  // namespace

PYBIND11_MODULE(_parlin, m) {
  m.doc() = "Distributed least-squares regression core";

  // Leaked on purpose: the type must outlive module teardown.
  g_error_type = (new py::exception<Error>(m, "ParlinError", PyExc_RuntimeError))->ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::handle(g_error_type)(e.what());
      exc.attr("code") = code_id(e.code());
      PyErr_SetObject(g_error_type, exc.ptr());
    }
  });

  py::class_<GramPartial>(m, "GramPartial")
      .def_property_readonly("a", &gram_matrix)
      .def_property_readonly("b", [](const GramPartial& g) { return g.b; })
      .def_readonly("n", &GramPartial::n)
      .def_readonly("sum_yy", &GramPartial::sum_yy)
      .def_property_readonly("feature_dim", &GramPartial::feature_dim)
      .def_static("zero", &GramPartial::zero, py::arg("feature_dim"))
      .def("__eq__", [](const GramPartial& a, const GramPartial& b) { return a == b; })
      .def("__repr__", [](const GramPartial& g) {
        return "GramPartial(feature_dim=" + std::to_string(g.feature_dim()) +
               ", n=" + std::to_string(g.n) + ")";
      });

  py::class_<ModelCoefficients>(m, "ModelCoefficients")
      .def(py::init([](double intercept, std::vector<double> weights) {
             return ModelCoefficients{intercept, std::move(weights)};
           }),
           py::arg("intercept"), py::arg("weights"))
      .def_readonly("intercept", &ModelCoefficients::intercept)
      .def_readonly("weights", &ModelCoefficients::weights)
      .def("to_list", &ModelCoefficients::to_vector)
      .def("__repr__", [](const ModelCoefficients& c) {
        return "ModelCoefficients(intercept=" + format_real(c.intercept) + ", " +
               std::to_string(c.weights.size()) + " weights)";
      });

  m.def(
      "compute_gram_partial",
      [](const Matrix& x, const Matrix& y) { return compute_gram_partial(block_from_arrays(x, y)); },
      py::arg("features"), py::arg("targets"));
  m.def("merge_gram", &merge_gram, py::arg("p"), py::arg("q"));
  m.def(
      "solve_normal",
      [](const GramPartial& g, double ridge_epsilon) {
        const NormalSolution s = solve_normal(g, ridge_epsilon);
        return py::make_tuple(s.coefficients, s.ridge_fallback);
      },
      py::arg("gram"), py::arg("ridge_epsilon") = 0.0,
      "Returns (coefficients, ridge_fallback).");
  m.def(
      "compute_gradient_partial",
      [](const Matrix& x, const Matrix& y, const ModelCoefficients& theta) {
        const GradientPartial g = compute_gradient_partial(block_from_arrays(x, y), theta);
        return py::make_tuple(g.grad_sum, g.n);
      },
      py::arg("features"), py::arg("targets"), py::arg("theta"));
  m.def(
      "gd_step",
      [](const ModelCoefficients& theta, const std::vector<double>& grad, std::uint64_t n,
         double lr) { return gd_step(theta, grad, n, lr); },
      py::arg("theta"), py::arg("grad_sum"), py::arg("n_total"), py::arg("learning_rate"));
  m.def(
      "predict",
      [](const ModelCoefficients& theta, const std::vector<double>& x) { return predict(theta, x); },
      py::arg("theta"), py::arg("features"));
  m.def(
      "rmse",
      [](const std::vector<double>& p, const std::vector<double>& o) { return rmse(p, o).rmse; },
      py::arg("predictions"), py::arg("observations"));
  m.def(
      "train_test_split",
      [](std::uint64_t n, double ratio, std::uint64_t seed) {
        SplitIndices s = train_test_split(n, ratio, seed);
        return py::make_tuple(std::move(s.train), std::move(s.test));
      },
      py::arg("n_records"), py::arg("ratio") = 0.7, py::arg("seed") = 0);
  m.def(
      "make_partitions",
      [](std::uint64_t n, std::uint32_t k) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
        for (const auto& p : make_partitions(n, k)) out.emplace_back(p.row_start, p.row_end);
        return out;
      },
      py::arg("n_rows"), py::arg("k"));

  m.def(
      "generate_synthetic",
      [](const std::filesystem::path& path, std::uint64_t n_records, std::size_t n_features,
         double noise_sigma, std::uint64_t seed) {
        DatasetSpec spec;
        spec.n_records = n_records;
        spec.n_features = n_features;
        spec.noise_sigma = noise_sigma;
        spec.seed = seed;
        const GenerateSummary s = generate_synthetic(spec, path);
        py::dict d;
        d["rows"] = s.rows;
        d["path"] = s.path;
        d["checksum"] = s.checksum;
        d["seed"] = s.seed;
        return d;
      },
      py::arg("path"), py::arg("n_records"), py::arg("n_features") = 8,
      py::arg("noise_sigma") = kDefaultNoiseSigma, py::arg("seed") = 42);
  m.def(
      "standalone_run",
      [](const std::filesystem::path& path, std::size_t n_features, const std::string& mode,
         std::uint32_t iterations, double learning_rate, double split_ratio,
         std::uint64_t split_seed) {
        JobSpec job;
        job.dataset_path = path;
        job.schema = CsvSchema::synthetic(n_features);
        job.train.mode = parse_mode(mode);
        job.train.iterations = iterations;
        job.train.learning_rate = learning_rate;
        job.split_ratio = split_ratio;
        job.split_seed = split_seed;
        JobResult r;
        {
          py::gil_scoped_release release;
          r = standalone_run(job);
        }
        return result_dict(r);
      },
      py::arg("dataset_path"), py::arg("n_features") = 8, py::arg("mode") = "normal_equations",
      py::arg("iterations") = 50, py::arg("learning_rate") = 0.1, py::arg("split_ratio") = 0.7,
      py::arg("split_seed") = 0);

  m.def(
      "summarize",
      [](const std::vector<std::tuple<std::string, std::uint32_t, double>>& records) {
        std::vector<TimingRecord> recs;
        for (const auto& [env, run, secs] : records) recs.push_back({env, run, secs});
        std::vector<std::pair<std::string, double>> out;
        for (const auto& row : summarize(recs).rows) out.emplace_back(row.environment, row.average);
        return out;
      },
      py::arg("records"), "records: (environment, run_index, wall_seconds) tuples.");
  m.def("percent_reduction", &percent_reduction, py::arg("baseline_avg"),
        py::arg("candidate_avg"));
  m.def("format_percent", &format_percent, py::arg("percent"));
}
