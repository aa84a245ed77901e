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

#include <spdlog/spdlog.h>

#include "parlin/cluster.hpp"
#include "parlin/error.hpp"

namespace parlin {

namespace {

GramPartial reduce(const std::vector<GramPartial>& partials) {
  if (partials.empty()) throw Error(ErrorCode::kInvalidArgument, "no partials to reduce");
  GramPartial total = partials.front();
  for (std::size_t i = 1; i < partials.size(); ++i) total = merge_gram(total, partials[i]);
  return total;
}

GradientPartial reduce(const std::vector<GradientPartial>& partials) {
  GradientPartial total = partials.at(0);
  for (std::size_t i = 1; i < partials.size(); ++i) {
    if (partials[i].grad_sum.size() != total.grad_sum.size()) {
      throw Error(ErrorCode::kProtocol, "gradient partials disagree in dimension");
    }
    for (std::size_t j = 0; j < total.grad_sum.size(); ++j) {
      total.grad_sum[j] += partials[i].grad_sum[j];
    }
    total.n += partials[i].n;
  }
  return total;
}

// theta_raw: w_j = v_j / s_j, c = v_0 - sum v_j m_j / s_j.
ModelCoefficients to_raw(const ModelCoefficients& standardized, const ColumnStats& stats) {
  ModelCoefficients raw = standardized;
  for (std::size_t j = 0; j < raw.weights.size(); ++j) {
    raw.weights[j] = standardized.weights[j] / stats.stddev[j];
    raw.intercept -= raw.weights[j] * stats.mean[j];
  }
  return raw;
}

// Residuals agree in both spaces, so the standardized gradient is
// g0 and (g_j - m_j g0) / s_j.
void standardize_gradient(std::vector<double>& grad, const ColumnStats& stats) {
  for (std::size_t j = 0; j + 1 < grad.size(); ++j) {
    grad[j + 1] = (grad[j + 1] - stats.mean[j] * grad[0]) / stats.stddev[j];
  }
}

}  // namespace

TrainOutcome train_and_evaluate(ComputeBackend& backend, const TrainConfig& config,
                                const CsvSchema& schema) {
  config.validate();
  TrainOutcome out;
  const GramPartial gram = reduce(backend.gram(Scope::kTrain));
  if (gram.n == 0) throw Error(ErrorCode::kInvalidArgument, "training split is empty");

  if (config.mode == TrainMode::kNormalEquations) {
    NormalSolution sol = solve_normal(gram, config.ridge_epsilon);
    if (sol.ridge_fallback) {
      spdlog::warn("normal equations were singular; solved with ridge lambda {}", sol.lambda);
    }
    out.coefficients = std::move(sol.coefficients);
    out.ridge_fallback = sol.ridge_fallback;
  } else {
    const ColumnStats stats = column_stats_from_gram(gram, schema);
    ModelCoefficients theta = ModelCoefficients::zero(gram.feature_dim());
    theta.intercept = gram.b[0] / static_cast<double>(gram.n);
    for (std::uint32_t it = 0; it < config.iterations; ++it) {
      GradientPartial total = reduce(backend.gradient(to_raw(theta, stats)));
      standardize_gradient(total.grad_sum, stats);
      theta = gd_step(theta, total.grad_sum, total.n, config.learning_rate);
      spdlog::debug("gd iteration {} done", it + 1);
    }
    out.coefficients = to_raw(theta, stats);
  }

  double sse = 0.0;
  std::uint64_t n = 0;
  for (const SsePartial& p : backend.sse(out.coefficients)) {
    sse += p.sse;
    n += p.n;
  }
  out.eval = eval_from_sse(sse, n);
  return out;
}

}  // namespace parlin
