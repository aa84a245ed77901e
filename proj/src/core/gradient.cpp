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

#include "parlin/core.hpp"
#include "parlin/error.hpp"

namespace parlin {

namespace {

void check_dims(std::size_t feature_dim, const ModelCoefficients& theta) {
  if (theta.weights.size() != feature_dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "model has " + std::to_string(theta.weights.size()) +
                    " weights but samples have " +
                    std::to_string(feature_dim) + " features");
  }
}

double linear(const ModelCoefficients& theta, std::span<const double> x) {
  double acc = theta.intercept;
  for (std::size_t j = 0; j < x.size(); ++j) acc += theta.weights[j] * x[j];
  return acc;
}

}  // namespace

GradientPartial compute_gradient_partial(const SampleBlock& samples,
                                         const ModelCoefficients& theta) {
  check_dims(samples.feature_dim(), theta);
  const std::size_t d = samples.feature_dim();
  GradientPartial out{std::vector<double>(d + 1, 0.0), samples.size()};
  for (std::size_t row = 0; row < samples.size(); ++row) {
    auto x = samples.features(row);
    const double r = linear(theta, x) - samples.target(row);
    out.grad_sum[0] += r;
    for (std::size_t j = 0; j < d; ++j) out.grad_sum[j + 1] += r * x[j];
  }
  return out;
}

ModelCoefficients gd_step(const ModelCoefficients& theta,
                          std::span<const double> grad_sum,
                          std::uint64_t n_total, double learning_rate) {
  if (n_total < 1) {
    throw Error(ErrorCode::kInvalidArgument, "gd_step needs n_total >= 1");
  }
  if (grad_sum.size() != theta.weights.size() + 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "gradient has " + std::to_string(grad_sum.size()) +
                    " entries, expected " +
                    std::to_string(theta.weights.size() + 1));
  }
  const double scale = learning_rate / static_cast<double>(n_total);
  ModelCoefficients next = theta;
  next.intercept -= scale * grad_sum[0];
  for (std::size_t j = 0; j < next.weights.size(); ++j) {
    next.weights[j] -= scale * grad_sum[j + 1];
  }
  return next;
}

double predict(const ModelCoefficients& theta,
               std::span<const double> features) {
  check_dims(features.size(), theta);
  return linear(theta, features);
}

SsePartial compute_sse_partial(const SampleBlock& samples,
                               const ModelCoefficients& theta) {
  check_dims(samples.feature_dim(), theta);
  SsePartial out{0.0, samples.size()};
  for (std::size_t row = 0; row < samples.size(); ++row) {
    const double r = linear(theta, samples.features(row)) - samples.target(row);
    out.sse += r * r;
  }
  return out;
}

}  // namespace parlin
