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

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace parlin {

/// One record: d real-valued features and the observed delay in minutes.
struct Sample {
  std::vector<double> features;
  double target = 0.0;
};

/// A sequence of samples sharing one feature dimension, stored row-major.
///
/// This is the form every numerical routine consumes; the row order is the
/// accumulation order.
class SampleBlock {
 public:
  explicit SampleBlock(std::size_t feature_dim = 0) : dim_(feature_dim) {}

  /// Throws kInvalidArgument naming the first sample whose dimension differs
  /// from samples[0], or that holds a non-finite value.
  static SampleBlock from_samples(std::span<const Sample> samples);

  void reserve(std::size_t rows);
  void append(std::span<const double> features, double target);
  /// Appends all rows of `other`; dimensions must agree.
  void extend(const SampleBlock& other);

  std::size_t feature_dim() const { return dim_; }
  std::size_t size() const { return targets_.size(); }
  bool empty() const { return targets_.empty(); }

  std::span<const double> features(std::size_t row) const {
    return {features_.data() + row * dim_, dim_};
  }
  double target(std::size_t row) const { return targets_[row]; }
  std::span<const double> targets() const { return targets_; }

  Sample sample(std::size_t row) const;

  bool operator==(const SampleBlock&) const = default;

 private:
  std::size_t dim_;
  std::vector<double> features_;
  std::vector<double> targets_;
};

/// Per-partition sufficient statistics for least squares over x' = [1, x].
struct GramPartial {
  std::size_t dim = 1;      // d + 1
  std::vector<double> a;    // dim x dim, row-major, symmetric
  std::vector<double> b;    // dim
  std::uint64_t n = 0;
  double sum_yy = 0.0;

  static GramPartial zero(std::size_t feature_dim);

  std::size_t feature_dim() const { return dim - 1; }
  double at(std::size_t i, std::size_t j) const { return a[i * dim + j]; }
  double trace() const;

  bool operator==(const GramPartial&) const = default;
};

struct ModelCoefficients {
  double intercept = 0.0;
  std::vector<double> weights;

  static ModelCoefficients zero(std::size_t feature_dim) {
    return {0.0, std::vector<double>(feature_dim, 0.0)};
  }
  /// Packs as [intercept, weights...].
  std::vector<double> to_vector() const;
  static ModelCoefficients from_vector(std::span<const double> theta);

  bool operator==(const ModelCoefficients&) const = default;
};

enum class TrainMode { kNormalEquations, kGradientDescent };

struct TrainConfig {
  TrainMode mode = TrainMode::kNormalEquations;
  std::uint32_t iterations = 50;
  double learning_rate = 0.1;
  double ridge_epsilon = 0.0;
  std::uint64_t seed = 0;

  /// Throws kInvalidArgument when a gradient-descent setting is out of range.
  void validate() const;
};

struct EvalReport {
  double rmse = 0.0;
  std::uint64_t n_test = 0;
  double sse = 0.0;
};

struct NormalSolution {
  ModelCoefficients coefficients;
  double lambda = 0.0;          // ridge term actually applied
  bool ridge_fallback = false;  // true when the unregularized factorization failed
};

struct GradientPartial {
  std::vector<double> grad_sum;
  std::uint64_t n = 0;
};

struct SsePartial {
  double sse = 0.0;
  std::uint64_t n = 0;
};

struct SplitIndices {
  std::vector<std::uint64_t> train;
  std::vector<std::uint64_t> test;
};

GramPartial compute_gram_partial(const SampleBlock& samples);
GramPartial compute_gram_partial(std::span<const Sample> samples);

GramPartial merge_gram(const GramPartial& p, const GramPartial& q);

/// Solves (a + lambda I) theta = b with lambda = ridge_epsilon * trace(a) / (d+1).
///
/// With ridge_epsilon == 0 a failed factorization is retried once with
/// ridge_epsilon = 1e-8 and flagged; a second failure is kSingularSystem.
NormalSolution solve_normal(const GramPartial& g, double ridge_epsilon = 0.0);

/// Un-normalized gradient of 0.5 * sum (x'.theta - y)^2.
GradientPartial compute_gradient_partial(const SampleBlock& samples,
                                         const ModelCoefficients& theta);

ModelCoefficients gd_step(const ModelCoefficients& theta,
                          std::span<const double> grad_sum,
                          std::uint64_t n_total, double learning_rate);

double predict(const ModelCoefficients& theta, std::span<const double> features);

EvalReport rmse(std::span<const double> predictions,
                std::span<const double> observations);

/// Squared error of `theta` over a block, for distributed evaluation.
SsePartial compute_sse_partial(const SampleBlock& samples,
                               const ModelCoefficients& theta);

/// rmse = sqrt(sse / n) from already reduced sums.
EvalReport eval_from_sse(double sse, std::uint64_t n);

/// Seeded shuffle of [0, n_records); the first floor(ratio * n) are train.
SplitIndices train_test_split(std::uint64_t n_records, double ratio,
                              std::uint64_t seed);

inline constexpr double kRidgeFallbackEpsilon = 1e-8;

}  // namespace parlin
