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
#include <string>

#include "parlin/core.hpp"
#include "parlin/error.hpp"

namespace parlin {

namespace {

bool all_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

}  // namespace

SampleBlock SampleBlock::from_samples(std::span<const Sample> samples) {
  SampleBlock block(samples.empty() ? 0 : samples.front().features.size());
  block.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    if (s.features.size() != block.dim_) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sample " + std::to_string(i) + " has " +
                      std::to_string(s.features.size()) +
                      " features, expected " + std::to_string(block.dim_));
    }
    if (!all_finite(s.features) || !std::isfinite(s.target)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "sample " + std::to_string(i) + " holds a non-finite value");
    }
    block.append(s.features, s.target);
  }
  return block;
}

void SampleBlock::reserve(std::size_t rows) {
  features_.reserve(rows * dim_);
  targets_.reserve(rows);
}

void SampleBlock::append(std::span<const double> features, double target) {
  if (features.size() != dim_) {
    throw Error(ErrorCode::kInvalidArgument,
                "row " + std::to_string(size()) + " has " +
                    std::to_string(features.size()) + " features, expected " +
                    std::to_string(dim_));
  }
  features_.insert(features_.end(), features.begin(), features.end());
  targets_.push_back(target);
}

void SampleBlock::extend(const SampleBlock& other) {
  if (other.dim_ != dim_) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot extend a block of dimension " + std::to_string(dim_) +
                    " with one of dimension " + std::to_string(other.dim_));
  }
  features_.insert(features_.end(), other.features_.begin(),
                   other.features_.end());
  targets_.insert(targets_.end(), other.targets_.begin(), other.targets_.end());
}

Sample SampleBlock::sample(std::size_t row) const {
  auto f = features(row);
  return {std::vector<double>(f.begin(), f.end()), targets_[row]};
}

std::vector<double> ModelCoefficients::to_vector() const {
  std::vector<double> theta;
  theta.reserve(weights.size() + 1);
  theta.push_back(intercept);
  theta.insert(theta.end(), weights.begin(), weights.end());
  return theta;
}

ModelCoefficients ModelCoefficients::from_vector(std::span<const double> theta) {
  if (theta.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "coefficient vector is empty");
  }
  return {theta[0], std::vector<double>(theta.begin() + 1, theta.end())};
}

void TrainConfig::validate() const {
  if (!(ridge_epsilon >= 0.0) || !std::isfinite(ridge_epsilon)) {
    throw Error(ErrorCode::kInvalidArgument, "ridge_epsilon must be >= 0");
  }
  if (mode != TrainMode::kGradientDescent) return;
  if (iterations < 1) {
    throw Error(ErrorCode::kInvalidArgument, "iterations must be >= 1");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be > 0");
  }
}

}  // namespace parlin
