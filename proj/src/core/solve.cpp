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
#include <optional>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "parlin/core.hpp"
#include "parlin/error.hpp"

namespace parlin {

namespace {

// A pivot this small relative to its original diagonal means the column is
// numerically a combination of the earlier ones.
constexpr double kRelativePivotFloor = 1e-13;

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::optional<Eigen::VectorXd> try_cholesky_solve(const GramPartial& g,
                                                  double lambda) {
  const auto dim = static_cast<Eigen::Index>(g.dim);
  Eigen::MatrixXd a =
      Eigen::Map<const RowMajorMatrix>(g.a.data(), dim, dim);
  a.diagonal().array() += lambda;

  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) return std::nullopt;

  const Eigen::MatrixXd& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double pivot = l(i, i) * l(i, i);
    if (!(pivot > kRelativePivotFloor * a(i, i))) return std::nullopt;
  }

  Eigen::VectorXd theta =
      llt.solve(Eigen::Map<const Eigen::VectorXd>(g.b.data(), dim));
  if (!theta.allFinite()) return std::nullopt;
  return theta;
}

}  // namespace

NormalSolution solve_normal(const GramPartial& g, double ridge_epsilon) {
  if (g.n < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot solve normal equations from an empty partial");
  }
  if (!(ridge_epsilon >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ridge_epsilon must be >= 0");
  }
  const double scale = g.trace() / static_cast<double>(g.dim);

  NormalSolution out;
  out.lambda = ridge_epsilon * scale;
  auto theta = try_cholesky_solve(g, out.lambda);
  if (!theta && ridge_epsilon == 0.0) {
    out.lambda = kRidgeFallbackEpsilon * scale;
    out.ridge_fallback = true;
    theta = try_cholesky_solve(g, out.lambda);
  }
  if (!theta) {
    throw Error(ErrorCode::kSingularSystem,
                "normal equations are singular (lambda = " +
                    std::to_string(out.lambda) + ")");
  }
  out.coefficients = ModelCoefficients::from_vector(
      std::span<const double>(theta->data(), g.dim));
  return out;
}

}  // namespace parlin
