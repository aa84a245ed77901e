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

EvalReport rmse(std::span<const double> predictions,
                std::span<const double> observations) {
  if (predictions.size() != observations.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "rmse: " + std::to_string(predictions.size()) +
                    " predictions vs " + std::to_string(observations.size()) +
                    " observations");
  }
  if (predictions.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "rmse: empty input");
  }
  double sse = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (!std::isfinite(predictions[i]) || !std::isfinite(observations[i])) {
      throw Error(ErrorCode::kInvalidArgument,
                  "rmse: non-finite value at index " + std::to_string(i));
    }
    const double e = predictions[i] - observations[i];
    sse += e * e;
  }
  return eval_from_sse(sse, predictions.size());
}

EvalReport eval_from_sse(double sse, std::uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "rmse: empty input");
  if (!(sse >= 0.0) || !std::isfinite(sse)) {
    throw Error(ErrorCode::kInvalidArgument, "rmse: invalid sse");
  }
  return {std::sqrt(sse / static_cast<double>(n)), n, sse};
}

}  // namespace parlin
