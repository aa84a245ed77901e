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
#include <numeric>
#include <string>
#include <utility>

#include "parlin/core.hpp"
#include "parlin/error.hpp"
#include "parlin/random.hpp"

namespace parlin {

SplitIndices train_test_split(std::uint64_t n_records, double ratio,
                              std::uint64_t seed) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "split ratio must lie in (0, 1), got " + std::to_string(ratio));
  }
  const auto n_train = static_cast<std::uint64_t>(
      std::floor(ratio * static_cast<double>(n_records)));
  if (n_train == 0 || n_train == n_records) {
    throw Error(ErrorCode::kInvalidArgument,
                "degenerate split of " + std::to_string(n_records) +
                    " records at ratio " + std::to_string(ratio));
  }

  std::vector<std::uint64_t> perm(n_records);
  std::iota(perm.begin(), perm.end(), std::uint64_t{0});
  Rng rng(seed);
  for (std::uint64_t i = n_records - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.below(i + 1)]);
  }

  SplitIndices out;
  out.test.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
                  perm.end());
  perm.resize(n_train);
  out.train = std::move(perm);
  return out;
}

}  // namespace parlin
