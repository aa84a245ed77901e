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

#include "parlin/data.hpp"
#include "parlin/error.hpp"

namespace parlin {

std::vector<PartitionSpec> make_partitions(std::uint64_t n_rows,
                                           std::uint32_t k) {
  if (k < 1) {
    throw Error(ErrorCode::kInvalidArgument, "partition count must be >= 1");
  }
  if (n_rows < k) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot split " + std::to_string(n_rows) + " rows into " +
                    std::to_string(k) + " partitions");
  }
  const std::uint64_t base = n_rows / k;
  const std::uint64_t extra = n_rows % k;
  std::vector<PartitionSpec> parts;
  parts.reserve(k);
  std::uint64_t start = 0;
  for (std::uint32_t i = 0; i < k; ++i) {
    const std::uint64_t len = base + (i < extra ? 1 : 0);
    parts.push_back({i, start, start + len});
    start += len;
  }
  return parts;
}

}  // namespace parlin
