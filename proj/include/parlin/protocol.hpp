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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "parlin/core.hpp"
#include "parlin/data.hpp"

namespace parlin {

inline constexpr std::uint32_t kProtocolVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 4;
inline constexpr std::size_t kMaxPayloadBytes = std::size_t{64} << 20;

enum class Scope { kTrain, kTest };

namespace msg {

struct Hello {
  std::uint32_t worker_rank = 0;
  std::uint32_t protocol_version = kProtocolVersion;
  bool operator==(const Hello&) const = default;
};
struct HelloAck {
  std::string job_id;
  bool operator==(const HelloAck&) const = default;
};
// `partition` ranges over positions of the shuffled train index list,
// `test_partition` over the test list; workers rebuild both lists from
// (row count, split_ratio, split_seed).
struct Assign {
  std::string dataset_path;
  CsvSchema schema;
  PartitionSpec partition;
  PartitionSpec test_partition;
  std::uint64_t split_seed = 0;
  double split_ratio = 0.7;
  bool operator==(const Assign&) const = default;
};
struct ComputeGram {
  Scope scope = Scope::kTrain;
  bool operator==(const ComputeGram&) const = default;
};
struct GramResult {
  GramPartial partial;
  bool operator==(const GramResult&) const = default;
};
struct ComputeGradient {
  ModelCoefficients theta;
  bool operator==(const ComputeGradient&) const = default;
};
struct GradientResult {
  std::vector<double> grad_sum;
  std::uint64_t n = 0;
  bool operator==(const GradientResult&) const = default;
};
struct ComputeSse {
  ModelCoefficients theta;
  bool operator==(const ComputeSse&) const = default;
};
struct SseResult {
  double sse = 0.0;
  std::uint64_t n = 0;
  bool operator==(const SseResult&) const = default;
};
struct Done {
  bool operator==(const Done&) const = default;
};
struct Fail {
  std::string reason;
  bool operator==(const Fail&) const = default;
};
struct Shutdown {
  bool operator==(const Shutdown&) const = default;
};

}  // namespace msg

using Message =
    std::variant<msg::Hello, msg::HelloAck, msg::Assign, msg::ComputeGram,
                 msg::GramResult, msg::ComputeGradient, msg::GradientResult,
                 msg::ComputeSse, msg::SseResult, msg::Done, msg::Fail,
                 msg::Shutdown>;

std::string_view kind_name(const Message& m);

/// UTF-8 JSON with lexicographically sorted keys and no whitespace.
std::string to_canonical_json(const Message& m);
/// Throws kProtocol on malformed JSON, unknown kinds or missing fields.
Message message_from_json(std::string_view payload);

/// 4-byte big-endian payload length followed by the canonical JSON payload.
std::vector<std::uint8_t> encode_frame(const Message& m);
/// Decodes one complete frame; the buffer must hold exactly one frame.
Message decode_frame(std::span<const std::uint8_t> frame);

/// Reads the big-endian length prefix and validates it against the limit.
std::uint32_t decode_frame_length(std::span<const std::uint8_t, 4> header);

}  // namespace parlin
