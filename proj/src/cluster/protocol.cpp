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

#include <cstdint>
#include <limits>
#include <string>

#include <nlohmann/json.hpp>

#include "parlin/error.hpp"
#include "parlin/protocol.hpp"

namespace parlin {

using nlohmann::json;

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

template <class T>
T unsigned_at(const json& j, const char* key) {
  const json& v = j.at(key);
  if (!v.is_number_unsigned() || v.get<std::uint64_t>() > std::numeric_limits<T>::max()) {
    throw Error(ErrorCode::kProtocol, std::string("field '") + key +
                                          "' must be an unsigned integer in range");
  }
  return v.get<T>();
}

json to_json(const GramPartial& g) {
  return {{"dim", g.dim}, {"a", g.a}, {"b", g.b}, {"n", g.n},
          {"sum_yy", g.sum_yy}};
}

json to_json(const ModelCoefficients& c) {
  return {{"intercept", c.intercept}, {"weights", c.weights}};
}

json to_json(const PartitionSpec& p) {
  return {{"partition_id", p.partition_id},
          {"row_start", p.row_start},
          {"row_end", p.row_end}};
}

GramPartial gram_from_json(const json& j) {
  GramPartial g;
  g.dim = unsigned_at<std::size_t>(j, "dim");
  g.a = j.at("a").get<std::vector<double>>();
  g.b = j.at("b").get<std::vector<double>>();
  g.n = unsigned_at<std::uint64_t>(j, "n");
  g.sum_yy = j.at("sum_yy").get<double>();
  if (g.dim < 1 || g.a.size() != g.dim * g.dim || g.b.size() != g.dim) {
    throw Error(ErrorCode::kProtocol, "Gram partial has inconsistent sizes");
  }
  return g;
}

ModelCoefficients coefficients_from_json(const json& j) {
  return {j.at("intercept").get<double>(),
          j.at("weights").get<std::vector<double>>()};
}

PartitionSpec partition_from_json(const json& j) {
  PartitionSpec p{unsigned_at<std::uint32_t>(j, "partition_id"),
                  unsigned_at<std::uint64_t>(j, "row_start"),
                  unsigned_at<std::uint64_t>(j, "row_end")};
  if (p.row_start > p.row_end) {
    throw Error(ErrorCode::kProtocol, "partition range is inverted");
  }
  return p;
}

CsvSchema schema_from_json(const json& j) {
  auto cols = j.get<std::vector<std::string>>();
  if (cols.size() < 2) {
    throw Error(ErrorCode::kProtocol, "schema needs features and a target");
  }
  CsvSchema schema;
  schema.target_column = cols.back();
  cols.pop_back();
  schema.feature_columns = std::move(cols);
  return schema;
}

std::string_view scope_name(Scope s) {
  return s == Scope::kTrain ? "train" : "test";
}

Scope scope_from_json(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "train") return Scope::kTrain;
  if (s == "test") return Scope::kTest;
  throw Error(ErrorCode::kProtocol, "unknown scope '" + s + "'");
}

json message_to_json(const Message& m) {
  json body = std::visit(
      Overloaded{
          [](const msg::Hello& h) -> json {
            return {{"worker_rank", h.worker_rank},
                    {"protocol_version", h.protocol_version}};
          },
          [](const msg::HelloAck& h) -> json { return {{"job_id", h.job_id}}; },
          [](const msg::Assign& a) -> json {
            return {{"dataset_path", a.dataset_path},
                    {"schema", a.schema.columns()},
                    {"partition", to_json(a.partition)},
                    {"test_partition", to_json(a.test_partition)},
                    {"split_seed", a.split_seed},
                    {"split_ratio", a.split_ratio}};
          },
          [](const msg::ComputeGram& c) -> json {
            return {{"scope", scope_name(c.scope)}};
          },
          [](const msg::GramResult& r) -> json {
            return {{"partial", to_json(r.partial)}};
          },
          [](const msg::ComputeGradient& c) -> json {
            return {{"theta", to_json(c.theta)}};
          },
          [](const msg::GradientResult& r) -> json {
            return {{"grad_sum", r.grad_sum}, {"n", r.n}};
          },
          [](const msg::ComputeSse& c) -> json {
            return {{"theta", to_json(c.theta)}};
          },
          [](const msg::SseResult& r) -> json {
            return {{"sse", r.sse}, {"n", r.n}};
          },
          [](const msg::Done&) -> json { return json::object(); },
          [](const msg::Fail& f) -> json { return {{"reason", f.reason}}; },
          [](const msg::Shutdown&) -> json { return json::object(); },
      },
      m);
  body["kind"] = kind_name(m);
  return body;
}

Message message_from_object(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "Hello") {
    return msg::Hello{unsigned_at<std::uint32_t>(j, "worker_rank"),
                      unsigned_at<std::uint32_t>(j, "protocol_version")};
  }
  if (kind == "HelloAck") return msg::HelloAck{j.at("job_id").get<std::string>()};
  if (kind == "Assign") {
    return msg::Assign{j.at("dataset_path").get<std::string>(),
                       schema_from_json(j.at("schema")),
                       partition_from_json(j.at("partition")),
                       partition_from_json(j.at("test_partition")),
                       unsigned_at<std::uint64_t>(j, "split_seed"),
                       j.at("split_ratio").get<double>()};
  }
  if (kind == "ComputeGram") return msg::ComputeGram{scope_from_json(j.at("scope"))};
  if (kind == "GramResult") return msg::GramResult{gram_from_json(j.at("partial"))};
  if (kind == "ComputeGradient") {
    return msg::ComputeGradient{coefficients_from_json(j.at("theta"))};
  }
  if (kind == "GradientResult") {
    return msg::GradientResult{j.at("grad_sum").get<std::vector<double>>(),
                               unsigned_at<std::uint64_t>(j, "n")};
  }
  if (kind == "ComputeSse") return msg::ComputeSse{coefficients_from_json(j.at("theta"))};
  if (kind == "SseResult") {
    return msg::SseResult{j.at("sse").get<double>(), unsigned_at<std::uint64_t>(j, "n")};
  }
  if (kind == "Done") return msg::Done{};
  if (kind == "Fail") return msg::Fail{j.at("reason").get<std::string>()};
  if (kind == "Shutdown") return msg::Shutdown{};
  throw Error(ErrorCode::kProtocol, "unknown message kind '" + kind + "'");
}

}  // namespace

std::string_view kind_name(const Message& m) {
  return std::visit(
      Overloaded{
          [](const msg::Hello&) { return "Hello"; },
          [](const msg::HelloAck&) { return "HelloAck"; },
          [](const msg::Assign&) { return "Assign"; },
          [](const msg::ComputeGram&) { return "ComputeGram"; },
          [](const msg::GramResult&) { return "GramResult"; },
          [](const msg::ComputeGradient&) { return "ComputeGradient"; },
          [](const msg::GradientResult&) { return "GradientResult"; },
          [](const msg::ComputeSse&) { return "ComputeSse"; },
          [](const msg::SseResult&) { return "SseResult"; },
          [](const msg::Done&) { return "Done"; },
          [](const msg::Fail&) { return "Fail"; },
          [](const msg::Shutdown&) { return "Shutdown"; },
      },
      m);
}

std::string to_canonical_json(const Message& m) {
  // nlohmann::json objects are std::map-backed, so keys serialize sorted.
  return message_to_json(m).dump(-1, ' ', false,
                                 json::error_handler_t::strict);
}

Message message_from_json(std::string_view payload) {
  try {
    const json j = json::parse(payload);
    if (!j.is_object()) {
      throw Error(ErrorCode::kProtocol, "frame payload is not a JSON object");
    }
    return message_from_object(j);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProtocol,
                std::string("malformed message payload: ") + e.what());
  }
}

std::vector<std::uint8_t> encode_frame(const Message& m) {
  const std::string payload = to_canonical_json(m);
  if (payload.size() > kMaxPayloadBytes) {
    throw Error(ErrorCode::kProtocol,
                "payload of " + std::to_string(payload.size()) +
                    " bytes exceeds the frame limit");
  }
  const auto len = static_cast<std::uint32_t>(payload.size());
  std::vector<std::uint8_t> frame;
  frame.reserve(kFrameHeaderBytes + payload.size());
  frame.push_back(static_cast<std::uint8_t>(len >> 24));
  frame.push_back(static_cast<std::uint8_t>(len >> 16));
  frame.push_back(static_cast<std::uint8_t>(len >> 8));
  frame.push_back(static_cast<std::uint8_t>(len));
  frame.insert(frame.end(), payload.begin(), payload.end());
  return frame;
}

std::uint32_t decode_frame_length(std::span<const std::uint8_t, 4> header) {
  const std::uint32_t len = (std::uint32_t{header[0]} << 24) |
                            (std::uint32_t{header[1]} << 16) |
                            (std::uint32_t{header[2]} << 8) |
                            std::uint32_t{header[3]};
  if (len == 0) throw Error(ErrorCode::kProtocol, "malformed frame: empty payload");
  if (len > kMaxPayloadBytes) {
    throw Error(ErrorCode::kProtocol,
                "malformed frame: payload length " + std::to_string(len) +
                    " exceeds the limit");
  }
  return len;
}

Message decode_frame(std::span<const std::uint8_t> frame) {
  if (frame.size() < kFrameHeaderBytes) {
    throw Error(ErrorCode::kProtocol, "malformed frame: truncated header");
  }
  const std::uint32_t len = decode_frame_length(frame.first<4>());
  if (frame.size() != kFrameHeaderBytes + len) {
    throw Error(ErrorCode::kProtocol,
                "malformed frame: header announces " + std::to_string(len) +
                    " payload bytes, buffer holds " +
                    std::to_string(frame.size() - kFrameHeaderBytes));
  }
  const auto* p = reinterpret_cast<const char*>(frame.data() + kFrameHeaderBytes);
  return message_from_json(std::string_view(p, len));
}

}  // namespace parlin
