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

#include <charconv>
#include <cmath>
#include <cstdio>
#include <memory>
#include <string>

#include <zlib.h>

#include "parlin/data.hpp"
#include "parlin/error.hpp"
#include "parlin/random.hpp"

namespace parlin {

namespace {

using FilePtr = std::unique_ptr<std::FILE, int (*)(std::FILE*)>;

constexpr std::size_t kFlushBytes = 1 << 20;

double round_to(double v, double step) { return std::round(v / step) * step; }

// Draws feature j of the flight schema. Columns past the named ones are
// standard normal.
double draw_feature(std::size_t j, Rng& rng) {
  switch (j) {
    case 0:  // day_of_week
      return static_cast<double>(rng.between(1, 7));
    case 1:  // month
      return static_cast<double>(rng.between(1, 12));
    case 2:  // scheduled_departure_hour
      return static_cast<double>(rng.between(5, 23));
    case 3:  // distance_miles: short-haul heavy mixture
      return std::round(rng.uniform() < 0.6 ? rng.uniform(100.0, 800.0)
                                            : rng.uniform(800.0, 2800.0));
    case 4:  // carrier_index
      return static_cast<double>(rng.between(0, 13));
    case 5:  // origin_congestion_score
      return round_to(rng.normal(2.0, 1.0), 0.001);
    case 6:  // weather_severity_score: mostly calm, occasional storms
      return round_to(rng.uniform() < 0.85 ? rng.normal(0.5, 0.25)
                                           : rng.normal(3.0, 1.0),
                      0.001);
    case 7:  // days_to_holiday
      return static_cast<double>(rng.between(0, 60));
    default:
      return round_to(rng.normal(0.0, 1.0), 0.001);
  }
}

class ChecksummedWriter {
 public:
  explicit ChecksummedWriter(const std::filesystem::path& path)
      : path_(path), file_(std::fopen(path.c_str(), "wb"), &std::fclose) {
    if (!file_) {
      throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
    }
    buffer_.reserve(kFlushBytes + 4096);
    crc_ = crc32(0L, Z_NULL, 0);
  }

  std::string& buffer() { return buffer_; }

  void maybe_flush() {
    if (buffer_.size() >= kFlushBytes) flush();
  }

  std::uint32_t finish() {
    flush();
    std::FILE* f = file_.release();
    if (std::fclose(f) != 0) {
      throw Error(ErrorCode::kIo, "error closing " + path_.string());
    }
    return static_cast<std::uint32_t>(crc_);
  }

 private:
  void flush() {
    if (buffer_.empty()) return;
    if (std::fwrite(buffer_.data(), 1, buffer_.size(), file_.get()) !=
        buffer_.size()) {
      throw Error(ErrorCode::kIo, "short write to " + path_.string());
    }
    crc_ = crc32(crc_, reinterpret_cast<const Bytef*>(buffer_.data()),
                 static_cast<uInt>(buffer_.size()));
    buffer_.clear();
  }

  std::filesystem::path path_;
  FilePtr file_;
  std::string buffer_;
  uLong crc_;
};

void append_real(std::string& out, double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, end);
}

}  // namespace

GenerateSummary generate_synthetic(const DatasetSpec& spec,
                                   const std::filesystem::path& output_path) {
  spec.validate();
  const CsvSchema schema = CsvSchema::synthetic(spec.n_features);
  const std::vector<double> weights = spec.resolved_weights();

  ChecksummedWriter writer(output_path);
  std::string& buf = writer.buffer();
  buf += schema.header_line();
  buf += '\n';

  Rng rng(spec.seed);
  std::vector<double> x(spec.n_features);
  for (std::uint64_t row = 0; row < spec.n_records; ++row) {
    double y = spec.true_intercept;
    for (std::size_t j = 0; j < spec.n_features; ++j) {
      x[j] = draw_feature(j, rng);
      y += weights[j] * x[j];
    }
    y += spec.noise_sigma * rng.normal(0.0, 1.0);
    for (double v : x) {
      append_real(buf, v);
      buf += ',';
    }
    append_real(buf, y);
    buf += '\n';
    writer.maybe_flush();
  }

  GenerateSummary summary;
  summary.checksum = writer.finish();
  summary.rows = spec.n_records;
  summary.path = output_path.string();
  summary.seed = spec.seed;
  return summary;
}

std::uint32_t file_crc32(const std::filesystem::path& path) {
  FilePtr f(std::fopen(path.c_str(), "rb"), &std::fclose);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<unsigned char> buf(1 << 20);
  uLong crc = crc32(0L, Z_NULL, 0);
  std::size_t got;
  while ((got = std::fread(buf.data(), 1, buf.size(), f.get())) > 0) {
    crc = crc32(crc, buf.data(), static_cast<uInt>(got));
  }
  if (std::ferror(f.get())) {
    throw Error(ErrorCode::kIo, "read error on " + path.string());
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace parlin
