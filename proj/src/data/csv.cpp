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

#include <fcntl.h>
#include <sys/mman.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <string>

#include "parlin/data.hpp"
#include "parlin/error.hpp"

namespace parlin {

struct CsvFile::Mapping {
  const char* data = nullptr;
  std::size_t size = 0;

  explicit Mapping(const std::filesystem::path& path) {
    int fd = ::open(path.c_str(), O_RDONLY | O_CLOEXEC);
    if (fd < 0) {
      throw Error(ErrorCode::kIo, "cannot open dataset " + path.string() +
                                      ": " + std::strerror(errno));
    }
    struct stat st {};
    if (::fstat(fd, &st) != 0) {
      ::close(fd);
      throw Error(ErrorCode::kIo, "cannot stat dataset " + path.string());
    }
    size = static_cast<std::size_t>(st.st_size);
    if (size > 0) {
      void* p = ::mmap(nullptr, size, PROT_READ, MAP_PRIVATE, fd, 0);
      if (p == MAP_FAILED) {
        ::close(fd);
        throw Error(ErrorCode::kIo, "cannot map dataset " + path.string());
      }
      ::madvise(p, size, MADV_SEQUENTIAL);
      data = static_cast<const char*>(p);
    }
    ::close(fd);
  }

  ~Mapping() {
    if (data) ::munmap(const_cast<char*>(data), size);
  }

  Mapping(const Mapping&) = delete;
  Mapping& operator=(const Mapping&) = delete;
};

namespace {

// Splits the mapped body into lines; the final line may lack '\n'.
class LineCursor {
 public:
  LineCursor(const char* begin, const char* end) : pos_(begin), end_(end) {}

  bool next(std::string_view& line) {
    if (pos_ >= end_) return false;
    const char* nl = static_cast<const char*>(
        std::memchr(pos_, '\n', static_cast<std::size_t>(end_ - pos_)));
    const char* stop = nl ? nl : end_;
    line = std::string_view(pos_, static_cast<std::size_t>(stop - pos_));
    pos_ = nl ? nl + 1 : end_;
    return true;
  }

  bool skip() {
    if (pos_ >= end_) return false;
    const char* nl = static_cast<const char*>(
        std::memchr(pos_, '\n', static_cast<std::size_t>(end_ - pos_)));
    pos_ = nl ? nl + 1 : end_;
    return true;
  }

 private:
  const char* pos_;
  const char* end_;
};

void parse_row(std::string_view line, std::uint64_t row, const CsvSchema& schema,
               std::vector<double>& cells) {
  const std::size_t n_cols = schema.feature_dim() + 1;
  cells.clear();
  const char* p = line.data();
  const char* end = line.data() + line.size();
  for (std::size_t c = 0; c < n_cols; ++c) {
    const char* comma = static_cast<const char*>(
        std::memchr(p, ',', static_cast<std::size_t>(end - p)));
    const char* cell_end = (c + 1 < n_cols) ? (comma ? comma : end) : end;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(p, cell_end, v);
    if (ec != std::errc() || ptr != cell_end || p == cell_end ||
        !std::isfinite(v)) {
      const std::string column =
          c < schema.feature_dim() ? schema.feature_columns[c]
                                   : schema.target_column;
      throw Error(ErrorCode::kIo,
                  "data row " + std::to_string(row) + " (line " +
                      std::to_string(row + 2) + "), column '" + column +
                      "': non-numeric cell '" +
                      std::string(p, static_cast<std::size_t>(cell_end - p)) +
                      "'");
    }
    cells.push_back(v);
    if (c + 1 < n_cols) {
      if (!comma) {
        throw Error(ErrorCode::kIo, "data row " + std::to_string(row) +
                                        ": expected " + std::to_string(n_cols) +
                                        " cells, found " + std::to_string(c + 1));
      }
      p = comma + 1;
    }
  }
}

}  // namespace

CsvFile::CsvFile(const std::filesystem::path& path, CsvSchema schema)
    : path_(path),
      schema_(std::move(schema)),
      map_(std::make_unique<Mapping>(path)) {
  LineCursor cursor(map_->data, map_->data + map_->size);
  std::string_view header;
  if (!cursor.next(header)) header = {};
  const std::string expected = schema_.header_line();
  if (header != expected) {
    throw Error(ErrorCode::kIo, "header mismatch in " + path.string() +
                                    ": expected '" + expected + "', found '" +
                                    std::string(header) + "'");
  }
  body_offset_ = std::min(header.size() + 1, map_->size);
}

CsvFile::~CsvFile() = default;
CsvFile::CsvFile(CsvFile&&) noexcept = default;
CsvFile& CsvFile::operator=(CsvFile&&) noexcept = default;

std::uint64_t CsvFile::row_count() const {
  const char* begin = map_->data + body_offset_;
  const char* end = map_->data + map_->size;
  if (begin >= end) return 0;
  std::uint64_t rows = static_cast<std::uint64_t>(std::count(begin, end, '\n'));
  if (end[-1] != '\n') ++rows;
  return rows;
}

SampleBlock CsvFile::read_range(std::uint64_t row_start,
                                std::uint64_t row_end) const {
  if (row_start > row_end) {
    throw Error(ErrorCode::kInvalidArgument,
                "row range [" + std::to_string(row_start) + ", " +
                    std::to_string(row_end) + ") is inverted");
  }
  SampleBlock block(schema_.feature_dim());
  block.reserve(row_end - row_start);
  LineCursor cursor(map_->data + body_offset_, map_->data + map_->size);
  std::vector<double> cells;
  std::string_view line;
  for (std::uint64_t row = 0; row < row_end; ++row) {
    const bool ok = row < row_start ? cursor.skip() : cursor.next(line);
    if (!ok) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row range [" + std::to_string(row_start) + ", " +
                      std::to_string(row_end) + ") exceeds the " +
                      std::to_string(row) + " rows of " + path_.string());
    }
    if (row < row_start) continue;
    parse_row(line, row, schema_, cells);
    block.append(std::span<const double>(cells).first(schema_.feature_dim()),
                 cells.back());
  }
  return block;
}

SampleBlock CsvFile::read_rows(std::span<const std::uint64_t> rows) const {
  SampleBlock block(schema_.feature_dim());
  block.reserve(rows.size());
  LineCursor cursor(map_->data + body_offset_, map_->data + map_->size);
  std::vector<double> cells;
  std::string_view line;
  std::uint64_t current = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i] <= rows[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row indices must be strictly increasing");
    }
    for (; current < rows[i]; ++current) {
      if (!cursor.skip()) break;
    }
    if (current != rows[i] || !cursor.next(line)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "row " + std::to_string(rows[i]) + " is beyond the end of " +
                      path_.string());
    }
    ++current;
    parse_row(line, rows[i], schema_, cells);
    block.append(std::span<const double>(cells).first(schema_.feature_dim()),
                 cells.back());
  }
  return block;
}

SampleBlock load_partition(const std::filesystem::path& path,
                           const CsvSchema& schema, const PartitionSpec& part) {
  return CsvFile(path, schema).read_range(part.row_start, part.row_end);
}

std::uint64_t count_rows(const std::filesystem::path& path,
                         const CsvSchema& schema) {
  return CsvFile(path, schema).row_count();
}

}  // namespace parlin
