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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <unistd.h>

#include "parlin/core.hpp"
#include "parlin/data.hpp"
#include "parlin/random.hpp"

namespace parlin::testing {

class TempDir {
 public:
  TempDir() {
    static std::uint64_t counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("parlin-test-" + std::to_string(::getpid()) + "-" + std::to_string(++counter));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline bool rel_close(double got, double want, double rel) {
  return std::abs(got - want) <= rel * std::max(1.0, std::abs(want));
}

inline double max_rel_diff(std::span<const double> got, std::span<const double> want) {
  double worst = 0.0;
  for (std::size_t i = 0; i < got.size(); ++i) {
    worst = std::max(worst, std::abs(got[i] - want[i]) / std::max(1.0, std::abs(want[i])));
  }
  return worst;
}

inline SampleBlock random_block(Rng& rng, std::size_t rows, std::size_t d,
                                double scale = 1.0) {
  SampleBlock block(d);
  std::vector<double> x(d);
  for (std::size_t r = 0; r < rows; ++r) {
    for (auto& v : x) v = rng.uniform(-scale, scale);
    block.append(x, rng.uniform(-scale, scale) * 3.0);
  }
  return block;
}

// Dense X'^T X' and X'^T y by the textbook triple loop over an explicit design
// matrix, independent of the accumulation scheme under test.
struct DenseNormal {
  std::vector<std::vector<double>> a;
  std::vector<double> b;
};

inline DenseNormal naive_normal(const SampleBlock& s) {
  const std::size_t p = s.feature_dim() + 1;
  std::vector<std::vector<double>> x(s.size(), std::vector<double>(p));
  for (std::size_t r = 0; r < s.size(); ++r) {
    x[r][0] = 1.0;
    for (std::size_t j = 0; j < s.feature_dim(); ++j) x[r][j + 1] = s.features(r)[j];
  }
  DenseNormal out{std::vector<std::vector<double>>(p, std::vector<double>(p, 0.0)),
                  std::vector<double>(p, 0.0)};
  for (std::size_t i = 0; i < p; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      for (std::size_t r = 0; r < s.size(); ++r) out.a[i][j] += x[r][i] * x[r][j];
    }
    for (std::size_t r = 0; r < s.size(); ++r) out.b[i] += x[r][i] * s.target(r);
  }
  return out;
}

// Gauss-Jordan inverse with partial pivoting.
inline std::vector<std::vector<double>> invert(std::vector<std::vector<double>> m) {
  const std::size_t n = m.size();
  std::vector<std::vector<double>> inv(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
    }
    std::swap(m[c], m[piv]);
    std::swap(inv[c], inv[piv]);
    const double d = m[c][c];
    for (std::size_t j = 0; j < n; ++j) {
      m[c][j] /= d;
      inv[c][j] /= d;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = m[r][c];
      for (std::size_t j = 0; j < n; ++j) {
        m[r][j] -= f * m[c][j];
        inv[r][j] -= f * inv[c][j];
      }
    }
  }
  return inv;
}

inline std::vector<double> mat_vec(const std::vector<std::vector<double>>& m,
                                   const std::vector<double>& v) {
  std::vector<double> out(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
  }
  return out;
}

inline GramPartial random_partial(Rng& rng, std::size_t d) {
  return compute_gram_partial(random_block(rng, 1 + rng.below(20), d, 10.0));
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<double> all_coefficients(const ModelCoefficients& c) { return c.to_vector(); }

}  // namespace parlin::testing
