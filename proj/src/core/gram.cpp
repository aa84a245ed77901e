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

#include "parlin/core.hpp"
#include "parlin/error.hpp"

namespace parlin {

GramPartial GramPartial::zero(std::size_t feature_dim) {
  GramPartial g;
  g.dim = feature_dim + 1;
  g.a.assign(g.dim * g.dim, 0.0);
  g.b.assign(g.dim, 0.0);
  return g;
}

double GramPartial::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < dim; ++i) t += a[i * dim + i];
  return t;
}

GramPartial compute_gram_partial(const SampleBlock& samples) {
  GramPartial g = GramPartial::zero(samples.feature_dim());
  const std::size_t dim = g.dim;
  std::vector<double> x(dim);
  x[0] = 1.0;

  for (std::size_t row = 0; row < samples.size(); ++row) {
    auto f = samples.features(row);
    std::copy(f.begin(), f.end(), x.begin() + 1);
    const double y = samples.target(row);
    // Upper triangle only; mirrored below so a is bitwise symmetric.
    for (std::size_t i = 0; i < dim; ++i) {
      double* a_row = g.a.data() + i * dim;
      const double xi = x[i];
      for (std::size_t j = i; j < dim; ++j) a_row[j] += xi * x[j];
      g.b[i] += y * xi;
    }
    g.sum_yy += y * y;
  }
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < i; ++j) g.a[i * dim + j] = g.a[j * dim + i];
  }
  g.n = samples.size();
  return g;
}

GramPartial compute_gram_partial(std::span<const Sample> samples) {
  return compute_gram_partial(SampleBlock::from_samples(samples));
}

GramPartial merge_gram(const GramPartial& p, const GramPartial& q) {
  if (p.dim != q.dim) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot merge Gram partials of dimension " +
                    std::to_string(p.dim) + " and " + std::to_string(q.dim));
  }
  GramPartial out = p;
  for (std::size_t i = 0; i < out.a.size(); ++i) out.a[i] += q.a[i];
  for (std::size_t i = 0; i < out.b.size(); ++i) out.b[i] += q.b[i];
  out.n += q.n;
  out.sum_yy += q.sum_yy;
  return out;
}

}  // namespace parlin
