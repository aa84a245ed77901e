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

#include <doctest.h>

#include <cmath>
#include <set>

#include "parlin/core.hpp"
#include "parlin/error.hpp"
#include "support.hpp"

using namespace parlin;
using namespace parlin::testing;

namespace {

double objective(const SampleBlock& s, const std::vector<double>& theta) {
  double total = 0.0;
  for (std::size_t r = 0; r < s.size(); ++r) {
    double pred = theta[0];
    for (std::size_t j = 0; j < s.feature_dim(); ++j) pred += theta[j + 1] * s.features(r)[j];
    total += 0.5 * (pred - s.target(r)) * (pred - s.target(r));
  }
  return total;
}

bool partials_close(const GramPartial& p, const GramPartial& q, double rel) {
  if (p.dim != q.dim || p.n != q.n) return false;
  return max_rel_diff(p.a, q.a) <= rel && max_rel_diff(p.b, q.b) <= rel &&
         rel_close(p.sum_yy, q.sum_yy, rel);
}

}  // namespace

TEST_CASE("gram partial of nothing is zero") {
  const GramPartial g = compute_gram_partial(SampleBlock(3));
  CHECK(g == GramPartial::zero(3));
  CHECK(g.n == 0);
  CHECK(g.sum_yy == 0.0);
  for (double v : g.a) CHECK(v == 0.0);
}

TEST_CASE("gram partial of one sample") {
  const std::vector<Sample> samples{{{1.0}, 2.0}};
  const GramPartial g = compute_gram_partial(samples);
  CHECK(g.dim == 2);
  CHECK(g.a == std::vector<double>{1, 1, 1, 1});
  CHECK(g.b == std::vector<double>{2, 2});
  CHECK(g.n == 1);
  CHECK(g.sum_yy == 4.0);
}

TEST_CASE("gram partial matches the dense triple loop") {
  Rng rng(11);
  const SampleBlock s = random_block(rng, 100, 6, 5.0);
  const GramPartial g = compute_gram_partial(s);
  const DenseNormal want = naive_normal(s);
  for (std::size_t i = 0; i < g.dim; ++i) {
    for (std::size_t j = 0; j < g.dim; ++j) CHECK(rel_close(g.at(i, j), want.a[i][j], 1e-12));
    CHECK(rel_close(g.b[i], want.b[i], 1e-12));
    for (std::size_t j = 0; j < g.dim; ++j) CHECK(g.at(i, j) == g.at(j, i));
  }
  CHECK(g.n == 100);
}

TEST_CASE("mixed dimensions are rejected with the offending index") {
  const std::vector<Sample> samples{{{1.0, 2.0}, 0.0}, {{1.0, 2.0}, 0.0}, {{1.0}, 0.0}};
  try {
    compute_gram_partial(samples);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kInvalidArgument);
    CHECK(std::string(e.what()).find("2") != std::string::npos);
  }
  const std::vector<Sample> bad{{{std::nan("")}, 0.0}};
  CHECK_THROWS_AS(compute_gram_partial(bad), Error);
}

TEST_CASE("merge has an identity, recombines partials and commutes") {
  Rng rng(5);
  const SampleBlock s1 = random_block(rng, 1, 3);
  const SampleBlock s2 = random_block(rng, 1, 3);
  SampleBlock both = s1;
  both.extend(s2);

  const GramPartial p = compute_gram_partial(s1);
  CHECK(merge_gram(p, GramPartial::zero(3)) == p);
  CHECK(partials_close(merge_gram(p, compute_gram_partial(s2)), compute_gram_partial(both),
                       1e-12));

  for (int i = 0; i < 200; ++i) {
    const GramPartial x = random_partial(rng, 4);
    const GramPartial y = random_partial(rng, 4);
    const GramPartial z = random_partial(rng, 4);
    CHECK(partials_close(merge_gram(x, y), merge_gram(y, x), 1e-12));
    CHECK(partials_close(merge_gram(merge_gram(x, y), z), merge_gram(x, merge_gram(y, z)),
                         1e-12));
  }
  CHECK_THROWS_AS(merge_gram(GramPartial::zero(2), GramPartial::zero(3)), Error);
}

TEST_CASE("solve recovers an exact line") {
  const std::vector<Sample> samples{{{0.0}, 1.0}, {{1.0}, 3.0}, {{2.0}, 5.0}};
  const NormalSolution sol = solve_normal(compute_gram_partial(samples));
  CHECK(sol.coefficients.intercept == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sol.coefficients.weights[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_FALSE(sol.ridge_fallback);
  CHECK(sol.lambda == 0.0);
}

TEST_CASE("solve on an identity system returns b") {
  GramPartial g = GramPartial::zero(1);
  g.a = {1, 0, 0, 1};
  g.b = {3, 4};
  g.n = 1;
  const NormalSolution sol = solve_normal(g);
  CHECK(sol.coefficients.intercept == 3.0);
  CHECK(sol.coefficients.weights[0] == 4.0);
}

TEST_CASE("solve matches an explicit inverse") {
  Rng rng(99);
  for (int trial = 0; trial < 10; ++trial) {
    const SampleBlock s = random_block(rng, 200, 5, 2.0);
    const GramPartial g = compute_gram_partial(s);
    const DenseNormal dense = naive_normal(s);
    const std::vector<double> want = mat_vec(invert(dense.a), dense.b);
    const std::vector<double> got = solve_normal(g).coefficients.to_vector();
    CHECK(max_rel_diff(got, want) <= 1e-9);
  }
}

TEST_CASE("ridge term is scaled by the trace") {
  GramPartial g = GramPartial::zero(1);
  g.a = {2, 0, 0, 4};
  g.b = {2, 4};
  g.n = 2;
  const NormalSolution sol = solve_normal(g, 0.5);
  // lambda = 0.5 * 6 / 2
  CHECK(sol.lambda == 1.5);
  CHECK(sol.coefficients.intercept == doctest::Approx(2.0 / 3.5));
  CHECK(sol.coefficients.weights[0] == doctest::Approx(4.0 / 5.5));
  CHECK_THROWS_AS(solve_normal(g, -1.0), Error);
}

TEST_CASE("a rank-deficient system falls back to ridge once") {
  // Second feature duplicates the first.
  std::vector<Sample> samples;
  for (int i = 0; i < 10; ++i) samples.push_back({{double(i), double(i)}, 2.0 * i + 1.0});
  const NormalSolution sol = solve_normal(compute_gram_partial(samples));
  CHECK(sol.ridge_fallback);
  CHECK(sol.lambda > 0.0);
  const auto& w = sol.coefficients.weights;
  CHECK(w[0] + w[1] == doctest::Approx(2.0).epsilon(1e-4));

  GramPartial zero = GramPartial::zero(2);
  zero.n = 3;
  try {
    solve_normal(zero);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularSystem);
  }
}

TEST_CASE("gradient vanishes at the least-squares optimum") {
  Rng rng(3);
  const SampleBlock s = random_block(rng, 300, 4, 3.0);
  const GramPartial g = compute_gram_partial(s);
  const ModelCoefficients theta = solve_normal(g).coefficients;
  const GradientPartial grad = compute_gradient_partial(s, theta);
  double b_inf = 0.0;
  for (double v : g.b) b_inf = std::max(b_inf, std::abs(v));
  for (double v : grad.grad_sum) CHECK(std::abs(v) <= 1e-8 * (1.0 + b_inf));
  CHECK(grad.n == 300);
}

TEST_CASE("gradient of one sample") {
  SampleBlock s(1);
  s.append(std::vector<double>{1.0}, 0.0);
  const GradientPartial grad = compute_gradient_partial(s, {1.0, {1.0}});
  CHECK(grad.grad_sum == std::vector<double>{2.0, 2.0});
  CHECK(grad.n == 1);
  CHECK_THROWS_AS(compute_gradient_partial(s, {0.0, {1.0, 2.0}}), Error);
}

TEST_CASE("gradient matches central finite differences") {
  Rng rng(2024);
  const double h = 1e-5;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t d = 1 + rng.below(6);
    const SampleBlock s = random_block(rng, 5 + rng.below(40), d, 2.0);
    std::vector<double> theta(d + 1);
    for (auto& v : theta) v = rng.uniform(-2.0, 2.0);
    const GradientPartial grad =
        compute_gradient_partial(s, ModelCoefficients::from_vector(theta));
    for (std::size_t i = 0; i <= d; ++i) {
      auto up = theta, down = theta;
      up[i] += h;
      down[i] -= h;
      const double fd = (objective(s, up) - objective(s, down)) / (2.0 * h);
      CHECK(std::abs(grad.grad_sum[i] - fd) <= 1e-4 * std::max(1.0, std::abs(fd)));
    }
  }
}

TEST_CASE("gradient step arithmetic") {
  const ModelCoefficients theta{0.5, {1.0, -2.0}};
  CHECK(gd_step(theta, std::vector<double>{0, 0, 0}, 7, 0.1) == theta);
  const ModelCoefficients next =
      gd_step(ModelCoefficients::zero(1), std::vector<double>{1.0, 2.0}, 1, 0.5);
  CHECK(next.intercept == -0.5);
  CHECK(next.weights[0] == -1.0);
  CHECK_THROWS_AS(gd_step(theta, std::vector<double>{0, 0, 0}, 0, 0.1), Error);
}

TEST_CASE("fifty standardized steps approach the closed-form solution") {
  // Independent standardized features: the Hessian is close to the identity so
  // each step contracts the error by about 0.9.
  Rng rng(8);
  const std::size_t d = 8;
  const std::vector<double> w{1.8, 0.9, 5.5, 2.4, 1.1, 4.0, 6.0, -1.0};
  SampleBlock raw(d);
  std::vector<double> x(d);
  for (int r = 0; r < 20000; ++r) {
    double y = 48.0;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = rng.normal(0.0, 1.0);
      y += w[j] * x[j];
    }
    raw.append(x, y + rng.normal(0.0, 13.149));
  }
  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (std::size_t r = 0; r < raw.size(); ++r) {
    for (std::size_t j = 0; j < d; ++j) mean[j] += raw.features(r)[j] / raw.size();
  }
  for (std::size_t r = 0; r < raw.size(); ++r) {
    for (std::size_t j = 0; j < d; ++j) {
      sd[j] += std::pow(raw.features(r)[j] - mean[j], 2) / raw.size();
    }
  }
  SampleBlock s(d);
  double y_mean = 0.0;
  for (std::size_t r = 0; r < raw.size(); ++r) {
    for (std::size_t j = 0; j < d; ++j) x[j] = (raw.features(r)[j] - mean[j]) / std::sqrt(sd[j]);
    s.append(x, raw.target(r));
    y_mean += raw.target(r) / raw.size();
  }

  const std::vector<double> ols = solve_normal(compute_gram_partial(s)).coefficients.to_vector();
  ModelCoefficients theta{y_mean, std::vector<double>(d, 0.0)};
  for (int it = 0; it < 50; ++it) {
    const GradientPartial g = compute_gradient_partial(s, theta);
    theta = gd_step(theta, g.grad_sum, g.n, 0.1);
  }
  double err = 0.0, norm = 0.0;
  const std::vector<double> got = theta.to_vector();
  for (std::size_t i = 0; i <= d; ++i) {
    err = std::max(err, std::abs(got[i] - ols[i]));
    norm = std::max(norm, std::abs(ols[i]));
  }
  CHECK(err <= 1e-3 * (1.0 + norm));
}

TEST_CASE("predict") {
  CHECK(predict(ModelCoefficients::zero(3), std::vector<double>{4, 5, 6}) == 0.0);
  CHECK(predict({1.0, {2.0}}, std::vector<double>{3.0}) == 7.0);
  CHECK_THROWS_AS(predict({1.0, {2.0}}, std::vector<double>{3.0, 1.0}), Error);
  Rng rng(1);
  for (int t = 0; t < 100; ++t) {
    const std::size_t d = 1 + rng.below(10);
    ModelCoefficients theta{rng.uniform(-5, 5), std::vector<double>(d)};
    std::vector<double> x(d);
    double want = theta.intercept;
    for (std::size_t j = 0; j < d; ++j) {
      theta.weights[j] = rng.uniform(-5, 5);
      x[j] = rng.uniform(-5, 5);
    }
    for (std::size_t j = 0; j < d; ++j) want += theta.weights[j] * x[j];
    CHECK(rel_close(predict(theta, x), want, 1e-12));
  }
}

TEST_CASE("rmse") {
  const std::vector<double> same{1.5, -2.0, 3.25};
  CHECK(rmse(same, same).rmse == 0.0);
  const EvalReport r = rmse(std::vector<double>{0, 0}, std::vector<double>{3, 4});
  CHECK(r.sse == 25.0);
  CHECK(r.rmse == doctest::Approx(std::sqrt(12.5)).epsilon(1e-15));
  CHECK(r.n_test == 2);
  CHECK_THROWS_AS(rmse(std::vector<double>{}, std::vector<double>{}), Error);
  CHECK_THROWS_AS(rmse(std::vector<double>{1}, std::vector<double>{1, 2}), Error);
  CHECK_THROWS_AS(rmse(std::vector<double>{INFINITY}, std::vector<double>{1}), Error);

  Rng rng(17);
  for (int t = 0; t < 500; ++t) {
    const std::size_t n = 1 + rng.below(20);
    std::vector<double> p(n), o(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.uniform(-10, 10);
      o[i] = rng.below(3) == 0 ? p[i] : rng.uniform(-10, 10);
    }
    const double e = rmse(p, o).rmse;
    CHECK(e >= 0.0);
    CHECK((e == 0.0) == (p == o));
  }
  // A one-ulp difference is still an error.
  CHECK(rmse(std::vector<double>{1.0}, std::vector<double>{std::nextafter(1.0, 2.0)}).rmse > 0.0);
}

TEST_CASE("distributed SSE reduces to the same rmse") {
  Rng rng(23);
  const SampleBlock s = random_block(rng, 90, 3);
  const ModelCoefficients theta{0.3, {1.0, -1.0, 0.5}};
  std::vector<double> preds;
  for (std::size_t r = 0; r < s.size(); ++r) preds.push_back(predict(theta, s.features(r)));
  const EvalReport direct = rmse(preds, s.targets());
  const SsePartial part = compute_sse_partial(s, theta);
  CHECK(part.n == 90);
  CHECK(eval_from_sse(part.sse, part.n).rmse == doctest::Approx(direct.rmse).epsilon(1e-12));
  CHECK_THROWS_AS(eval_from_sse(1.0, 0), Error);
}

TEST_CASE("split sizes and reproducibility") {
  const SplitIndices s = train_test_split(10, 0.7, 123);
  CHECK(s.train.size() == 7);
  CHECK(s.test.size() == 3);
  std::set<std::uint64_t> all(s.train.begin(), s.train.end());
  all.insert(s.test.begin(), s.test.end());
  CHECK(all.size() == 10);
  CHECK(*all.rbegin() == 9);

  const SplitIndices again = train_test_split(10, 0.7, 123);
  CHECK(again.train == s.train);
  CHECK(again.test == s.test);

  const SplitIndices big = train_test_split(2702218, 0.7, 1);
  CHECK(big.train.size() == 1891552);
  CHECK(big.test.size() == 810666);

  CHECK_THROWS_AS(train_test_split(1, 0.7, 0), Error);
  CHECK_THROWS_AS(train_test_split(10, 0.0, 0), Error);
  CHECK_THROWS_AS(train_test_split(10, 1.0, 0), Error);
  CHECK_THROWS_AS(train_test_split(2, 0.4, 0), Error);
}

TEST_CASE("split is an exact partition for every small n") {
  for (std::uint64_t n = 2; n <= 1000; ++n) {
    for (std::uint64_t seed : {0ULL, 7ULL, 0xdeadbeefULL}) {
      const double ratio = 0.7;
      const auto want_train = static_cast<std::size_t>(std::floor(ratio * double(n)));
      if (want_train == 0 || want_train == n) {
        CHECK_THROWS_AS(train_test_split(n, ratio, seed), Error);
        continue;
      }
      const SplitIndices s = train_test_split(n, ratio, seed);
      REQUIRE(s.train.size() == want_train);
      std::vector<char> seen(n, 0);
      bool ok = true;
      for (auto i : s.train) ok = ok && i < n && !seen[i]++;
      for (auto i : s.test) ok = ok && i < n && !seen[i]++;
      ok = ok && s.train.size() + s.test.size() == n;
      CHECK(ok);
    }
  }
}

TEST_CASE("different seeds shuffle differently") {
  CHECK(train_test_split(1000, 0.7, 1).train != train_test_split(1000, 0.7, 2).train);
}

TEST_CASE("train config validation") {
  TrainConfig c;
  CHECK_NOTHROW(c.validate());
  c.ridge_epsilon = -1.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = {};
  c.mode = TrainMode::kGradientDescent;
  c.iterations = 0;
  CHECK_THROWS_AS(c.validate(), Error);
  c.iterations = 5;
  c.learning_rate = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
}

TEST_CASE("error codes map to exit statuses") {
  CHECK(exit_code_for(ErrorCode::kUsage) == 1);
  CHECK(exit_code_for(ErrorCode::kWorkerFailure) == 2);
  CHECK(exit_code_for(ErrorCode::kSingularSystem) == 2);
  CHECK(exit_code_for(ErrorCode::kTimeout) == 3);
  CHECK(exit_code_for(ErrorCode::kIo) == 4);
}
