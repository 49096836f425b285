// Copyright 2026 The acr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "acr/error.hpp"
#include "acr/lasso.hpp"
#include "acr/random.hpp"
#include "lasso_oracle.hpp"
#include "support.hpp"

namespace acr {
namespace {

using testing::Instance;
using testing::kkt_residual;
using testing::objective;
using testing::proximal_gradient;
using testing::random_instance;

TEST(Lasso, MatchesProximalGradientOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Instance in = random_instance(seed, 20, 3);
    const double lmax = LassoProblem(in.x, in.m, in.p, in.y).lambda_max();
    for (double frac : {0.01, 0.1, 0.3, 0.7}) {
      const double lambda = frac * lmax;
      const LassoFit fit = fit_lasso(in.x, in.m, in.p, in.y, lambda);
      ASSERT_TRUE(fit.converged);
      const auto [b0, coef] = proximal_gradient(in, lambda);
      EXPECT_LE(objective(in, fit.intercept, fit.coefficients, lambda),
                objective(in, b0, coef, lambda) + 1e-8);
      EXPECT_LE(kkt_residual(in, fit, lambda), 1e-6);
    }
  }
}

TEST(Lasso, SoftThresholdOnOneStandardizedCovariate) {
  // x has mean 0 and (1/n) variance 1; (1/n) sum x y = 0.8.
  const std::vector<double> x = {1, -1, 1, -1};
  const std::vector<double> y = {0.8 + 0.2, -0.8 + 0.2, 0.8 - 0.2, -0.8 - 0.2};
  // Stationarity: -2 (0.8 - beta) + lambda = 0.
  EXPECT_NEAR(fit_lasso(x, 4, 1, y, 0.3).coefficients[0], 0.65, 1e-9);
  // Half the usual (1/(2n)) scaling: lambda 0.6 here is 0.3 there.
  EXPECT_NEAR(fit_lasso(x, 4, 1, y, 0.6).coefficients[0], 0.5, 1e-9);
  // One-dimensional grid search oracle on the objective.
  const double lambda = 0.3;
  double best = 0.0, best_obj = 1e300;
  for (int i = -20000; i <= 20000; ++i) {
    const double b = i * 1e-4;
    double rss = 0.0;
    for (int r = 0; r < 4; ++r) rss += (y[r] - b * x[r]) * (y[r] - b * x[r]);
    const double obj = rss / 4 + lambda * std::abs(b);
    if (obj < best_obj) {
      best_obj = obj;
      best = b;
    }
  }
  EXPECT_NEAR(fit_lasso(x, 4, 1, y, lambda).coefficients[0], best, 1e-4);
}

TEST(Lasso, NullModelAtLambdaMax) {
  const Instance in = random_instance(4, 30, 5);
  const LassoProblem prob(in.x, in.m, in.p, in.y);
  const LassoFit fit = prob.fit(prob.lambda_max());
  double ybar = 0.0;
  for (double v : in.y) ybar += v;
  ybar /= in.m;
  for (double c : fit.coefficients) EXPECT_EQ(c, 0.0);
  EXPECT_NEAR(fit.intercept, ybar, 1e-12);
  const LassoFit below = prob.fit(0.99 * prob.lambda_max());
  EXPECT_GT(below.support_size(), 0u);
  EXPECT_EQ(prob.fit(10 * prob.lambda_max()).support_size(), 0u);
}

TEST(Lasso, LambdaMaxIsTwiceTheLargestCovariance) {
  const Instance in = random_instance(5, 25, 4);
  std::vector<double> mean, sd;
  standardization(in, mean, sd);
  double ybar = 0.0;
  for (double v : in.y) ybar += v;
  ybar /= in.m;
  double expected = 0.0;
  for (std::size_t j = 0; j < in.p; ++j) {
    double c = 0.0;
    for (std::size_t i = 0; i < in.m; ++i) {
      c += (in.x[i * in.p + j] - mean[j]) / sd[j] * (in.y[i] - ybar);
    }
    expected = std::max(expected, std::abs(2.0 * c / in.m));
  }
  EXPECT_NEAR(LassoProblem(in.x, in.m, in.p, in.y).lambda_max(), expected, 1e-12);
}

TEST(Lasso, ConstantColumnIsDropped) {
  Instance in = random_instance(6, 20, 3);
  for (std::size_t i = 0; i < in.m; ++i) in.x[i * 3 + 1] = 4.0;
  const LassoFit fit = fit_lasso(in.x, in.m, in.p, in.y, 0.01);
  EXPECT_EQ(fit.coefficients[1], 0.0);
  EXPECT_EQ(fit.scale[1], 0.0);
  EXPECT_NE(fit.coefficients[0], 0.0);
}

TEST(Lasso, ReportsNonConvergence) {
  const Instance in = random_instance(7, 20, 3);
  LassoOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-15;
  EXPECT_FALSE(fit_lasso(in.x, in.m, in.p, in.y, 1e-4, opts).converged);
}

TEST(Lasso, WarmStartedPathMatchesColdFits) {
  const Instance in = random_instance(8, 40, 5);
  const LassoProblem prob(in.x, in.m, in.p, in.y);
  const auto grid = lambda_grid(prob.lambda_max(), 8, 0.01);
  const auto path = prob.fit_path(grid);
  for (std::size_t l = 0; l < grid.size(); ++l) {
    const LassoFit cold = prob.fit(grid[l]);
    EXPECT_NEAR(objective(in, path[l].intercept, path[l].coefficients, grid[l]),
                objective(in, cold.intercept, cold.coefficients, grid[l]), 1e-9);
  }
}

TEST(Lasso, SubtractedMomentsGiveTheSameProblem) {
  SyntheticSpec spec;
  spec.n = 60;
  spec.p = 4;
  const Dataset d = generate_synthetic(spec);
  std::vector<Index> all(d.n()), part, rest;
  for (Index i = 0; i < d.n(); ++i) {
    all[i] = i;
    (i % 4 == 1 ? part : rest).push_back(i);
  }
  const std::vector<double> shift(d.p(), 0.25);
  const auto total = lasso_moments(d, all, d.y(), shift, 0.5);
  const auto held = lasso_moments(d, part, d.y(), shift, 0.5);
  const LassoFit a = LassoProblem(subtract_moments(total, held)).fit(0.05);
  const LassoFit b = LassoProblem(d, rest).fit(0.05);
  for (std::size_t j = 0; j < d.p(); ++j) EXPECT_NEAR(a.coefficients[j], b.coefficients[j], 1e-9);
  EXPECT_NEAR(a.intercept, b.intercept, 1e-9);

  LassoMomentCache cache;
  auto eligible = [&] { return all; };
  const LassoFit c = cache.problem(d, 0, rest, d.y(), eligible).fit(0.05);
  for (std::size_t j = 0; j < d.p(); ++j) EXPECT_NEAR(c.coefficients[j], b.coefficients[j], 1e-9);
}

TEST(LambdaGrid, LogSpaced) {
  const auto g = lambda_grid(1.0, 3, 0.01);
  ASSERT_EQ(g.size(), 3u);
  EXPECT_DOUBLE_EQ(g[0], 1.0);
  EXPECT_NEAR(g[1], 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(g[2], 0.01);
  const auto h = lambda_grid(3.7, 50, 0.001);
  for (std::size_t i = 1; i < h.size(); ++i) EXPECT_LT(h[i], h[i - 1]);
}

TEST(LambdaGrid, FirstPointIsTheNullFit) {
  SyntheticSpec spec;
  spec.n = 80;
  const Dataset d = generate_synthetic(spec);
  std::vector<Index> rows(d.n());
  for (Index i = 0; i < d.n(); ++i) rows[i] = i;
  const auto grid = lambda_grid(d, 10, 0.01);
  EXPECT_EQ(LassoProblem(d, rows).fit(grid[0]).support_size(), 0u);
}

TEST(LambdaGrid, DegenerateDesign) {
  const Dataset d(std::vector<double>{1, 2, 3}, std::nullopt,
                  std::vector<std::vector<double>>{{5, 5, 5}});
  try {
    lambda_grid(d, 5, 0.1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateDesign);
  }
}

}  // namespace
}  // namespace acr
