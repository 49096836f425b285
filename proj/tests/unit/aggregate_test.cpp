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
#include <limits>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "acr/aggregate.hpp"
#include "acr/error.hpp"
#include "acr/random.hpp"
#include "support.hpp"

namespace acr {
namespace {

TEST(AggregateState, HandExamples) {
  AggregateState s(1);
  const std::vector<double> one = {1.0};
  s.update(one);
  EXPECT_EQ(s.g(), 1u);
  EXPECT_EQ(s.mean()[0], 1.0);
  EXPECT_THROW(s.variance_estimate(), Error);

  AggregateState t(1);
  for (double v : {0.0, 2.0}) t.update(std::vector<double>{v});
  EXPECT_EQ(t.mean()[0], 1.0);
  EXPECT_EQ(t.variance_estimate(0), 1.0);

  AggregateState c(2);
  for (int i = 0; i < 7; ++i) c.update(std::vector<double>{3.5, -1.0});
  EXPECT_EQ(c.variance_estimate(), (std::vector<double>{0.0, 0.0}));
}

TEST(AggregateState, Errors) {
  AggregateState s(2);
  try {
    s.update(std::vector<double>{1.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArityMismatch);
  }
  try {
    s.update(std::vector<double>{1.0, std::numeric_limits<double>::quiet_NaN()});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNonFinite);
  }
}

TEST(AggregateState, OrderInvariant) {
  Rng rng(1);
  std::vector<double> values(1000);
  for (auto& v : values) v = 1e6 + rng.normal() * 1e-3;
  AggregateState a(1);
  for (double v : values) a.update(std::vector<double>{v});
  std::mt19937 gen(2);
  for (int rep = 0; rep < 5; ++rep) {
    std::shuffle(values.begin(), values.end(), gen);
    AggregateState b(1);
    for (double v : values) b.update(std::vector<double>{v});
    EXPECT_NEAR(b.mean()[0], a.mean()[0], 1e-12 * std::abs(a.mean()[0]));
    // The inputs carry about 1e-7 relative precision in their deviations.
    EXPECT_NEAR(b.variance_estimate(0), a.variance_estimate(0), 1e-6 * a.variance_estimate(0));
  }
}

TEST(AggregateState, StableAgainstLargeOffsets) {
  // Naive sum-of-squares would lose everything here.
  AggregateState s(1);
  for (double v : {1e9 + 1.0, 1e9 - 1.0}) s.update(std::vector<double>{v});
  EXPECT_EQ(s.variance_estimate(0), 1.0);
}

TEST(AggregateState, RetainsValues) {
  AggregateState s(1, true);
  for (double v : {1.0, 2.0, 4.0}) s.update(std::vector<double>{v});
  ASSERT_EQ(s.values().size(), 3u);
  EXPECT_EQ(s.values()[2][0], 4.0);
}

TEST(AggregateState, VarianceOfTheMeanIsUnbiased) {
  // g = 10,000 iid N(0, 4) values; E[g v_hat] = 4.
  constexpr int kReps = 200;
  constexpr int kG = 10000;
  std::vector<double> scaled;
  for (int r = 0; r < kReps; ++r) {
    Rng rng(7, StreamPurpose::kMonteCarlo, r);
    AggregateState s(1);
    for (int i = 0; i < kG; ++i) s.update(std::vector<double>{2.0 * rng.normal()});
    scaled.push_back(s.variance_estimate(0) * kG);
  }
  const double mean = [&] {
    double m = 0.0;
    for (double v : scaled) m += v;
    return m / kReps;
  }();
  const double se = std::sqrt(sample_variance(scaled) / kReps);
  EXPECT_NEAR(mean, 4.0, 3.0 * se);
}

TEST(SampleVariance, Basic) {
  const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
  EXPECT_DOUBLE_EQ(sample_variance(v), 5.0 / 3.0);
}

TEST(EvalCrossSplit, Means) {
  const Dataset d = testing::small_dataset({1.0, 3.0, 5.0, 7.0});
  const auto stat = testing::block_mean_statistic();
  EXPECT_EQ(eval_cross_split(stat, CrossSplit(4, {{0, 1, 2, 3}}), d)[0], 4.0);
  EXPECT_EQ(eval_cross_split(stat, CrossSplit(4, {{0, 1}}), d)[0], 2.0);
  // k = 2 with block values 1 and 3.
  EXPECT_EQ(eval_cross_split(stat, CrossSplit(4, {{0}, {1}}), d)[0], 2.0);
  const auto c = testing::constant_statistic(2.5, 2);
  EXPECT_EQ(eval_cross_split(c, CrossSplit(4, {{0, 3}, {1, 2}}), d),
            (std::vector<double>{2.5, 2.5}));
}

TEST(ConditionalVariance, ConstantStatisticIsZero) {
  const Dataset d = testing::small_dataset({1, 2, 3, 4, 5, 6});
  const auto v = conditional_variance_estimate(testing::constant_statistic(3.0), {6, 3, 2}, d,
                                               50, 1);
  EXPECT_EQ(v[0], 0.0);
}

TEST(ConditionalVariance, LeaveOneOutIsExactlyZero) {
  SyntheticSpec spec;
  spec.n = 40;
  spec.p = 3;
  const Dataset d = generate_synthetic(spec);
  const SplitPlan loo{d.n(), d.n(), 1};
  EXPECT_EQ(conditional_variance_estimate(testing::centered_mean_statistic(), loo, d, 20, 3)[0],
            0.0);
  EXPECT_EQ(conditional_variance_estimate(cv_mse_statistic({0.05}), loo, d, 5, 3)[0], 0.0);
}

TEST(ConditionalVariance, MatchesScatterOfCrossSplitValues) {
  SyntheticSpec spec;
  spec.n = 60;
  const Dataset d = generate_synthetic(spec);
  const auto stat = testing::centered_mean_statistic();
  const SplitPlan plan{60, 2, 10};
  const auto values =
      sample_cross_split_values(cross_split_statistic(stat), plan, d, 300, 4);
  std::vector<double> first;
  for (const auto& v : values) first.push_back(v[0]);
  EXPECT_DOUBLE_EQ(conditional_variance_estimate(stat, plan, d, 300, 4)[0],
                   sample_variance(first));
  EXPECT_EQ(sample_cross_split_values(cross_split_statistic(stat), plan, d, 300, 4, 3), values);
}

}  // namespace
}  // namespace acr
