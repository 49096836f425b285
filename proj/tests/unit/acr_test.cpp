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

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "acr/acr.hpp"
#include "acr/error.hpp"
#include "acr/random.hpp"
#include "support.hpp"

namespace acr {
namespace {

double reference_cv(double xi, double beta) {
  const double z = boost::math::quantile(boost::math::normal(), 1.0 - beta / 2.0);
  return 0.5 * (xi / z) * (xi / z);
}

TEST(CriticalValue, ReferenceValues) {
  const double cv = critical_value(0.01, 0.05);
  EXPECT_NEAR(cv, 1.3016e-5, 1e-9);
  EXPECT_NEAR(cv, reference_cv(0.01, 0.05), 1e-9 * cv);
  EXPECT_NEAR(critical_value(0.3, 0.5), 0.5 * std::pow(0.3 / 0.6744897501960817, 2), 1e-15);
  for (double xi : {1e-4, 0.01, 0.7, 3.0}) {
    EXPECT_EQ(critical_value(2 * xi, 0.05), 4 * critical_value(xi, 0.05));
  }
  EXPECT_THROW(critical_value(0.0, 0.05), Error);
  EXPECT_THROW(critical_value(0.1, 1.0), Error);
}

TEST(OracleGStar, Examples) {
  EXPECT_EQ(oracle_g_star(0.5, 0.1, 0.05, 10), 385u);
  EXPECT_EQ(oracle_g_star(0.0, 0.1, 0.05, 10), 10u);
  EXPECT_EQ(oracle_g_star(1e-9, 0.1, 0.05, 10), 10u);
  for (double v : {0.01, 0.3, 2.0, 17.0}) {
    for (double xi : {0.05, 0.1, 0.2}) {
      const auto g = oracle_g_star(v, xi, 0.05, 2);
      const auto half = oracle_g_star(v, xi / 2, 0.05, 2);
      if (g > 2) {
        EXPECT_GE(half, 4 * g - 4);
        EXPECT_LE(half, 4 * g);
      }
      // Smallest g with v / g <= cv.
      const double cv = critical_value(xi, 0.05);
      EXPECT_LE(v / static_cast<double>(g), cv);
      if (g > 2) EXPECT_GT(v / static_cast<double>(g - 1), cv);
    }
  }
}

AcrConfig config(double xi, std::uint64_t seed = 1) {
  AcrConfig cfg;
  cfg.xi = {xi};
  cfg.k = 5;
  cfg.seed = seed;
  return cfg;
}

TEST(RunAcr, ConstantStatisticStopsAtBurnIn) {
  const Dataset d = testing::small_dataset({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  const AcrResult r = run_acr(testing::constant_statistic(2.5), d, config(0.1));
  EXPECT_EQ(r.g_hat[0], 10u);
  EXPECT_EQ(r.g_hat_max, 10u);
  EXPECT_EQ(r.aggregate[0], 2.5);
  EXPECT_EQ(r.v_hat[0], 0.0);
  EXPECT_EQ(r.residual_se[0], 0.0);
  EXPECT_TRUE(r.early_stop_warning);
  EXPECT_FALSE(r.stopped_by_cap);
}

TEST(RunSequential, MedianStoppingTimeNearOracle) {
  // Per-collection values iid N(0, v) with g* = 400.
  const double v = 2.0;
  const double beta = 0.05;
  const double z = boost::math::quantile(boost::math::normal(), 1 - beta / 2);
  const double xi = z * std::sqrt(2.0 * v / 400.0);
  std::vector<std::size_t> g_hat;
  for (int run = 0; run < 1000; ++run) {
    Rng rng(3, StreamPurpose::kMonteCarlo, run);
    const CollectionSampler sample = [&] {
      return std::vector<double>{std::sqrt(v) * rng.normal()};
    };
    g_hat.push_back(run_sequential(sample, 1, {xi}, beta, 10, 1'000'000).g_hat[0]);
  }
  std::nth_element(g_hat.begin(), g_hat.begin() + 500, g_hat.end());
  EXPECT_GE(g_hat[500], 320u);
  EXPECT_LE(g_hat[500], 480u);
}

TEST(RunSequential, StoppingCorrectness) {
  for (int run = 0; run < 50; ++run) {
    Rng rng(4, StreamPurpose::kMonteCarlo, run);
    const CollectionSampler sample = [&] {
      return std::vector<double>{rng.normal(), 3.0 * rng.normal(), 0.1 * rng.normal()};
    };
    const std::vector<double> xi = {0.2, 0.3, 0.05};
    const AcrResult r = run_sequential(sample, 3, xi, 0.1, 10, 1'000'000, true);
    EXPECT_FALSE(r.stopped_by_cap);
    EXPECT_EQ(r.g_hat_max, *std::max_element(r.g_hat.begin(), r.g_hat.end()));
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_GE(r.g_hat[c], 10u);
      EXPECT_LE(r.v_hat[c], r.cv[c]);
      EXPECT_LE(r.residual_se[c], std::sqrt(r.cv[c]));
      // The trace agrees with the result, and the rule did not fire earlier.
      for (const auto& row : r.trace) {
        if (row.component != c || row.g < 10 || row.g > r.g_hat[c]) continue;
        if (row.g == r.g_hat[c]) {
          EXPECT_EQ(row.running_vhat, r.v_hat[c]);
          EXPECT_EQ(row.running_mean, r.aggregate[c]);
        } else {
          EXPECT_GT(row.running_vhat, r.cv[c]);
        }
      }
    }
  }
}

TEST(RunSequential, CapStopsEverything) {
  Rng rng(5);
  const CollectionSampler sample = [&] { return std::vector<double>{rng.normal()}; };
  const AcrResult r = run_sequential(sample, 1, {1e-6}, 0.05, 10, 50);
  EXPECT_TRUE(r.stopped_by_cap);
  EXPECT_TRUE(r.capped[0]);
  EXPECT_EQ(r.g_hat[0], 50u);
}

TEST(RunSequential, ArityMismatch) {
  const CollectionSampler sample = [] { return std::vector<double>{1.0}; };
  try {
    run_sequential(sample, 1, {0.1, 0.2}, 0.05, 10, 100);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kArityMismatch);
  }
}

TEST(RunAcr, ConfigValidation) {
  const Dataset d = testing::small_dataset({1, 2, 3, 4});
  const auto stat = testing::block_mean_statistic();
  AcrConfig cfg = config(0.1);
  cfg.k = 2;
  cfg.g_init = 1;
  EXPECT_THROW(run_acr(stat, d, cfg), Error);
  cfg.g_init = 10;
  cfg.g_max = 5;
  EXPECT_THROW(run_acr(stat, d, cfg), Error);
  cfg.g_max = 100;
  cfg.beta = 1.0;
  EXPECT_THROW(run_acr(stat, d, cfg), Error);
  cfg.beta = 0.05;
  cfg.xi = {-1.0};
  EXPECT_THROW(run_acr(stat, d, cfg), Error);
}

TEST(RunAcr, DeterministicAndThreadIndependent) {
  SyntheticSpec spec;
  spec.n = 100;
  spec.p = 5;
  const Dataset d = generate_synthetic(spec);
  const auto stat = cv_mse_statistic(lambda_grid(d, 3, 0.05));
  AcrConfig cfg;
  cfg.xi = {0.02, 0.02, 0.02};
  cfg.k = 5;
  cfg.seed = 42;
  cfg.keep_trace = true;
  const AcrResult a = run_acr(stat, d, cfg);
  cfg.threads = 4;
  const AcrResult b = run_acr(stat, d, cfg);
  EXPECT_EQ(a.aggregate, b.aggregate);
  EXPECT_EQ(a.g_hat, b.g_hat);
  EXPECT_EQ(a.v_hat, b.v_hat);
  EXPECT_EQ(trace_csv(a.trace), trace_csv(b.trace));
  cfg.seed = 43;
  EXPECT_NE(run_acr(stat, d, cfg).aggregate, a.aggregate);
}

TEST(RunAcr, SplitCallbackSeesEveryDraw) {
  const Dataset d = testing::small_dataset({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  std::vector<std::size_t> seen;
  AcrConfig cfg = config(1e-3);
  cfg.g_max = 30;
  cfg.on_split = [&](std::size_t g, const CrossSplit& s) {
    EXPECT_EQ(s.k(), 5u);
    seen.push_back(g);
  };
  const AcrResult r = run_acr(testing::block_mean_statistic(), d, cfg);
  ASSERT_EQ(seen.size(), r.g_hat_max);
  for (std::size_t i = 0; i < seen.size(); ++i) EXPECT_EQ(seen[i], i + 1);
}

TEST(Report, JsonRoundTrip) {
  Rng rng(6);
  const CollectionSampler sample = [&] {
    return std::vector<double>{rng.normal(), 1.0 / 3.0 + 1e-3 * rng.normal()};
  };
  const AcrResult r = run_sequential(sample, 2, {0.3, 1e-3}, 0.05, 10, 1'000'000);
  ReportContext ctx;
  ctx.statistic = "test";
  ctx.xi = {0.3, 1e-3};
  ctx.k = 10;
  ctx.b = 50;
  ctx.g_init = 10;
  ctx.seed = 0xFFFFFFFFFFFFFFFFull;
  ctx.wall_time_seconds = 0.25;
  const nlohmann::json j = report(r, ctx);
  EXPECT_EQ(j.at("schema_version"), kSchemaVersion);
  EXPECT_EQ(j.at("seed").get<std::uint64_t>(), ctx.seed);
  const AcrResult back = result_from_report(nlohmann::json::parse(j.dump()));
  EXPECT_EQ(back.aggregate, r.aggregate);
  EXPECT_EQ(back.g_hat, r.g_hat);
  EXPECT_EQ(back.g_hat_max, r.g_hat_max);
  EXPECT_EQ(back.v_hat, r.v_hat);
  EXPECT_EQ(back.cv, r.cv);
  EXPECT_EQ(back.residual_se, r.residual_se);
  EXPECT_EQ(back.capped, r.capped);
  EXPECT_EQ(back.stopped_by_cap, r.stopped_by_cap);
  EXPECT_EQ(back.early_stop_warning, r.early_stop_warning);
  EXPECT_EQ(report(back, ctx), j);
}

TEST(Report, TraceCsv) {
  std::vector<TraceRow> rows = {{1, 0, 0.5, 0.5, std::nan("")}, {2, 0, 1.5, 1.0, 0.25}};
  EXPECT_EQ(trace_csv(rows), "g,component,value,running_mean,running_vhat\n"
                             "1,1,0.5,0.5,\n"
                             "2,1,1.5,1.0,0.25\n");
}

// Differences c_l (1 + 0.01 e) sharing one noise term e per block.
StatisticSpec proportional_differences(std::vector<double> c) {
  StatisticSpec s;
  s.arity = c.size();
  s.eval = [c](IndexSpan block, IndexSpan, const Dataset& d) {
    double e = 0.0;
    for (Index i : block) e += d.y()[i];
    e /= static_cast<double>(block.size());
    std::vector<double> out;
    for (double cl : c) out.push_back(cl * (1.0 + 0.01 * e));
    return out;
  };
  return s;
}

TEST(SelectTolerances, FloorWhenNothingPassesTheScreen) {
  SyntheticSpec spec;
  spec.n = 50;
  const Dataset d = generate_synthetic(spec);
  const auto sel = select_tolerances(testing::constant_statistic(0.0, 4), d,
                                     SplitPlan::cross(50, 5), 20, 1e-4, 0.2, 1);
  EXPECT_EQ(sel.xi, std::vector<double>(4, 1e-4));
  EXPECT_TRUE(sel.no_component_passed);
  EXPECT_FALSE(sel.reference.has_value());
}

TEST(SelectTolerances, ProportionalScaling) {
  SyntheticSpec spec;
  spec.n = 50;
  const Dataset d = generate_synthetic(spec);
  const auto sel = select_tolerances(proportional_differences({10.0, 1.0, -1.0}), d,
                                     SplitPlan::cross(50, 5), 20, 1e-4, 0.2, 2);
  ASSERT_TRUE(sel.reference.has_value());
  EXPECT_EQ(*sel.reference, 1u);
  EXPECT_NEAR(sel.xi[0], 10 * 1e-4, 1e-15);
  EXPECT_EQ(sel.xi[1], 1e-4);
  EXPECT_EQ(sel.xi[2], 1e-4);
  EXPECT_FALSE(sel.no_component_passed);
  EXPECT_GT(sel.q[2], 0.5);
  EXPECT_LT(sel.q[1], 1e-6);
}

TEST(SelectTolerances, LassoPilotOrdering) {
  // Weak signal, many covariates: small penalties overfit and lose to the
  // null model, near-optimal ones do not.
  SyntheticSpec spec;
  spec.n = 100;
  spec.p = 40;
  spec.sparsity = 2;
  spec.theta_scale = 0.4;
  spec.seed = 5;
  const Dataset d = generate_synthetic(spec);
  auto lambdas = lambda_grid(d, 15, 0.01);
  std::reverse(lambdas.begin(), lambdas.end());
  const auto diff = mse_difference_statistic(cv_mse_statistic(lambdas));
  const auto sel = select_tolerances(diff, d, SplitPlan::cross(100, 10), 20, 1e-4, 0.2, 3);
  ASSERT_TRUE(sel.reference.has_value());
  const std::size_t ref = *sel.reference;
  // Everything above the reference penalty gets the floor.
  for (std::size_t l = ref; l < sel.xi.size(); ++l) EXPECT_EQ(sel.xi[l], 1e-4);
  // The smallest penalty overfits: clearly worse than the null model, it
  // gets a larger tolerance.
  EXPECT_LT(sel.q[0], 0.2);
  EXPECT_GT(sel.xi[0], 1e-4);
  // Among the components with positive pilot means, xi follows the mean.
  for (std::size_t a = 0; a < sel.xi.size(); ++a) {
    for (std::size_t b = 0; b < sel.xi.size(); ++b) {
      if (sel.pilot_mean[a] > sel.pilot_mean[b] && sel.pilot_mean[b] > 0) {
        EXPECT_GE(sel.xi[a], sel.xi[b]);
      }
    }
  }
}

}  // namespace
}  // namespace acr
