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

// Tests that stay valid at the data-dependent stopping time of run_acr.
//
// Proportion test: a_delta is the share of blocks whose p-value is at most
// delta; rejecting when a_delta >= c has level delta / c by Markov's
// inequality applied to an exchangeable average. e-value test: reject when
// the averaged e-value reaches 1 / alpha.

#pragma once

#include <cstddef>
#include <cstdint>

#include "json.hpp"

#include "acr/acr.hpp"
#include "acr/dataset.hpp"
#include "acr/statistics.hpp"

namespace acr {

struct PValueTestConfig {
  double delta = 0.025;
  double c = 0.5;
  AcrConfig acr;

  double level() const noexcept { return delta / c; }
  void validate() const;
};

struct EValueTestConfig {
  double alpha = 0.05;
  AcrConfig acr;

  void validate() const;
};

struct SeqTestResult {
  bool reject = false;
  double statistic = 0.0;  // a_delta or the averaged e-value
  double threshold = 0.0;  // c or 1 / alpha
  std::size_t g_hat = 0;
  AcrResult acr;
};

// Block statistic 1{p(s, D) <= delta}; throws kPValueRange for p outside [0, 1].
StatisticSpec pvalue_indicator_statistic(StatisticSpec pstat, double delta);
// The same on a whole-collection p-value, such as the cross-fitted DML one.
CrossSplitStatistic pvalue_indicator_statistic(CrossSplitStatistic pstat, double delta);

SeqTestResult run_pvalue_test(const StatisticSpec& pstat, const Dataset& data,
                              const PValueTestConfig& cfg);
SeqTestResult run_pvalue_test(const CrossSplitStatistic& pstat, const Dataset& data,
                              const PValueTestConfig& cfg);
// Throws kNegativeEValue if a block e-value is negative.
SeqTestResult run_evalue_test(const StatisticSpec& estat, const Dataset& data,
                              const EValueTestConfig& cfg);

// One-sided z-test of H0: E[y] <= 0 on the block rows with known sd:
// p = 1 - Phi(sqrt(b) mean_s(y) / sd).
StatisticSpec gaussian_mean_pvalue_statistic(double sd = 1.0);

// Split likelihood ratio for H0: E[y] <= 0 under a Gaussian model. The
// numerator is the N(mean, var) likelihood of the block with both fitted on
// the complement; the denominator is the block likelihood maximized over
// mu <= 0 and sigma^2 > 0, in closed form. log e is clamped at 600.
StatisticSpec universal_inference_evalue_statistic();

// Rejection rate over `runs` fresh null datasets (y iid N(0, 1), n rows).
struct ValidityReport {
  std::size_t runs = 0;
  std::size_t rejections = 0;
  double rate = 0.0;
  double mc_se = 0.0;
  double bound = 0.0;  // delta / c or alpha
  double mean_g_hat = 0.0;
  bool pass = false;  // rate <= bound + 3 mc_se
};

ValidityReport simulate_pvalue_validity(const PValueTestConfig& cfg, std::size_t n,
                                        std::size_t runs, std::uint64_t seed, int threads = 1);
ValidityReport simulate_evalue_validity(const EValueTestConfig& cfg, std::size_t n,
                                        std::size_t runs, std::uint64_t seed, int threads = 1);

nlohmann::json to_json(const ValidityReport& report);

}  // namespace acr
