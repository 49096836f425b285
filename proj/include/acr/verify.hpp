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

// Monte Carlo checks of the aggregation procedure at a fixed dataset.
//
// Every measurement is a pure function of its inputs and master seed, and
// reports its own Monte Carlo standard error. Replications fan out over
// `threads` workers with per-replication substreams.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "acr/acr.hpp"
#include "acr/dataset.hpp"
#include "acr/statistics.hpp"

namespace acr {

// One checked claim. pass <=> lower <= estimate <= upper.
struct VerifyReport {
  std::string claim;
  std::string target;
  double estimate = 0.0;
  double mc_se = 0.0;
  std::size_t replications = 0;
  double lower = 0.0;
  double upper = 0.0;
  bool pass = false;
  double wall_time_seconds = 0.0;
  nlohmann::json details = nlohmann::json::object();
};

VerifyReport make_verify_report(std::string claim, std::string target, double estimate,
                                double mc_se, std::size_t replications, double lower,
                                double upper, double wall_time_seconds,
                                nlohmann::json details = nlohmann::json::object());
nlohmann::json to_json(const VerifyReport& report);

// ---------------------------------------------------------------------------

struct ReproducibilityMeasurement {
  std::size_t pairs = 0;
  double error = 0.0;  // all components differ by less than xi fails
  double mc_se = 0.0;
  std::vector<double> marginal;  // per component
  std::vector<double> marginal_se;
  double mean_g_hat = 0.0;  // over all runs, of g_hat_max
  std::size_t capped_runs = 0;
  // Mean over runs of the aggregate, per component (consistency check).
  std::vector<double> mean_aggregate;
};

// Pairs of independent runs at fixed D; pair i uses seeds derived from
// (cfg.seed, kPairA, i) and (cfg.seed, kPairB, i). An error is a pair with
// |a - a'| >= xi.
ReproducibilityMeasurement measure_reproducibility_error(const StatisticSpec& stat,
                                                         const Dataset& data,
                                                         const AcrConfig& cfg,
                                                         std::size_t pairs, int threads = 1);

struct ScalingRow {
  std::size_t k = 0;
  double v1k = 0.0;
  double k_v1k = 0.0;
  double se = 0.0;  // of k_v1k
};

struct VarianceScalingMeasurement {
  std::vector<ScalingRow> rows;
  double ratio = 0.0;  // max / min of k v_{1,k}; 1 when all are 0
};

// Complete cross-splits, b = n / k, for every k in k_list.
VarianceScalingMeasurement measure_variance_scaling(const StatisticSpec& stat,
                                                    const Dataset& data,
                                                    const std::vector<std::size_t>& k_list,
                                                    std::size_t reps, std::uint64_t seed,
                                                    int threads = 1);

struct TotalSplitsRow {
  std::size_t k = 0;
  double mean_g_hat = 0.0;
  double mean_m = 0.0;  // mean of g_hat k
  double se_m = 0.0;
};

struct TotalSplitsMeasurement {
  std::vector<TotalSplitsRow> rows;
  double ratio = 0.0;  // max / min of mean_m
};

TotalSplitsMeasurement measure_total_splits(const StatisticSpec& stat, const Dataset& data,
                                            double xi, double beta,
                                            const std::vector<std::size_t>& k_list,
                                            std::size_t runs, std::uint64_t seed,
                                            std::size_t g_init = 10, int threads = 1);

struct StoppingAccuracyMeasurement {
  std::size_t runs = 0;
  double v1k = 0.0;
  std::size_t g_star = 0;
  double q05 = 0.0;  // quantiles of g_hat / g_star - 1
  double q50 = 0.0;
  double q95 = 0.0;
  double median_abs = 0.0;  // median of |g_hat / g_star - 1|
  double median_abs_se = 0.0;
  double mean_g_hat = 0.0;
};

// v_{1,k}(D) is first estimated from v1k_reps single cross-splits.
StoppingAccuracyMeasurement measure_stopping_accuracy(const StatisticSpec& stat,
                                                      const Dataset& data,
                                                      const AcrConfig& cfg, std::size_t runs,
                                                      std::size_t v1k_reps, int threads = 1);

// sup_x |F_n(x) - Phi(x)| of the studentized values (sample mean and sd;
// a zero sd studentizes every value to 0).
double kolmogorov_distance(std::vector<double> values);

struct NormalApproxMeasurement {
  std::size_t reps = 0;
  double d_k = 0.0;
};

NormalApproxMeasurement measure_normal_approx(const StatisticSpec& stat, const Dataset& data,
                                              std::size_t k, std::size_t reps,
                                              std::uint64_t seed, int threads = 1);

struct VhatMeasurement {
  std::size_t reps = 0;
  std::size_t g = 0;
  double mean_vhat = 0.0;
  double var_aggregate = 0.0;  // Monte Carlo variance of a(R_{g,k}, D)
  double ratio = 0.0;          // mean_vhat / var_aggregate; 1 when both are 0
  double ratio_se = 0.0;
};

VhatMeasurement measure_vhat_unbiasedness(const StatisticSpec& stat, const Dataset& data,
                                          std::size_t g, std::size_t k, std::size_t reps,
                                          std::uint64_t seed, int threads = 1);

struct JensenMeasurement {
  std::size_t runs = 0;
  double a_bar = 0.0;       // mean over abar_reps single cross-splits
  double stopped = 0.0;     // mean of (a(R_{g_hat,k}) - a_bar)^2
  double stopped_se = 0.0;
  double single = 0.0;      // mean of (a(r) - a_bar)^2
  double single_se = 0.0;
  double combined_se = 0.0;
  double mean_aggregate = 0.0;
  double mean_aggregate_se = 0.0;
  double mean_g_hat = 0.0;
  bool holds = false;  // stopped <= single + 3 combined_se
};

// Scalar statistics only.
JensenMeasurement measure_sequential_jensen(const StatisticSpec& stat, const Dataset& data,
                                            const AcrConfig& cfg, std::size_t runs,
                                            std::size_t abar_reps, int threads = 1);

// ---------------------------------------------------------------------------
// Suites run by `acr verify`.

struct VerifyOptions {
  std::uint64_t seed = 0;
  SyntheticSpec data;  // the fixed D; with_treatment is ignored
  double lambda_fraction = 0.1;  // lasso penalty as a fraction of lambda_max(D)
  double beta = 0.05;
  std::size_t k = 10;
  std::size_t g_init = 10;
  double target_g = 600.0;  // xi is tuned so that g* is about this
  std::vector<std::size_t> k_list = {2, 5, 10};
  std::size_t pairs = 2000;
  std::size_t reps = 2000;
  std::size_t runs = 1000;
  std::size_t v1k_reps = 10000;
  std::size_t vhat_reps = 5000;
  std::size_t split_runs = 200;
  int threads = 1;
};

inline const std::vector<std::string> kVerifySuites = {"reproducibility", "scaling", "splits",
                                                       "stopping",        "normal",  "vhat"};

struct SuiteOutput {
  std::vector<VerifyReport> reports;
  std::map<std::string, std::string> csv;  // plot-ready tables by name
};

// The scalar lasso cross-validated risk used by the suites, at
// lambda_fraction * lambda_max(D).
StatisticSpec verify_statistic(const Dataset& data, double lambda_fraction);

// xi with g*(v1k, xi, beta) close to target_g.
double tune_xi(double v1k, double beta, double target_g);

// suite is one of kVerifySuites or "all".
SuiteOutput run_verify_suite(const std::string& suite, const VerifyOptions& options);

}  // namespace acr
