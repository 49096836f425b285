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

// Monte Carlo estimates of sample and split stability.
//
// The data generating distribution is unknown, so an independent copy D' is
// approximated by bootstrap draws from the rows of D.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "json.hpp"

#include "acr/dataset.hpp"
#include "acr/statistics.hpp"

namespace acr {

struct StabilityEstimate {
  double estimate = 0.0;
  double mc_se = 0.0;
  std::size_t reps = 0;
};

struct SplitStabilityEstimate {
  double estimate = 0.0;
  double mc_se = 0.0;
  std::size_t reps = 0;
  std::size_t candidates = 0;  // blocks per replication (all of them when exact)
  bool exact = false;
};

struct StabilityOptions {
  std::size_t b = 0;
  std::vector<std::size_t> q_grid;  // empty: {1, ceil(b/2), b-1}
  std::vector<int> r_grid = {2, 4};
  std::size_t reps = 500;
  std::uint64_t seed = 0;
  int threads = 1;
  std::size_t component = 0;
  // Split stability: candidate blocks per replication, and the largest
  // number of size-b blocks for which the exact max is computed instead.
  std::size_t zeta_candidates = 64;
  double zeta_exact_limit = 5000;
};

struct StabilityReport {
  std::map<std::pair<int, std::size_t>, StabilityEstimate> sigma_train;  // (r, q)
  std::map<int, StabilityEstimate> sigma_valid;
  std::map<int, double> sigma_max;  // max(sigma_valid(r), sigma_train(r, 1))
  std::map<int, SplitStabilityEstimate> zeta;
  std::size_t reps = 0;
};

// Training stability sigma_train^{(r,q)} of a linear statistic: the mean of
// |psi(D_I, eta(D_s~)) - psi(D_I, eta(D~^(q)_s~))|^r. q = 0 gives 0.
StabilityEstimate estimate_sample_stability(const StatisticSpec& stat, const Dataset& data,
                                            std::size_t b, std::size_t q, int r,
                                            std::size_t reps, std::uint64_t seed,
                                            int threads = 1, std::size_t component = 0);

// Validation stability sigma_valid^{(r)}: the mean of
// |psi(D_I, eta(D_s~)) - psi(D'_I, eta(D_s~))|^r.
StabilityEstimate estimate_validation_stability(const StatisticSpec& stat, const Dataset& data,
                                                std::size_t b, int r, std::size_t reps,
                                                std::uint64_t seed, int threads = 1,
                                                std::size_t component = 0);

// Split stability zeta^{(r)} at fixed D: (max_s T(s, D) - min_s T(s, D))^r over
// all size-b blocks when there are at most `exact_limit` of them, otherwise
// averaged over `reps` replications of `candidates` random blocks (a lower
// bound in expectation).
SplitStabilityEstimate estimate_split_stability(const StatisticSpec& stat, const Dataset& data,
                                                std::size_t b, int r, std::size_t reps,
                                                std::uint64_t seed, int threads = 1,
                                                std::size_t component = 0,
                                                std::size_t candidates = 64,
                                                double exact_limit = 5000);

StabilityReport stability_report(const StatisticSpec& stat, const Dataset& data,
                                 const StabilityOptions& options);

// Gamma_{k,phi,b} = ((1 - k phi) / (1 - phi)) 4 sigma_max^{(2)}
//                 + ((k phi - phi) / (1 - phi)) sigma_train^{(2,b-1)}.
double gamma_quantity(double sigma_max2, double sigma_train2_bm1, double k, double phi);
// Reads sigma_max(2) and sigma_train(2, b - 1) from the report.
double gamma_quantity(const StabilityReport& report, std::size_t k, std::size_t b,
                      std::size_t n);

nlohmann::json to_json(const StabilityReport& report);

}  // namespace acr
