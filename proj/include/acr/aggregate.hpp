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

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "acr/dataset.hpp"
#include "acr/splits.hpp"
#include "acr/statistics.hpp"

namespace acr {

// Running aggregate over g collections of cross-splits, updated with
// Welford's recurrences componentwise.
class AggregateState {
 public:
  explicit AggregateState(std::size_t arity, bool retain = false);

  // Throws kArityMismatch or kNonFinite.
  void update(std::span<const double> value);

  std::size_t g() const noexcept { return g_; }
  std::size_t arity() const noexcept { return mean_.size(); }
  // Requires g >= 1.
  const std::vector<double>& mean() const;
  // Estimated variance of the mean, sum_i (a_i - mean)^2 / (g (g - 1)).
  // Requires g >= 2.
  std::vector<double> variance_estimate() const;
  double variance_estimate(std::size_t component) const;
  // Retained per-collection values (empty unless constructed with retain).
  const std::vector<std::vector<double>>& values() const noexcept { return values_; }

 private:
  std::size_t g_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
  bool retain_;
  std::vector<std::vector<double>> values_;
};

// Sample variance with denominator (count - 1).
double sample_variance(std::span<const double> values);

// a(r, D) for `reps` fresh uniform cross-splits; replication i uses the
// stream derived from (seed, kMonteCarlo, i).
std::vector<std::vector<double>> sample_cross_split_values(const CrossSplitStatistic& stat,
                                                           const SplitPlan& plan,
                                                           const Dataset& data, std::size_t reps,
                                                           std::uint64_t seed, int threads = 1);

// Estimate of v_{1,k}(D), componentwise. v_{g,k}(D) = v_{1,k}(D) / g.
std::vector<double> conditional_variance_estimate(const CrossSplitStatistic& stat,
                                                  const SplitPlan& plan, const Dataset& data,
                                                  std::size_t reps, std::uint64_t seed,
                                                  int threads = 1);
std::vector<double> conditional_variance_estimate(const StatisticSpec& stat,
                                                  const SplitPlan& plan, const Dataset& data,
                                                  std::size_t reps, std::uint64_t seed,
                                                  int threads = 1);

}  // namespace acr
