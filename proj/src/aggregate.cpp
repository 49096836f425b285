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

#include "acr/aggregate.hpp"

#include <cmath>

#include "acr/error.hpp"
#include "acr/parallel.hpp"
#include "acr/random.hpp"

namespace acr {

AggregateState::AggregateState(std::size_t arity, bool retain)
    : mean_(arity, 0.0), m2_(arity, 0.0), retain_(retain) {
  require(arity >= 1, "aggregate arity must be at least 1");
}

void AggregateState::update(std::span<const double> value) {
  if (value.size() != mean_.size()) {
    fail(ErrorCode::kArityMismatch, "value has arity " + std::to_string(value.size()) +
                                        ", expected " + std::to_string(mean_.size()));
  }
  for (double v : value) {
    if (!std::isfinite(v)) fail(ErrorCode::kNonFinite, "non-finite statistic value");
  }
  ++g_;
  const double inv_g = 1.0 / static_cast<double>(g_);
  for (std::size_t c = 0; c < mean_.size(); ++c) {
    const double delta = value[c] - mean_[c];
    mean_[c] += delta * inv_g;
    m2_[c] += delta * (value[c] - mean_[c]);
  }
  if (retain_) values_.emplace_back(value.begin(), value.end());
}

const std::vector<double>& AggregateState::mean() const {
  require(g_ >= 1, "mean needs at least one collection");
  return mean_;
}

double AggregateState::variance_estimate(std::size_t component) const {
  require(g_ >= 2, "variance estimate needs g >= 2");
  const auto g = static_cast<double>(g_);
  return m2_.at(component) / (g * (g - 1.0));
}

std::vector<double> AggregateState::variance_estimate() const {
  std::vector<double> out(mean_.size());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = variance_estimate(c);
  return out;
}

double sample_variance(std::span<const double> values) {
  require(values.size() >= 2, "sample variance needs at least 2 values");
  // Welford, so that identical values give exactly zero.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  for (double v : values) {
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  return m2 / static_cast<double>(count - 1);
}

std::vector<std::vector<double>> sample_cross_split_values(const CrossSplitStatistic& stat,
                                                           const SplitPlan& plan,
                                                           const Dataset& data, std::size_t reps,
                                                           std::uint64_t seed, int threads) {
  plan.validate();
  require(plan.n == data.n(), "split plan does not match the dataset");
  return parallel_map(reps, threads, [&](std::size_t i) {
    Rng rng(seed, StreamPurpose::kMonteCarlo, i);
    return stat.evaluate(sample_cross_split(plan, rng), data, 1);
  });
}

std::vector<double> conditional_variance_estimate(const CrossSplitStatistic& stat,
                                                  const SplitPlan& plan, const Dataset& data,
                                                  std::size_t reps, std::uint64_t seed,
                                                  int threads) {
  require(reps >= 2, "conditional variance needs reps >= 2");
  const auto values = sample_cross_split_values(stat, plan, data, reps, seed, threads);
  std::vector<double> out(stat.arity);
  std::vector<double> column(reps);
  for (std::size_t c = 0; c < stat.arity; ++c) {
    for (std::size_t i = 0; i < reps; ++i) column[i] = values[i][c];
    out[c] = sample_variance(column);
  }
  return out;
}

std::vector<double> conditional_variance_estimate(const StatisticSpec& stat,
                                                  const SplitPlan& plan, const Dataset& data,
                                                  std::size_t reps, std::uint64_t seed,
                                                  int threads) {
  return conditional_variance_estimate(cross_split_statistic(stat), plan, data, reps, seed,
                                       threads);
}

}  // namespace acr
