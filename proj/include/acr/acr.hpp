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

// Anscombe-Chow-Robbins aggregation of cross-split statistics.
//
// Cross-splits are drawn one at a time until the estimated variance of the
// running mean falls to cv(xi, beta) = (xi / z_{1-beta/2})^2 / 2, after a
// burn-in of g_init draws. Two independent runs then differ by more than xi
// with probability close to beta once the stopping time is large.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "acr/dataset.hpp"
#include "acr/splits.hpp"
#include "acr/statistics.hpp"

namespace acr {

double critical_value(double xi, double beta);

struct AcrConfig {
  std::vector<double> xi;  // one tolerance per statistic component
  double beta = 0.05;
  std::size_t k = 10;
  std::size_t b = 0;  // 0: n / k, a complete cross-split
  std::size_t g_init = 10;
  std::size_t g_max = 1'000'000;
  std::uint64_t seed = 0;
  int threads = 1;
  bool keep_trace = false;
  // Called with (g, r_g) for every drawn cross-split, in draw order.
  std::function<void(std::size_t, const CrossSplit&)> on_split;

  void validate() const;
  SplitPlan plan(std::size_t n) const;
};

struct TraceRow {
  std::size_t g;
  std::size_t component;
  double value;
  double running_mean;
  double running_vhat;  // NaN while g < 2
};

struct AcrResult {
  std::vector<double> aggregate;    // per component, at its stopping time
  std::vector<std::size_t> g_hat;   // per component
  std::size_t g_hat_max = 0;        // collections drawn
  std::vector<double> v_hat;        // at each component's stopping time
  std::vector<double> cv;
  std::vector<double> residual_se;  // sqrt(v_hat)
  std::vector<bool> capped;
  bool stopped_by_cap = false;
  // v_hat was already <= cv at g_init for some component.
  bool early_stop_warning = false;
  std::vector<TraceRow> trace;
};

// Draws the next per-collection value a(r_g, D).
using CollectionSampler = std::function<std::vector<double>()>;

// The stopping rule on an arbitrary stream of per-collection values. Each
// component stops independently at the first g >= g_init with v_hat <= cv;
// the shared stream continues while any component is active.
AcrResult run_sequential(const CollectionSampler& sample, std::size_t arity,
                         const std::vector<double>& xi, double beta, std::size_t g_init,
                         std::size_t g_max, bool keep_trace = false);

// Algorithm on a dataset. Cross-splits come from the stream (seed, kSplits)
// so the result is a pure function of (stat, data, cfg).
AcrResult run_acr(const CrossSplitStatistic& stat, const Dataset& data, const AcrConfig& cfg);
AcrResult run_acr(const StatisticSpec& stat, const Dataset& data, const AcrConfig& cfg);

// Smallest g >= g_init with v1k / g <= cv(xi, beta).
std::size_t oracle_g_star(double v1k, double xi, double beta, std::size_t g_init);

struct ToleranceSelection {
  std::vector<double> xi;
  std::vector<double> pilot_mean;
  std::vector<double> pilot_vhat;
  std::vector<double> q;
  std::optional<std::size_t> reference;  // index of the screened boundary component
  bool no_component_passed = false;
};

// Pilot-based tolerances for a difference statistic whose components are
// ordered by increasing penalty. q_l = 1 - Phi(b_l / sqrt(v_hat_l)); the
// reference is the largest-penalty component with q < p_cut, and
// xi_l = max(xi_floor, xi_floor * b_l / b_ref).
ToleranceSelection select_tolerances(const StatisticSpec& diff_stat, const Dataset& data,
                                     const SplitPlan& plan, std::size_t g_pilot, double xi_floor,
                                     double p_cut, std::uint64_t seed, int threads = 1);

struct ReportContext {
  std::string statistic;
  std::vector<double> xi;
  double beta = 0.05;
  std::size_t k = 0;
  std::size_t b = 0;
  std::size_t g_init = 0;
  std::uint64_t seed = 0;
  double wall_time_seconds = 0.0;
};

inline constexpr int kSchemaVersion = 1;

nlohmann::json report(const AcrResult& result, const ReportContext& context);
// Inverse of report() for the result fields (trace excluded).
AcrResult result_from_report(const nlohmann::json& j);

// CSV with header g,component,value,running_mean,running_vhat.
std::string trace_csv(const std::vector<TraceRow>& trace);

}  // namespace acr
