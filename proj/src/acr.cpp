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

#include "acr/acr.hpp"

#include <cmath>
#include <limits>

#include "acr/aggregate.hpp"
#include "acr/error.hpp"
#include "acr/normal.hpp"
#include "acr/random.hpp"

namespace acr {

double critical_value(double xi, double beta) {
  require(xi > 0.0, "xi must be positive");
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  const double z = normal_quantile(1.0 - beta / 2.0);
  const double ratio = xi / z;
  return 0.5 * ratio * ratio;
}

void AcrConfig::validate() const {
  require(!xi.empty(), "xi must be given");
  for (double x : xi) require(x > 0.0, "every xi component must be positive");
  require(beta > 0.0 && beta < 1.0, "beta must lie in (0, 1)");
  require(g_init >= 2, "g_init must be at least 2");
  require(g_max >= g_init, "g_max must be at least g_init");
  require(k >= 1, "k must be at least 1");
  require(threads >= 1, "threads must be at least 1");
}

SplitPlan AcrConfig::plan(std::size_t n) const {
  SplitPlan out{n, k, b == 0 ? n / k : b};
  out.validate();
  return out;
}

AcrResult run_sequential(const CollectionSampler& sample, std::size_t arity,
                         const std::vector<double>& xi, double beta, std::size_t g_init,
                         std::size_t g_max, bool keep_trace) {
  if (xi.size() != arity) {
    fail(ErrorCode::kArityMismatch, "xi has " + std::to_string(xi.size()) +
                                        " components, statistic has " + std::to_string(arity));
  }
  require(g_init >= 2 && g_max >= g_init, "need 2 <= g_init <= g_max");

  AcrResult result;
  result.cv.resize(arity);
  for (std::size_t c = 0; c < arity; ++c) result.cv[c] = critical_value(xi[c], beta);
  result.aggregate.assign(arity, 0.0);
  result.v_hat.assign(arity, 0.0);
  result.residual_se.assign(arity, 0.0);
  result.g_hat.assign(arity, 0);
  result.capped.assign(arity, false);

  AggregateState state(arity);
  std::vector<bool> active(arity, true);
  std::size_t remaining = arity;
  auto stop = [&](std::size_t c, bool capped) {
    active[c] = false;
    --remaining;
    result.aggregate[c] = state.mean()[c];
    result.v_hat[c] = state.variance_estimate(c);
    result.residual_se[c] = std::sqrt(result.v_hat[c]);
    result.g_hat[c] = state.g();
    result.capped[c] = capped;
  };

  while (remaining > 0) {
    const std::vector<double> value = sample();
    state.update(value);
    const std::size_t g = state.g();
    if (keep_trace) {
      for (std::size_t c = 0; c < arity; ++c) {
        const double vhat =
            g >= 2 ? state.variance_estimate(c) : std::numeric_limits<double>::quiet_NaN();
        result.trace.push_back({g, c, value[c], state.mean()[c], vhat});
      }
    }
    if (g < g_init) continue;
    for (std::size_t c = 0; c < arity; ++c) {
      if (active[c] && state.variance_estimate(c) <= result.cv[c]) {
        if (g == g_init) result.early_stop_warning = true;
        stop(c, false);
      }
    }
    if (remaining > 0 && g >= g_max) {
      for (std::size_t c = 0; c < arity; ++c) {
        if (active[c]) stop(c, true);
      }
      result.stopped_by_cap = true;
    }
  }
  result.g_hat_max = state.g();
  return result;
}

AcrResult run_acr(const CrossSplitStatistic& stat, const Dataset& data, const AcrConfig& cfg) {
  cfg.validate();
  const SplitPlan plan = cfg.plan(data.n());
  Rng rng(cfg.seed, StreamPurpose::kSplits);
  std::size_t g = 0;
  CollectionSampler sample = [&]() {
    const CrossSplit split = sample_cross_split(plan, rng);
    ++g;
    if (cfg.on_split) cfg.on_split(g, split);
    return stat.evaluate(split, data, cfg.threads);
  };
  return run_sequential(sample, stat.arity, cfg.xi, cfg.beta, cfg.g_init, cfg.g_max,
                        cfg.keep_trace);
}

AcrResult run_acr(const StatisticSpec& stat, const Dataset& data, const AcrConfig& cfg) {
  return run_acr(cross_split_statistic(stat), data, cfg);
}

std::size_t oracle_g_star(double v1k, double xi, double beta, std::size_t g_init) {
  require(v1k >= 0.0, "v1k must be nonnegative");
  const double cv = critical_value(xi, beta);
  if (v1k == 0.0) return g_init;
  const double raw = std::ceil(v1k / cv);
  if (raw <= static_cast<double>(g_init)) return g_init;
  auto g = static_cast<std::size_t>(raw);
  // Guard the ceiling against rounding in v1k / cv.
  while (g > g_init && v1k / static_cast<double>(g - 1) <= cv) --g;
  while (v1k / static_cast<double>(g) > cv) ++g;
  return g;
}

ToleranceSelection select_tolerances(const StatisticSpec& diff_stat, const Dataset& data,
                                     const SplitPlan& plan, std::size_t g_pilot, double xi_floor,
                                     double p_cut, std::uint64_t seed, int threads) {
  require(g_pilot >= 2, "g_pilot must be at least 2");
  require(xi_floor > 0.0, "xi_floor must be positive");
  require(p_cut > 0.0 && p_cut <= 0.5, "p_cut must lie in (0, 0.5]");
  plan.validate();

  const std::size_t d = diff_stat.arity;
  AggregateState state(d);
  Rng rng(seed, StreamPurpose::kPilot);
  for (std::size_t g = 0; g < g_pilot; ++g) {
    state.update(eval_cross_split(diff_stat, sample_cross_split(plan, rng), data, threads));
  }

  ToleranceSelection out;
  out.pilot_mean = state.mean();
  out.pilot_vhat = state.variance_estimate();
  out.q.resize(d);
  for (std::size_t l = 0; l < d; ++l) {
    const double mean = out.pilot_mean[l];
    const double v = out.pilot_vhat[l];
    if (v > 0.0) {
      out.q[l] = 1.0 - normal_cdf(mean / std::sqrt(v));
    } else {
      out.q[l] = mean > 0.0 ? 0.0 : 1.0;
    }
    if (out.q[l] < p_cut) out.reference = l;
  }
  out.xi.assign(d, xi_floor);
  if (!out.reference) {
    out.no_component_passed = true;
    return out;
  }
  const double ref = out.pilot_mean[*out.reference];
  for (std::size_t l = 0; l < d; ++l) {
    out.xi[l] = std::max(xi_floor, xi_floor * out.pilot_mean[l] / ref);
  }
  return out;
}

nlohmann::json report(const AcrResult& result, const ReportContext& context) {
  nlohmann::json j;
  j["schema_version"] = kSchemaVersion;
  j["statistic"] = context.statistic;
  j["aggregate"] = result.aggregate;
  j["g_hat"] = result.g_hat;
  j["g_hat_max"] = result.g_hat_max;
  j["v_hat"] = result.v_hat;
  j["residual_se"] = result.residual_se;
  j["cv"] = result.cv;
  j["capped"] = result.capped;
  j["stopped_by_cap"] = result.stopped_by_cap;
  j["early_stop_warning"] = result.early_stop_warning;
  j["xi"] = context.xi;
  j["beta"] = context.beta;
  j["k"] = context.k;
  j["b"] = context.b;
  j["g_init"] = context.g_init;
  j["seed"] = context.seed;
  j["wall_time_seconds"] = context.wall_time_seconds;
  return j;
}

AcrResult result_from_report(const nlohmann::json& j) {
  AcrResult r;
  r.aggregate = j.at("aggregate").get<std::vector<double>>();
  r.g_hat = j.at("g_hat").get<std::vector<std::size_t>>();
  r.g_hat_max = j.at("g_hat_max").get<std::size_t>();
  r.v_hat = j.at("v_hat").get<std::vector<double>>();
  r.residual_se = j.at("residual_se").get<std::vector<double>>();
  r.cv = j.at("cv").get<std::vector<double>>();
  r.capped = j.at("capped").get<std::vector<bool>>();
  r.stopped_by_cap = j.at("stopped_by_cap").get<bool>();
  r.early_stop_warning = j.at("early_stop_warning").get<bool>();
  return r;
}

namespace {

std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  nlohmann::json tmp = v;
  return tmp.dump();
}

}  // namespace

std::string trace_csv(const std::vector<TraceRow>& trace) {
  std::string out = "g,component,value,running_mean,running_vhat\n";
  for (const auto& row : trace) {
    out += std::to_string(row.g) + "," + std::to_string(row.component + 1) + "," +
           csv_number(row.value) + "," + csv_number(row.running_mean) + "," +
           csv_number(row.running_vhat) + "\n";
  }
  return out;
}

}  // namespace acr
