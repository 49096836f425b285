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

#include "acr/verify.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "acr/aggregate.hpp"
#include "acr/error.hpp"
#include "acr/lasso.hpp"
#include "acr/normal.hpp"
#include "acr/parallel.hpp"
#include "acr/random.hpp"

namespace acr {

namespace {

struct Moments {
  double mean = 0.0;
  double var = 0.0;  // sample variance
  double se = 0.0;   // of the mean
};

Moments moments(const std::vector<double>& v) {
  Moments m;
  if (v.empty()) return m;
  double m2 = 0.0;
  std::size_t count = 0;
  for (double x : v) {
    ++count;
    const double delta = x - m.mean;
    m.mean += delta / static_cast<double>(count);
    m2 += delta * (x - m.mean);
  }
  if (count > 1) {
    m.var = m2 / static_cast<double>(count - 1);
    m.se = std::sqrt(m.var / static_cast<double>(count));
  }
  return m;
}

// Standard error of the sample variance, from the spread of squared
// deviations.
double variance_se(const std::vector<double>& v) {
  const double mean = moments(v).mean;
  std::vector<double> sq(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) sq[i] = (v[i] - mean) * (v[i] - mean);
  return moments(sq).se;
}

// Linear interpolation between order statistics (type 7).
double quantile(std::vector<double> v, double prob) {
  require(!v.empty(), "quantile of an empty sample");
  std::sort(v.begin(), v.end());
  const double h = prob * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::vector<double> column(const std::vector<std::vector<double>>& rows, std::size_t c) {
  std::vector<double> out(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) out[i] = rows[i].at(c);
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string num(double v) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

AcrConfig run_config(const AcrConfig& base, std::uint64_t seed) {
  AcrConfig cfg = base;
  cfg.seed = seed;
  cfg.threads = 1;
  cfg.keep_trace = false;
  cfg.on_split = nullptr;
  return cfg;
}

}  // namespace

VerifyReport make_verify_report(std::string claim, std::string target, double estimate,
                                double mc_se, std::size_t replications, double lower,
                                double upper, double wall_time_seconds, nlohmann::json details) {
  VerifyReport r;
  r.claim = std::move(claim);
  r.target = std::move(target);
  r.estimate = estimate;
  r.mc_se = mc_se;
  r.replications = replications;
  r.lower = lower;
  r.upper = upper;
  r.pass = estimate >= lower && estimate <= upper;
  r.wall_time_seconds = wall_time_seconds;
  r.details = std::move(details);
  return r;
}

nlohmann::json to_json(const VerifyReport& r) {
  return {{"claim", r.claim},
          {"target", r.target},
          {"estimate", r.estimate},
          {"mc_se", r.mc_se},
          {"replications", r.replications},
          {"band", {r.lower, r.upper}},
          // The acceptance bands are this tool's operational choice.
          {"band_kind", "operational"},
          {"pass", r.pass},
          {"details", r.details},
          {"wall_time_seconds", r.wall_time_seconds}};
}

ReproducibilityMeasurement measure_reproducibility_error(const StatisticSpec& stat,
                                                         const Dataset& data,
                                                         const AcrConfig& cfg,
                                                         std::size_t pairs, int threads) {
  cfg.validate();
  require(pairs >= 100, "reproducibility needs at least 100 pairs");
  require(cfg.xi.size() == stat.arity, "xi length must match the statistic arity");
  const CrossSplitStatistic cs = cross_split_statistic(stat);
  const std::size_t d = stat.arity;

  struct PairOutcome {
    std::vector<char> differs;
    std::vector<double> aggregate_sum;
    double g_sum = 0.0;
    int capped = 0;
  };
  const auto outcomes = parallel_map(pairs, threads, [&](std::size_t i) {
    const AcrResult a =
        run_acr(cs, data, run_config(cfg, derive_seed(cfg.seed, StreamPurpose::kPairA, i)));
    const AcrResult b =
        run_acr(cs, data, run_config(cfg, derive_seed(cfg.seed, StreamPurpose::kPairB, i)));
    PairOutcome out;
    out.differs.resize(d);
    out.aggregate_sum.resize(d);
    for (std::size_t c = 0; c < d; ++c) {
      out.differs[c] = std::fabs(a.aggregate[c] - b.aggregate[c]) >= cfg.xi[c] ? 1 : 0;
      out.aggregate_sum[c] = a.aggregate[c] + b.aggregate[c];
    }
    out.g_sum = static_cast<double>(a.g_hat_max + b.g_hat_max);
    out.capped = (a.stopped_by_cap ? 1 : 0) + (b.stopped_by_cap ? 1 : 0);
    return out;
  });

  ReproducibilityMeasurement m;
  m.pairs = pairs;
  m.marginal.assign(d, 0.0);
  m.marginal_se.assign(d, 0.0);
  m.mean_aggregate.assign(d, 0.0);
  std::size_t any = 0;
  double g_sum = 0.0;
  for (const auto& o : outcomes) {
    bool differs = false;
    for (std::size_t c = 0; c < d; ++c) {
      m.marginal[c] += o.differs[c];
      m.mean_aggregate[c] += o.aggregate_sum[c];
      differs = differs || o.differs[c];
    }
    any += differs ? 1 : 0;
    g_sum += o.g_sum;
    m.capped_runs += static_cast<std::size_t>(o.capped);
  }
  const auto total = static_cast<double>(pairs);
  auto binomial_se = [total](double rate) { return std::sqrt(rate * (1.0 - rate) / total); };
  for (std::size_t c = 0; c < d; ++c) {
    m.marginal[c] /= total;
    m.marginal_se[c] = binomial_se(m.marginal[c]);
    m.mean_aggregate[c] /= 2.0 * total;
  }
  m.error = static_cast<double>(any) / total;
  m.mc_se = binomial_se(m.error);
  m.mean_g_hat = g_sum / (2.0 * total);
  return m;
}

VarianceScalingMeasurement measure_variance_scaling(const StatisticSpec& stat,
                                                    const Dataset& data,
                                                    const std::vector<std::size_t>& k_list,
                                                    std::size_t reps, std::uint64_t seed,
                                                    int threads) {
  require(!k_list.empty(), "k_list must not be empty");
  require(reps >= 2, "variance scaling needs reps >= 2");
  const CrossSplitStatistic cs = cross_split_statistic(stat);
  VarianceScalingMeasurement out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t k : k_list) {
    const SplitPlan plan = SplitPlan::cross(data.n(), k);
    const auto values = column(
        sample_cross_split_values(cs, plan, data, reps,
                                  derive_seed(seed, StreamPurpose::kMonteCarlo, k), threads),
        0);
    ScalingRow row;
    row.k = k;
    row.v1k = sample_variance(values);
    row.k_v1k = static_cast<double>(k) * row.v1k;
    row.se = static_cast<double>(k) * variance_se(values);
    lo = std::min(lo, row.k_v1k);
    hi = std::max(hi, row.k_v1k);
    out.rows.push_back(row);
  }
  out.ratio = hi == 0.0 ? 1.0 : hi / lo;
  return out;
}

TotalSplitsMeasurement measure_total_splits(const StatisticSpec& stat, const Dataset& data,
                                            double xi, double beta,
                                            const std::vector<std::size_t>& k_list,
                                            std::size_t runs, std::uint64_t seed,
                                            std::size_t g_init, int threads) {
  require(!k_list.empty(), "k_list must not be empty");
  require(runs >= 1, "runs must be positive");
  const CrossSplitStatistic cs = cross_split_statistic(stat);
  TotalSplitsMeasurement out;
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (std::size_t k : k_list) {
    SplitPlan::cross(data.n(), k);  // rejects k that do not divide n
    AcrConfig base;
    base.xi = {xi};
    base.beta = beta;
    base.k = k;
    base.g_init = g_init;
    const std::uint64_t k_seed = derive_seed(seed, StreamPurpose::kMonteCarlo, k);
    const auto g_hats = parallel_map(runs, threads, [&](std::size_t i) {
      const AcrResult r =
          run_acr(cs, data, run_config(base, derive_seed(k_seed, StreamPurpose::kPairA, i)));
      return static_cast<double>(r.g_hat_max);
    });
    std::vector<double> m(g_hats.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = g_hats[i] * static_cast<double>(k);
    const Moments gm = moments(g_hats);
    const Moments mm = moments(m);
    out.rows.push_back({k, gm.mean, mm.mean, mm.se});
    lo = std::min(lo, mm.mean);
    hi = std::max(hi, mm.mean);
  }
  out.ratio = hi / lo;
  return out;
}

StoppingAccuracyMeasurement measure_stopping_accuracy(const StatisticSpec& stat,
                                                      const Dataset& data,
                                                      const AcrConfig& cfg, std::size_t runs,
                                                      std::size_t v1k_reps, int threads) {
  cfg.validate();
  require(cfg.xi.size() == 1 && stat.arity == 1, "stopping accuracy is scalar");
  require(runs >= 1 && v1k_reps >= 2, "need runs >= 1 and v1k_reps >= 2");
  const CrossSplitStatistic cs = cross_split_statistic(stat);
  StoppingAccuracyMeasurement out;
  out.runs = runs;
  out.v1k = conditional_variance_estimate(cs, cfg.plan(data.n()), data, v1k_reps,
                                          derive_seed(cfg.seed, StreamPurpose::kPilot), threads)[0];
  out.g_star = oracle_g_star(out.v1k, cfg.xi[0], cfg.beta, cfg.g_init);
  const auto g_hats = parallel_map(runs, threads, [&](std::size_t i) {
    const AcrResult r =
        run_acr(cs, data, run_config(cfg, derive_seed(cfg.seed, StreamPurpose::kPairA, i)));
    return static_cast<double>(r.g_hat_max);
  });
  std::vector<double> rel(runs);
  std::vector<double> abs_rel(runs);
  const auto g_star = static_cast<double>(out.g_star);
  for (std::size_t i = 0; i < runs; ++i) {
    rel[i] = g_hats[i] / g_star - 1.0;
    abs_rel[i] = std::fabs(rel[i]);
  }
  out.q05 = quantile(rel, 0.05);
  out.q50 = quantile(rel, 0.5);
  out.q95 = quantile(rel, 0.95);
  out.median_abs = quantile(abs_rel, 0.5);
  // Half the spread of the order statistics at 1/2 +- 1/(2 sqrt(runs)).
  const double half = 0.5 / std::sqrt(static_cast<double>(runs));
  out.median_abs_se =
      0.5 * (quantile(abs_rel, std::min(1.0, 0.5 + half)) -
             quantile(abs_rel, std::max(0.0, 0.5 - half)));
  out.mean_g_hat = moments(g_hats).mean;
  return out;
}

double kolmogorov_distance(std::vector<double> values) {
  require(!values.empty(), "Kolmogorov distance needs at least one value");
  const Moments m = moments(values);
  const double sd = std::sqrt(m.var);
  for (double& v : values) v = sd > 0.0 ? (v - m.mean) / sd : 0.0;
  std::sort(values.begin(), values.end());
  const auto count = static_cast<double>(values.size());
  double d = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = normal_cdf(values[i]);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / count - cdf));
    d = std::max(d, std::fabs(static_cast<double>(i) / count - cdf));
  }
  return d;
}

NormalApproxMeasurement measure_normal_approx(const StatisticSpec& stat, const Dataset& data,
                                              std::size_t k, std::size_t reps,
                                              std::uint64_t seed, int threads) {
  require(reps >= 2, "normal approximation needs reps >= 2");
  const auto values =
      column(sample_cross_split_values(cross_split_statistic(stat), SplitPlan::cross(data.n(), k),
                                       data, reps, seed, threads),
             0);
  return {reps, kolmogorov_distance(values)};
}

VhatMeasurement measure_vhat_unbiasedness(const StatisticSpec& stat, const Dataset& data,
                                          std::size_t g, std::size_t k, std::size_t reps,
                                          std::uint64_t seed, int threads) {
  require(g >= 2 && reps >= 2, "need g >= 2 and reps >= 2");
  const CrossSplitStatistic cs = cross_split_statistic(stat);
  const SplitPlan plan = SplitPlan::cross(data.n(), k);
  struct Rep {
    double mean;
    double vhat;
  };
  const auto out_reps = parallel_map(reps, threads, [&](std::size_t i) {
    Rng rng(seed, StreamPurpose::kMonteCarlo, i);
    AggregateState state(stat.arity);
    for (std::size_t j = 0; j < g; ++j) state.update(cs.evaluate(sample_cross_split(plan, rng), data, 1));
    return Rep{state.mean()[0], state.variance_estimate(0)};
  });
  std::vector<double> means(reps);
  std::vector<double> vhats(reps);
  for (std::size_t i = 0; i < reps; ++i) {
    means[i] = out_reps[i].mean;
    vhats[i] = out_reps[i].vhat;
  }
  VhatMeasurement out;
  out.reps = reps;
  out.g = g;
  const Moments vm = moments(vhats);
  out.mean_vhat = vm.mean;
  out.var_aggregate = sample_variance(means);
  if (out.var_aggregate == 0.0) {
    out.ratio = out.mean_vhat == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return out;
  }
  out.ratio = out.mean_vhat / out.var_aggregate;
  const double rel_num = vm.se / out.mean_vhat;
  const double rel_den = variance_se(means) / out.var_aggregate;
  out.ratio_se = out.ratio * std::sqrt(rel_num * rel_num + rel_den * rel_den);
  return out;
}

JensenMeasurement measure_sequential_jensen(const StatisticSpec& stat, const Dataset& data,
                                            const AcrConfig& cfg, std::size_t runs,
                                            std::size_t abar_reps, int threads) {
  cfg.validate();
  require(stat.arity == 1 && cfg.xi.size() == 1, "the Jensen check is scalar");
  require(runs >= 2 && abar_reps >= 2, "need runs >= 2 and abar_reps >= 2");
  const CrossSplitStatistic cs = cross_split_statistic(stat);
  const auto singles =
      column(sample_cross_split_values(cs, cfg.plan(data.n()), data, abar_reps,
                                       derive_seed(cfg.seed, StreamPurpose::kMonteCarlo), threads),
             0);
  JensenMeasurement out;
  out.runs = runs;
  out.a_bar = moments(singles).mean;
  std::vector<double> sq(singles.size());
  for (std::size_t i = 0; i < sq.size(); ++i) {
    sq[i] = (singles[i] - out.a_bar) * (singles[i] - out.a_bar);
  }
  const Moments single = moments(sq);
  out.single = single.mean;
  out.single_se = single.se;

  struct Run {
    double aggregate;
    double g_hat;
  };
  const auto results = parallel_map(runs, threads, [&](std::size_t i) {
    const AcrResult r =
        run_acr(cs, data, run_config(cfg, derive_seed(cfg.seed, StreamPurpose::kPairA, i)));
    return Run{r.aggregate[0], static_cast<double>(r.g_hat_max)};
  });
  std::vector<double> aggregates(runs);
  std::vector<double> stopped_sq(runs);
  std::vector<double> g_hats(runs);
  for (std::size_t i = 0; i < runs; ++i) {
    aggregates[i] = results[i].aggregate;
    stopped_sq[i] = (aggregates[i] - out.a_bar) * (aggregates[i] - out.a_bar);
    g_hats[i] = results[i].g_hat;
  }
  const Moments stopped = moments(stopped_sq);
  out.stopped = stopped.mean;
  out.stopped_se = stopped.se;
  out.combined_se = std::hypot(out.stopped_se, out.single_se);
  const Moments agg = moments(aggregates);
  out.mean_aggregate = agg.mean;
  out.mean_aggregate_se = agg.se;
  out.mean_g_hat = moments(g_hats).mean;
  out.holds = out.stopped <= out.single + 3.0 * out.combined_se;
  return out;
}

// ---------------------------------------------------------------------------

StatisticSpec verify_statistic(const Dataset& data, double lambda_fraction) {
  require(lambda_fraction > 0.0, "lambda_fraction must be positive");
  std::vector<Index> rows(data.n());
  std::iota(rows.begin(), rows.end(), Index{0});
  const double lambda_max = LassoProblem(data, rows).lambda_max();
  if (!(lambda_max > 0.0)) fail(ErrorCode::kDegenerateDesign, "lambda_max is zero");
  return cv_mse_statistic({lambda_fraction * lambda_max});
}

double tune_xi(double v1k, double beta, double target_g) {
  require(v1k > 0.0 && target_g > 0.0, "need v1k > 0 and target_g > 0");
  const double z = normal_quantile(1.0 - beta / 2.0);
  return z * std::sqrt(2.0 * v1k / target_g);
}

namespace {

// Acceptance band for the reproducibility error at nominal beta.
std::pair<double, double> reproducibility_band(double beta) {
  return {beta - std::max(0.02, 0.2 * beta), beta + std::max(0.03, 0.2 * beta)};
}

struct SuiteContext {
  const VerifyOptions& options;
  Dataset data;
  StatisticSpec stat;

  // Pilot v_{1,k} at complete cross-splits with k folds.
  double pilot_v1k(std::size_t k) const {
    return conditional_variance_estimate(stat, SplitPlan::cross(data.n(), k), data,
                                         options.reps,
                                         derive_seed(options.seed, StreamPurpose::kPilot, k),
                                         options.threads)[0];
  }

  AcrConfig config(double xi) const {
    AcrConfig cfg;
    cfg.xi = {xi};
    cfg.beta = options.beta;
    cfg.k = options.k;
    cfg.g_init = options.g_init;
    cfg.seed = options.seed;
    cfg.threads = 1;
    return cfg;
  }
};

void suite_reproducibility(const SuiteContext& ctx, SuiteOutput& out) {
  const auto& o = ctx.options;
  const double v1k = ctx.pilot_v1k(o.k);
  const double xi = tune_xi(v1k, o.beta, o.target_g);
  std::string csv = "xi,beta,mean_g_hat,error,mc_se\n";
  // Coarse tolerances first (early-stopping regime), then the calibrated one.
  for (double mult : {4.0, 2.0, 1.0}) {
    const auto start = std::chrono::steady_clock::now();
    const auto m = measure_reproducibility_error(ctx.stat, ctx.data, ctx.config(mult * xi),
                                                 o.pairs, o.threads);
    csv += num(mult * xi) + "," + num(o.beta) + "," + num(m.mean_g_hat) + "," + num(m.error) +
           "," + num(m.mc_se) + "\n";
    if (mult != 1.0) continue;
    const auto [lo, hi] = reproducibility_band(o.beta);
    nlohmann::json details = {{"xi", mult * xi},          {"beta", o.beta},
                              {"k", o.k},                 {"pilot_v1k", v1k},
                              {"mean_g_hat", m.mean_g_hat}, {"capped_runs", m.capped_runs},
                              {"calibrated_regime", m.mean_g_hat >= 500.0}};
    out.reports.push_back(make_verify_report(
        "reproducibility", "error close to beta once mean g_hat >= 500", m.error, m.mc_se,
        m.pairs, lo, hi, seconds_since(start), details));
  }
  out.csv["reproducibility"] = csv;
}

void suite_scaling(const SuiteContext& ctx, SuiteOutput& out) {
  const auto& o = ctx.options;
  const auto start = std::chrono::steady_clock::now();
  const auto m = measure_variance_scaling(ctx.stat, ctx.data, o.k_list, o.reps,
                                          derive_seed(o.seed, StreamPurpose::kMonteCarlo),
                                          o.threads);
  std::string csv = "k,v1k,k_v1k,se\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : m.rows) {
    csv += std::to_string(r.k) + "," + num(r.v1k) + "," + num(r.k_v1k) + "," + num(r.se) + "\n";
    rows.push_back({{"k", r.k}, {"v1k", r.v1k}, {"k_v1k", r.k_v1k}, {"se", r.se}});
  }
  out.csv["scaling"] = csv;
  out.reports.push_back(make_verify_report("variance_scaling",
                                           "max/min of k v_{1,k} over k_list <= 1.25", m.ratio,
                                           0.0, o.reps, 1.0, 1.25, seconds_since(start),
                                           {{"rows", rows}}));
}

void suite_splits(const SuiteContext& ctx, SuiteOutput& out) {
  const auto& o = ctx.options;
  const auto start = std::chrono::steady_clock::now();
  // Calibrate at the largest k, where g* is smallest.
  const std::size_t k_max = *std::max_element(o.k_list.begin(), o.k_list.end());
  const double xi = tune_xi(ctx.pilot_v1k(k_max), o.beta, o.target_g);
  const auto m = measure_total_splits(ctx.stat, ctx.data, xi, o.beta, o.k_list, o.split_runs,
                                      derive_seed(o.seed, StreamPurpose::kMonteCarlo), o.g_init,
                                      o.threads);
  std::string csv = "k,mean_g_hat,mean_m,se_m\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& r : m.rows) {
    csv += std::to_string(r.k) + "," + num(r.mean_g_hat) + "," + num(r.mean_m) + "," +
           num(r.se_m) + "\n";
    rows.push_back(
        {{"k", r.k}, {"mean_g_hat", r.mean_g_hat}, {"mean_m", r.mean_m}, {"se_m", r.se_m}});
  }
  out.csv["splits"] = csv;
  out.reports.push_back(make_verify_report("total_splits",
                                           "max/min of mean g_hat k over k_list <= 1.4", m.ratio,
                                           0.0, o.split_runs, 1.0, 1.4, seconds_since(start),
                                           {{"xi", xi}, {"rows", rows}}));
}

void suite_stopping(const SuiteContext& ctx, SuiteOutput& out) {
  const auto& o = ctx.options;
  const auto start = std::chrono::steady_clock::now();
  const double xi = tune_xi(ctx.pilot_v1k(o.k), o.beta, o.target_g);
  const auto m =
      measure_stopping_accuracy(ctx.stat, ctx.data, ctx.config(xi), o.runs, o.v1k_reps, o.threads);
  out.csv["stopping"] = "xi,g_star,q05,q50,q95,median_abs\n" + num(xi) + "," +
                        std::to_string(m.g_star) + "," + num(m.q05) + "," + num(m.q50) + "," +
                        num(m.q95) + "," + num(m.median_abs) + "\n";
  out.reports.push_back(make_verify_report(
      "stopping_accuracy", "median |g_hat/g* - 1| <= 0.1", m.median_abs, m.median_abs_se, m.runs,
      0.0, 0.1, seconds_since(start),
      {{"xi", xi}, {"v1k", m.v1k}, {"g_star", m.g_star}, {"q05", m.q05}, {"q50", m.q50},
       {"q95", m.q95}, {"mean_g_hat", m.mean_g_hat}}));
}

void suite_normal(const SuiteContext& ctx, SuiteOutput& out) {
  const auto& o = ctx.options;
  const auto start = std::chrono::steady_clock::now();
  const auto m = measure_normal_approx(ctx.stat, ctx.data, o.k, o.reps,
                                       derive_seed(o.seed, StreamPurpose::kMonteCarlo),
                                       o.threads);
  // 1% critical value of the Kolmogorov statistic, conservative once
  // studentized.
  const double bound = 1.63 / std::sqrt(static_cast<double>(m.reps));
  out.csv["normal"] = "k,reps,d_k\n" + std::to_string(o.k) + "," + std::to_string(m.reps) + "," +
                      num(m.d_k) + "\n";
  out.reports.push_back(make_verify_report("normal_approximation",
                                           "d_K within the 1% Kolmogorov critical value", m.d_k,
                                           0.0, m.reps, 0.0, bound, seconds_since(start),
                                           {{"k", o.k}}));
}

void suite_vhat(const SuiteContext& ctx, SuiteOutput& out) {
  const auto& o = ctx.options;
  constexpr std::size_t kG = 10;
  constexpr std::size_t kFolds = 5;
  const auto start = std::chrono::steady_clock::now();
  const auto m = measure_vhat_unbiasedness(ctx.stat, ctx.data, kG, kFolds, o.vhat_reps,
                                           derive_seed(o.seed, StreamPurpose::kMonteCarlo),
                                           o.threads);
  out.csv["vhat"] = "g,k,mean_vhat,var_aggregate,ratio\n" + std::to_string(kG) + "," +
                    std::to_string(kFolds) + "," + num(m.mean_vhat) + "," +
                    num(m.var_aggregate) + "," + num(m.ratio) + "\n";
  out.reports.push_back(make_verify_report(
      "vhat_unbiasedness", "mean v_hat / Var(a(R_{g,k})) in [0.95, 1.05]", m.ratio, m.ratio_se,
      m.reps, 0.95, 1.05, seconds_since(start),
      {{"g", kG}, {"k", kFolds}, {"mean_vhat", m.mean_vhat},
       {"var_aggregate", m.var_aggregate}}));
}

}  // namespace

SuiteOutput run_verify_suite(const std::string& suite, const VerifyOptions& options) {
  const bool all = suite == "all";
  if (!all && std::find(kVerifySuites.begin(), kVerifySuites.end(), suite) == kVerifySuites.end()) {
    fail(ErrorCode::kInvalidArgument, "unknown verify suite: " + suite);
  }
  SyntheticSpec spec = options.data;
  spec.with_treatment = false;
  Dataset data = generate_synthetic(spec);
  StatisticSpec stat = verify_statistic(data, options.lambda_fraction);
  const SuiteContext ctx{options, std::move(data), std::move(stat)};

  SuiteOutput out;
  auto want = [&](const char* name) { return all || suite == name; };
  if (want("reproducibility")) suite_reproducibility(ctx, out);
  if (want("scaling")) suite_scaling(ctx, out);
  if (want("splits")) suite_splits(ctx, out);
  if (want("stopping")) suite_stopping(ctx, out);
  if (want("normal")) suite_normal(ctx, out);
  if (want("vhat")) suite_vhat(ctx, out);
  return out;
}

}  // namespace acr
