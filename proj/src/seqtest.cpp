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

#include "acr/seqtest.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "acr/error.hpp"
#include "acr/normal.hpp"
#include "acr/parallel.hpp"
#include "acr/random.hpp"

namespace acr {

namespace {

void check_pvalue(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    fail(ErrorCode::kPValueRange, "split p-value outside [0, 1]: " + std::to_string(p));
  }
}

}  // namespace

void PValueTestConfig::validate() const {
  require(delta > 0.0 && delta <= c && c <= 1.0, "need 0 < delta <= c <= 1");
  acr.validate();
}

void EValueTestConfig::validate() const {
  require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
  acr.validate();
}

StatisticSpec pvalue_indicator_statistic(StatisticSpec pstat, double delta) {
  require(pstat.arity == 1, "p-value statistic must be scalar");
  StatisticSpec out;
  out.arity = 1;
  out.label = "indicator(" + pstat.label + ")";
  out.eval = [pstat = std::move(pstat), delta](IndexSpan block, IndexSpan train,
                                               const Dataset& data) {
    const double p = pstat.eval(block, train, data)[0];
    check_pvalue(p);
    return std::vector<double>{p <= delta ? 1.0 : 0.0};
  };
  return out;
}

namespace {

template <typename Stat>
SeqTestResult pvalue_test(const Stat& pstat, const Dataset& data, const PValueTestConfig& cfg) {
  cfg.validate();
  require(cfg.acr.xi.size() == 1, "the proportion test takes a scalar xi");
  SeqTestResult out;
  out.acr = run_acr(pvalue_indicator_statistic(pstat, cfg.delta), data, cfg.acr);
  out.statistic = out.acr.aggregate[0];
  out.threshold = cfg.c;
  out.g_hat = out.acr.g_hat[0];
  out.reject = out.statistic >= cfg.c;
  return out;
}

}  // namespace

CrossSplitStatistic pvalue_indicator_statistic(CrossSplitStatistic pstat, double delta) {
  require(pstat.arity == 1, "p-value statistic must be scalar");
  CrossSplitStatistic out;
  out.arity = 1;
  out.label = "indicator(" + pstat.label + ")";
  out.evaluate = [pstat = std::move(pstat), delta](const CrossSplit& split, const Dataset& data,
                                                   int threads) {
    const double p = pstat.evaluate(split, data, threads)[0];
    check_pvalue(p);
    return std::vector<double>{p <= delta ? 1.0 : 0.0};
  };
  return out;
}

SeqTestResult run_pvalue_test(const StatisticSpec& pstat, const Dataset& data,
                              const PValueTestConfig& cfg) {
  return pvalue_test(pstat, data, cfg);
}

SeqTestResult run_pvalue_test(const CrossSplitStatistic& pstat, const Dataset& data,
                              const PValueTestConfig& cfg) {
  return pvalue_test(pstat, data, cfg);
}

SeqTestResult run_evalue_test(const StatisticSpec& estat, const Dataset& data,
                              const EValueTestConfig& cfg) {
  cfg.validate();
  require(estat.arity == 1 && cfg.acr.xi.size() == 1, "the e-value test is scalar");
  StatisticSpec checked = estat;
  checked.eval = [estat](IndexSpan block, IndexSpan train, const Dataset& d) {
    auto e = estat.eval(block, train, d);
    if (!(e[0] >= 0.0)) fail(ErrorCode::kNegativeEValue, "negative or NaN e-value");
    return e;
  };
  SeqTestResult out;
  out.acr = run_acr(checked, data, cfg.acr);
  out.statistic = out.acr.aggregate[0];
  out.threshold = 1.0 / cfg.alpha;
  out.g_hat = out.acr.g_hat[0];
  out.reject = out.statistic >= out.threshold;
  return out;
}

StatisticSpec gaussian_mean_pvalue_statistic(double sd) {
  require(sd > 0.0, "sd must be positive");
  StatisticSpec out;
  out.arity = 1;
  out.label = "gaussian_mean_pvalue";
  out.eval = [sd](IndexSpan block, IndexSpan, const Dataset& data) {
    const auto y = data.y();
    double sum = 0.0;
    for (Index i : block) sum += y[i];
    const auto b = static_cast<double>(block.size());
    const double z = sum / (std::sqrt(b) * sd);
    return std::vector<double>{normal_cdf(-z)};
  };
  return out;
}

StatisticSpec universal_inference_evalue_statistic() {
  StatisticSpec out;
  out.arity = 1;
  out.label = "gaussian_universal_inference";
  out.eval = [](IndexSpan block, IndexSpan train, const Dataset& data) {
    require(train.size() >= 2, "the e-value needs at least 2 training rows");
    const auto y = data.y();
    double mu = 0.0;
    double m2 = 0.0;
    std::size_t count = 0;
    for (Index i : train) {
      ++count;
      const double delta = y[i] - mu;
      mu += delta / static_cast<double>(count);
      m2 += delta * (y[i] - mu);
    }
    const double var = m2 / static_cast<double>(count - 1);
    if (!(var > 0.0)) return std::vector<double>{0.0};

    const auto b = static_cast<double>(block.size());
    double block_mean = 0.0;
    for (Index i : block) block_mean += y[i];
    block_mean /= b;
    const double mu0 = std::min(block_mean, 0.0);
    double ss_train = 0.0;
    double ss_null = 0.0;
    for (Index i : block) {
      ss_train += (y[i] - mu) * (y[i] - mu);
      ss_null += (y[i] - mu0) * (y[i] - mu0);
    }
    const double var_null = ss_null / b;
    // The null likelihood is unbounded when the block fits mu0 exactly.
    if (!(var_null > 0.0)) return std::vector<double>{0.0};
    const double log_two_pi = std::log(2.0 * std::numbers::pi);
    const double log_num = -0.5 * b * (log_two_pi + std::log(var)) - 0.5 * ss_train / var;
    const double log_den = -0.5 * b * (log_two_pi + std::log(var_null)) - 0.5 * b;
    return std::vector<double>{std::exp(std::min(log_num - log_den, 600.0))};
  };
  return out;
}

namespace {

template <typename Runner>
ValidityReport simulate(std::size_t n, std::size_t runs, std::uint64_t seed, int threads,
                        double bound, Runner&& run_once) {
  require(runs >= 1, "runs must be positive");
  struct Outcome {
    bool reject;
    std::size_t g_hat;
  };
  const auto outcomes = parallel_map(runs, threads, [&](std::size_t i) {
    SyntheticSpec spec;
    spec.n = n;
    spec.p = 0;
    spec.sparsity = 0;
    spec.with_treatment = false;
    spec.seed = derive_seed(seed, StreamPurpose::kData, i);
    const Dataset data = generate_synthetic(spec);
    const SeqTestResult r = run_once(data, derive_seed(seed, StreamPurpose::kSplits, i));
    return Outcome{r.reject, r.g_hat};
  });
  ValidityReport report;
  report.runs = runs;
  double g_sum = 0.0;
  for (const auto& o : outcomes) {
    report.rejections += o.reject ? 1 : 0;
    g_sum += static_cast<double>(o.g_hat);
  }
  const auto total = static_cast<double>(runs);
  report.rate = static_cast<double>(report.rejections) / total;
  report.mc_se = std::sqrt(report.rate * (1.0 - report.rate) / total);
  report.bound = bound;
  report.mean_g_hat = g_sum / total;
  report.pass = report.rate <= bound + 3.0 * report.mc_se;
  return report;
}

}  // namespace

ValidityReport simulate_pvalue_validity(const PValueTestConfig& cfg, std::size_t n,
                                        std::size_t runs, std::uint64_t seed, int threads) {
  cfg.validate();
  const StatisticSpec pstat = gaussian_mean_pvalue_statistic(1.0);
  return simulate(n, runs, seed, threads, cfg.level(),
                  [&](const Dataset& data, std::uint64_t run_seed) {
                    PValueTestConfig local = cfg;
                    local.acr.seed = run_seed;
                    local.acr.threads = 1;
                    return run_pvalue_test(pstat, data, local);
                  });
}

ValidityReport simulate_evalue_validity(const EValueTestConfig& cfg, std::size_t n,
                                        std::size_t runs, std::uint64_t seed, int threads) {
  cfg.validate();
  const StatisticSpec estat = universal_inference_evalue_statistic();
  return simulate(n, runs, seed, threads, cfg.alpha,
                  [&](const Dataset& data, std::uint64_t run_seed) {
                    EValueTestConfig local = cfg;
                    local.acr.seed = run_seed;
                    local.acr.threads = 1;
                    return run_evalue_test(estat, data, local);
                  });
}

nlohmann::json to_json(const ValidityReport& report) {
  return {{"runs", report.runs},         {"rejections", report.rejections},
          {"rate", report.rate},         {"mc_se", report.mc_se},
          {"bound", report.bound},       {"mean_g_hat", report.mean_g_hat},
          {"pass", report.pass}};
}

}  // namespace acr
