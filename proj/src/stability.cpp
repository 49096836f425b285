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

#include "acr/stability.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "acr/error.hpp"
#include "acr/parallel.hpp"
#include "acr/random.hpp"
#include "acr/splits.hpp"

namespace acr {

namespace {

// Differences observed in one replication.
struct RepDiffs {
  double valid = 0.0;
  std::vector<double> train;  // one per q
};

std::vector<Index> eligible_rows(const StatisticSpec& stat, const Dataset& data) {
  std::vector<Index> rows;
  for (Index i = 0; i < data.n(); ++i) {
    if (stat.includes(data, i)) rows.push_back(i);
  }
  if (rows.empty()) fail(ErrorCode::kEmptyArm, "no row is scored by " + stat.label);
  return rows;
}

double score_at(const RowScore& score, const Dataset& data, Index row, std::size_t arity,
                std::size_t component) {
  std::vector<double> out(arity);
  score(data, row, out);
  return out[component];
}

RepDiffs one_replication(const StatisticSpec& stat, const Dataset& data, std::size_t b,
                         const std::vector<std::size_t>& qs, const std::vector<Index>& eligible,
                         std::size_t component, Rng& rng) {
  const std::size_t n = data.n();
  // Draw s until it holds a scored row; I uniform over those rows.
  std::vector<Index> block;
  std::vector<Index> scored;
  for (int attempt = 0;; ++attempt) {
    if (attempt == 1000) fail(ErrorCode::kEmptyArm, "blocks rarely contain a scored row");
    block = sample_cross_split(SplitPlan{n, 1, b}, rng).block(0);
    scored.clear();
    for (Index i : block) {
      if (stat.includes(data, i)) scored.push_back(i);
    }
    if (!scored.empty()) break;
  }
  const Index row = scored[rng.uniform_index(scored.size())];
  const std::vector<Index> train = complement(n, block);

  // The perturbed subsets are nested prefixes of one random ordering of s~.
  const std::size_t q_max = qs.empty() ? 0 : *std::max_element(qs.begin(), qs.end());
  std::vector<Index> order = train;
  for (std::size_t t = 0; t < q_max; ++t) {
    std::swap(order[t], order[t + rng.uniform_index(order.size() - t)]);
  }
  std::vector<Index> donors(q_max);
  for (auto& d : donors) d = rng.uniform_index(n);
  const Index valid_donor = eligible[rng.uniform_index(eligible.size())];

  const RowScore base = stat.fit_score(data, train);
  const double psi = score_at(base, data, row, stat.arity, component);

  RepDiffs out;
  out.valid = psi - score_at(base, data, valid_donor, stat.arity, component);
  out.train.reserve(qs.size());
  for (std::size_t q : qs) {
    if (q == 0) {
      out.train.push_back(0.0);
      continue;
    }
    const Dataset perturbed = data.with_rows_replaced(IndexSpan(order.data(), q),
                                                      IndexSpan(donors.data(), q), data);
    const RowScore refit = stat.fit_score(perturbed, train);
    out.train.push_back(psi - score_at(refit, data, row, stat.arity, component));
  }
  return out;
}

void check_linear(const StatisticSpec& stat, std::size_t component) {
  if (!stat.linear_separable || !stat.fit_score) {
    fail(ErrorCode::kMissingScore, stat.label + " does not expose a per-row score");
  }
  require(component < stat.arity, "component out of range");
}

std::vector<RepDiffs> collect(const StatisticSpec& stat, const Dataset& data, std::size_t b,
                              const std::vector<std::size_t>& qs, std::size_t reps,
                              std::uint64_t seed, int threads, std::size_t component) {
  check_linear(stat, component);
  require(b >= 1 && b < data.n(), "need 1 <= b < n");
  require(reps >= 2, "stability needs reps >= 2");
  for (std::size_t q : qs) require(q <= data.n() - b, "q must not exceed n - b");
  const auto eligible = eligible_rows(stat, data);
  return parallel_map(reps, threads, [&](std::size_t i) {
    Rng rng(seed, StreamPurpose::kBootstrap, i);
    return one_replication(stat, data, b, qs, eligible, component, rng);
  });
}

StabilityEstimate moment(const std::vector<double>& diffs, int r) {
  require(r >= 1, "r must be positive");
  StabilityEstimate est;
  est.reps = diffs.size();
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t count = 0;
  for (double d : diffs) {
    const double v = std::pow(std::abs(d), r);
    ++count;
    const double delta = v - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (v - mean);
  }
  est.estimate = mean;
  est.mc_se = count > 1 ? std::sqrt(m2 / static_cast<double>(count - 1) / static_cast<double>(count))
                        : 0.0;
  return est;
}

std::vector<double> block_values(const StatisticSpec& stat, const Dataset& data,
                                 const std::vector<std::vector<Index>>& blocks,
                                 std::size_t component, int threads) {
  return parallel_map(blocks.size(), threads, [&](std::size_t j) {
    const auto train = complement(data.n(), blocks[j]);
    return stat.eval(blocks[j], train, data).at(component);
  });
}

std::map<int, SplitStabilityEstimate> split_stability(const StatisticSpec& stat,
                                                      const Dataset& data, std::size_t b,
                                                      const std::vector<int>& rs,
                                                      std::size_t reps, std::uint64_t seed,
                                                      int threads, std::size_t component,
                                                      std::size_t candidates,
                                                      double exact_limit) {
  const std::size_t n = data.n();
  require(b >= 1 && b < n, "need 1 <= b < n");
  require(component < stat.arity, "component out of range");
  std::map<int, SplitStabilityEstimate> out;

  if (count_cross_splits(n, 1, b) <= exact_limit) {
    std::vector<std::vector<Index>> blocks;
    for (const auto& split : enumerate_cross_splits(n, 1, b, exact_limit)) {
      blocks.push_back(split.block(0));
    }
    const auto values = block_values(stat, data, blocks, component, threads);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    for (int r : rs) {
      out[r] = {std::pow(*hi - *lo, r), 0.0, 1, blocks.size(), true};
    }
    return out;
  }

  require(reps >= 2 && candidates >= 2, "sampled split stability needs reps, candidates >= 2");
  const auto ranges = parallel_map(reps, threads, [&](std::size_t i) {
    Rng rng(seed, StreamPurpose::kMonteCarlo, i);
    std::vector<std::vector<Index>> blocks;
    blocks.reserve(candidates);
    for (std::size_t c = 0; c < candidates; ++c) {
      blocks.push_back(sample_cross_split(SplitPlan{n, 1, b}, rng).block(0));
    }
    const auto values = block_values(stat, data, blocks, component, 1);
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    return *hi - *lo;
  });
  for (int r : rs) {
    const StabilityEstimate m = moment(ranges, r);
    out[r] = {m.estimate, m.mc_se, reps, candidates, false};
  }
  return out;
}

std::vector<std::size_t> default_q_grid(std::size_t b, std::size_t n) {
  std::vector<std::size_t> qs = {1, (b + 1) / 2, b >= 1 ? b - 1 : 0};
  std::vector<std::size_t> out;
  for (std::size_t q : qs) {
    if (q >= 1 && q <= n - b && std::find(out.begin(), out.end(), q) == out.end()) {
      out.push_back(q);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

StabilityEstimate estimate_sample_stability(const StatisticSpec& stat, const Dataset& data,
                                            std::size_t b, std::size_t q, int r,
                                            std::size_t reps, std::uint64_t seed, int threads,
                                            std::size_t component) {
  if (q == 0) {
    check_linear(stat, component);
    return {0.0, 0.0, 0};
  }
  const auto reps_out = collect(stat, data, b, {q}, reps, seed, threads, component);
  std::vector<double> diffs;
  diffs.reserve(reps_out.size());
  for (const auto& rep : reps_out) diffs.push_back(rep.train[0]);
  return moment(diffs, r);
}

StabilityEstimate estimate_validation_stability(const StatisticSpec& stat, const Dataset& data,
                                                std::size_t b, int r, std::size_t reps,
                                                std::uint64_t seed, int threads,
                                                std::size_t component) {
  const auto reps_out = collect(stat, data, b, {}, reps, seed, threads, component);
  std::vector<double> diffs;
  diffs.reserve(reps_out.size());
  for (const auto& rep : reps_out) diffs.push_back(rep.valid);
  return moment(diffs, r);
}

SplitStabilityEstimate estimate_split_stability(const StatisticSpec& stat, const Dataset& data,
                                                std::size_t b, int r, std::size_t reps,
                                                std::uint64_t seed, int threads,
                                                std::size_t component, std::size_t candidates,
                                                double exact_limit) {
  return split_stability(stat, data, b, {r}, reps, seed, threads, component, candidates,
                         exact_limit)
      .at(r);
}

StabilityReport stability_report(const StatisticSpec& stat, const Dataset& data,
                                 const StabilityOptions& options) {
  const std::size_t n = data.n();
  const std::size_t b = options.b;
  require(b >= 1 && b < n, "need 1 <= b < n");
  require(!options.r_grid.empty(), "r grid must not be empty");
  std::vector<std::size_t> qs =
      options.q_grid.empty() ? default_q_grid(b, n) : options.q_grid;
  // sigma_max needs q = 1.
  if (std::find(qs.begin(), qs.end(), 1) == qs.end()) qs.insert(qs.begin(), 1);

  const auto reps_out =
      collect(stat, data, b, qs, options.reps, options.seed, options.threads, options.component);
  StabilityReport report;
  report.reps = options.reps;
  std::vector<double> diffs(reps_out.size());
  for (int r : options.r_grid) {
    for (std::size_t i = 0; i < reps_out.size(); ++i) diffs[i] = reps_out[i].valid;
    report.sigma_valid[r] = moment(diffs, r);
    for (std::size_t iq = 0; iq < qs.size(); ++iq) {
      for (std::size_t i = 0; i < reps_out.size(); ++i) diffs[i] = reps_out[i].train[iq];
      report.sigma_train[{r, qs[iq]}] = moment(diffs, r);
    }
    report.sigma_max[r] =
        std::max(report.sigma_valid[r].estimate, report.sigma_train[{r, 1}].estimate);
  }
  report.zeta = split_stability(stat, data, b, options.r_grid, options.reps, options.seed,
                                options.threads, options.component, options.zeta_candidates,
                                options.zeta_exact_limit);
  return report;
}

double gamma_quantity(double sigma_max2, double sigma_train2_bm1, double k, double phi) {
  require(phi > 0.0 && phi <= 1.0, "phi must lie in (0, 1]");
  if (phi == 1.0) fail(ErrorCode::kDegeneratePhi, "phi = 1 leaves no training rows");
  require(k >= 1.0 && k * phi <= 1.0 + 1e-12, "need 1 <= k <= 1 / phi");
  const double left = (1.0 - k * phi) / (1.0 - phi);
  const double right = (k * phi - phi) / (1.0 - phi);
  return left * 4.0 * sigma_max2 + right * sigma_train2_bm1;
}

double gamma_quantity(const StabilityReport& report, std::size_t k, std::size_t b,
                      std::size_t n) {
  require(b >= 1 && n >= 1, "need b, n >= 1");
  const auto max_it = report.sigma_max.find(2);
  const auto train_it = report.sigma_train.find({2, b - 1});
  require(max_it != report.sigma_max.end(), "report lacks sigma_max(2)");
  require(train_it != report.sigma_train.end(), "report lacks sigma_train(2, b - 1)");
  return gamma_quantity(max_it->second, train_it->second.estimate, static_cast<double>(k),
                        static_cast<double>(b) / static_cast<double>(n));
}

nlohmann::json to_json(const StabilityReport& report) {
  auto entry = [](const StabilityEstimate& e) {
    return nlohmann::json{{"estimate", e.estimate}, {"mc_se", e.mc_se}, {"reps", e.reps}};
  };
  nlohmann::json j;
  j["reps"] = report.reps;
  j["sigma_train"] = nlohmann::json::array();
  for (const auto& [key, e] : report.sigma_train) {
    auto row = entry(e);
    row["r"] = key.first;
    row["q"] = key.second;
    j["sigma_train"].push_back(row);
  }
  j["sigma_valid"] = nlohmann::json::array();
  for (const auto& [r, e] : report.sigma_valid) {
    auto row = entry(e);
    row["r"] = r;
    j["sigma_valid"].push_back(row);
  }
  j["sigma_max"] = nlohmann::json::array();
  for (const auto& [r, v] : report.sigma_max) {
    j["sigma_max"].push_back({{"r", r}, {"estimate", v}});
  }
  j["zeta"] = nlohmann::json::array();
  for (const auto& [r, e] : report.zeta) {
    j["zeta"].push_back({{"r", r},
                         {"estimate", e.estimate},
                         {"mc_se", e.mc_se},
                         {"reps", e.reps},
                         {"candidates", e.candidates},
                         {"method", e.exact ? "exact" : "sampled"}});
  }
  return j;
}

}  // namespace acr
