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

// Sample-split statistics.
//
// A block statistic T(s, D) is evaluated on a block s with nuisances fitted
// on its complement. Statistics that are averages of a per-row score,
//
//   T(s, D) = mean_{i in s} psi(D_i, eta_hat(D_complement)),
//
// additionally expose the score fitter so that pooled scores and stability
// perturbations can be computed.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "acr/dataset.hpp"
#include "acr/lasso.hpp"
#include "acr/splits.hpp"

namespace acr {

// psi(D_row, eta_hat) for a fitted nuisance, written into `out` (length =
// arity).
using RowScore = std::function<void(const Dataset& data, Index row, std::span<double> out)>;
// Fits eta_hat on the given training rows of `data`.
using ScoreFitter = std::function<RowScore(const Dataset& data, IndexSpan train)>;
// Rows on which the score is defined (e.g. one treatment arm).
using RowFilter = std::function<bool(const Dataset& data, Index row)>;
using BlockEval = std::function<std::vector<double>(IndexSpan block, IndexSpan complement,
                                                    const Dataset& data)>;

struct StatisticSpec {
  std::size_t arity = 1;
  std::string label;
  bool linear_separable = false;
  BlockEval eval;
  // Present iff linear_separable.
  ScoreFitter fit_score;
  // Empty means every row.
  RowFilter row_filter;

  bool includes(const Dataset& data, Index row) const {
    return !row_filter || row_filter(data, row);
  }
};

// Builds a linear statistic whose eval averages the fitted score over the
// block rows passing `filter`. Index order inside the block and complement
// never affects the output: both are canonicalized before use.
StatisticSpec make_linear_statistic(std::size_t arity, std::string label, ScoreFitter fitter,
                                    RowFilter filter = {});

// A statistic of a whole cross-split, a(r, D).
struct CrossSplitStatistic {
  std::size_t arity = 1;
  std::string label;
  std::function<std::vector<double>(const CrossSplit& split, const Dataset& data, int threads)>
      evaluate;
};

// a(r, D) = (1/k) sum_j T(s_j, D), componentwise. Block evaluations may run
// on `threads` workers; results are combined in block order.
std::vector<double> eval_cross_split(const StatisticSpec& stat, const CrossSplit& split,
                                     const Dataset& data, int threads = 1);

CrossSplitStatistic cross_split_statistic(StatisticSpec stat);

// Scores of every row of every block, each computed with the nuisance fitted
// on that block's complement; concatenated in block order.
std::vector<std::vector<double>> pooled_scores(const StatisticSpec& stat, const CrossSplit& split,
                                               const Dataset& data, int threads = 1);

// ---------------------------------------------------------------------------
// Cross-validated lasso risk.

enum class RowSubset { kAll, kTreated, kControl };

// Per-lambda out-of-sample squared error of lasso fits on the complement.
// The lambda path is fitted in the given order with warm starts.
StatisticSpec cv_mse_statistic(std::vector<double> lambdas, RowSubset subset = RowSubset::kAll,
                               LassoOptions options = {});

// Component l is base_l - base_last, computed per split. Arity d - 1.
StatisticSpec mse_difference_statistic(const StatisticSpec& base);

// ---------------------------------------------------------------------------
// AIPW / double machine learning.

struct Propensity {
  enum class Kind { kKnown, kLpm };
  Kind kind = Kind::kKnown;
  double p0 = 0.5;

  static Propensity known(double p) { return {Kind::kKnown, p}; }
  static Propensity lpm() { return {Kind::kLpm, 0.5}; }
};

struct AipwOptions {
  Propensity propensity;
  double eps_pi = 0.01;
  LassoOptions lasso;
};

// Fitted nuisances of the AIPW score.
struct AipwComponents {
  LassoFit mu1;
  LassoFit mu0;
  std::optional<LassoFit> pi_model;  // empty: constant propensity
  double pi_constant = 0.5;
  double eps_pi = 0.01;

  double pi(const Dataset& data, Index row) const;
  double score(const Dataset& data, Index row) const;
};

// psi = mu1 - mu0 + w (y - mu1) / pi - (1 - w)(y - mu0) / (1 - pi).
double aipw_score(double y, double w, double mu1, double mu0, double pi) noexcept;

// Deterministic penalty sd(response over rows) * sqrt(2 log(p) / |rows|).
double plug_in_lambda(std::span<const double> response, IndexSpan rows, std::size_t p);

AipwComponents fit_aipw(const Dataset& data, IndexSpan train, const AipwOptions& options = {});

StatisticSpec aipw_statistic(const AipwOptions& options = {});

// (1/n) sqrt(sum_i (psi_i - mean psi)^2) over pooled cross-fit scores.
double dml_standard_error(std::span<const double> pooled);
// Requires a complete cross-split.
double dml_standard_error(const CrossSplit& split, const Dataset& data,
                          const StatisticSpec& aipw, int threads = 1);

// 1 - Phi(est / se); throws kDegenerateSe unless se > 0.
double pvalue_from(double est, double se);

CrossSplitStatistic pvalue_statistic(CrossSplitStatistic estimator, CrossSplitStatistic se);
CrossSplitStatistic dml_estimate_statistic(const AipwOptions& options = {});
CrossSplitStatistic dml_se_statistic(const AipwOptions& options = {});
// The p-value of the cross-fit estimate, with one nuisance fit per block.
CrossSplitStatistic dml_pvalue_statistic(const AipwOptions& options = {});

}  // namespace acr
