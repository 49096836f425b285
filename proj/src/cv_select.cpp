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

#include "acr/cv_select.hpp"

#include <algorithm>
#include <numeric>

#include "acr/error.hpp"

namespace acr {

namespace {

std::vector<Index> subset_rows(const Dataset& data, RowSubset subset) {
  std::vector<Index> rows;
  for (Index i = 0; i < data.n(); ++i) {
    if (subset == RowSubset::kAll || (subset == RowSubset::kTreated && data.w()[i] == 1.0) ||
        (subset == RowSubset::kControl && data.w()[i] == 0.0)) {
      rows.push_back(i);
    }
  }
  return rows;
}

}  // namespace

CvSelectResult cv_select(const Dataset& data, const CvSelectConfig& cfg) {
  require(data.p() >= 2, "cv-select needs at least 2 covariates");
  require(cfg.subset == RowSubset::kAll || data.has_treatment(),
          "an arm subset needs a treatment column");
  const std::vector<Index> rows = subset_rows(data, cfg.subset);
  if (rows.size() < 2) fail(ErrorCode::kEmptyArm, "too few rows in the selected arm");

  CvSelectResult out;
  out.lambdas = lambda_grid(LassoProblem(data, rows).lambda_max(), cfg.grid_length,
                            cfg.grid_ratio);
  std::reverse(out.lambdas.begin(), out.lambdas.end());

  const StatisticSpec base = cv_mse_statistic(out.lambdas, cfg.subset, cfg.lasso);
  const StatisticSpec diff = mse_difference_statistic(base);
  const SplitPlan plan{data.n(), cfg.k, cfg.b == 0 ? data.n() / cfg.k : cfg.b};
  plan.validate();
  out.tolerances = select_tolerances(diff, data, plan, cfg.g_pilot, cfg.xi_floor, cfg.p_cut,
                                     cfg.seed, cfg.threads);

  AcrConfig acr_cfg;
  acr_cfg.xi = out.tolerances.xi;
  acr_cfg.beta = cfg.beta;
  acr_cfg.k = cfg.k;
  acr_cfg.b = plan.b;
  acr_cfg.g_init = cfg.g_init;
  acr_cfg.g_max = cfg.g_max;
  acr_cfg.seed = cfg.seed;
  acr_cfg.threads = cfg.threads;
  out.acr = run_acr(diff, data, acr_cfg);

  out.stabilized = out.acr.aggregate;
  out.stabilized.push_back(0.0);
  const double best = *std::min_element(out.stabilized.begin(), out.stabilized.end());
  std::size_t minimizers = 0;
  for (std::size_t l = 0; l < out.stabilized.size(); ++l) {
    if (out.stabilized[l] == best) {
      out.lambda_index = l;  // increasing order: the last hit is the largest penalty
      ++minimizers;
    }
  }
  out.tie = minimizers > 1;
  out.lambda_star = out.lambdas[out.lambda_index];
  out.fit = LassoProblem(data, rows).fit(out.lambda_star, cfg.lasso);
  for (std::size_t j = 0; j < out.fit.coefficients.size(); ++j) {
    if (out.fit.coefficients[j] != 0.0) out.support.push_back(j);
  }
  return out;
}

nlohmann::json to_json(const CvSelectResult& r, const Dataset& data) {
  nlohmann::json support = nlohmann::json::array();
  for (std::size_t j : r.support) support.push_back(data.column_names()[j]);
  nlohmann::json tol = {{"xi", r.tolerances.xi},
                        {"pilot_mean", r.tolerances.pilot_mean},
                        {"pilot_vhat", r.tolerances.pilot_vhat},
                        {"q", r.tolerances.q},
                        {"no_component_passed", r.tolerances.no_component_passed}};
  tol["reference_index"] =
      r.tolerances.reference ? nlohmann::json(*r.tolerances.reference) : nlohmann::json(nullptr);
  return {{"lambdas", r.lambdas},
          {"stabilized_differences", r.stabilized},
          {"g_hat", r.acr.g_hat},
          {"g_hat_max", r.acr.g_hat_max},
          {"v_hat", r.acr.v_hat},
          {"cv", r.acr.cv},
          {"capped", r.acr.capped},
          {"stopped_by_cap", r.acr.stopped_by_cap},
          {"early_stop_warning", r.acr.early_stop_warning},
          {"tolerances", tol},
          {"lambda_index", r.lambda_index},
          {"lambda_star", r.lambda_star},
          {"tie", r.tie},
          {"intercept", r.fit.intercept},
          {"coefficients", r.fit.coefficients},
          {"support", support}};
}

}  // namespace acr
