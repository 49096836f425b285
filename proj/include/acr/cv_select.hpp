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

// Reproducible choice of the lasso penalty by cross-validation.
//
// The penalties are ordered increasingly so that the last one is lambda_max,
// the null model. The per-split risk differences against it are stabilized
// with run_acr (one tolerance per penalty, from select_tolerances), and the
// penalty minimizing the stabilized differences, with 0 for the baseline, is
// refitted on all rows.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "json.hpp"

#include "acr/acr.hpp"
#include "acr/dataset.hpp"
#include "acr/lasso.hpp"
#include "acr/statistics.hpp"

namespace acr {

struct CvSelectConfig {
  std::size_t grid_length = 20;
  double grid_ratio = 0.01;
  double xi_floor = 1e-4;
  double beta = 0.05;
  std::size_t k = 10;
  std::size_t b = 0;  // 0: n / k
  std::size_t g_init = 10;
  std::size_t g_max = 1'000'000;
  std::size_t g_pilot = 20;
  double p_cut = 0.2;
  RowSubset subset = RowSubset::kAll;
  LassoOptions lasso;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct CvSelectResult {
  std::vector<double> lambdas;     // increasing; the last is lambda_max
  std::vector<double> stabilized;  // risk differences, 0 appended for the baseline
  ToleranceSelection tolerances;
  AcrResult acr;
  std::size_t lambda_index = 0;
  double lambda_star = 0.0;
  bool tie = false;  // another penalty attains the same minimum exactly
  LassoFit fit;      // on all rows at lambda_star
  std::vector<std::size_t> support;  // 0-based covariate indices
};

// Requires at least 2 covariates. Among exact minimizers the largest
// penalty wins.
CvSelectResult cv_select(const Dataset& data, const CvSelectConfig& cfg);

nlohmann::json to_json(const CvSelectResult& result, const Dataset& data);

}  // namespace acr
