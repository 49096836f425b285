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

// Lasso regression by cyclic coordinate descent.
//
// The problem solved is
//
//   minimize (1/m) sum_i (y_i - b0 - z_i' beta)^2 + lambda sum_j |beta_j|
//
// over the m selected rows, where z are the covariates standardized to mean
// zero and unit (1/m) variance within those rows. Coefficients are reported
// on the original scale. Stationarity reads (2/m) z_j'(y - b0 - Z beta) =
// lambda sign(beta_j) for active coordinates, so lambda_max is
// max_j |(2/m) z_j'(y - ybar)|.
//
// The solver works on sufficient statistics (standardized Gram matrix and
// cross-products), so a sweep costs O(p^2) regardless of m.

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "acr/dataset.hpp"

namespace acr {

struct LassoOptions {
  double tol = 1e-7;  // on max standardized coefficient change per sweep
  int max_iter = 10'000;
};

struct LassoFit {
  std::vector<double> coefficients;  // original scale, length p
  double intercept = 0.0;
  double lambda = 0.0;
  int iterations = 0;
  bool converged = true;
  std::vector<double> center;  // per-column mean used for standardization
  std::vector<double> scale;   // per-column (1/m) sd; 0 marks a dropped column

  double predict(const Dataset& data, Index row) const;
  std::size_t support_size() const;
};

// Raw sums over a row set about a fixed shift. Sums over disjoint row sets
// subtract, which lets a training set be handled through its (smaller)
// complement.
struct LassoMoments {
  std::size_t rows = 0;
  std::vector<double> shift_x;
  double shift_y = 0.0;
  std::vector<double> sum_x;   // sum (x - shift_x)
  double sum_y = 0.0;          // sum (y - shift_y)
  std::vector<double> sum_xx;  // p x p row-major, upper triangle
  std::vector<double> sum_xy;
};

LassoMoments lasso_moments(const Dataset& data, IndexSpan rows, std::span<const double> response,
                           std::span<const double> shift_x, double shift_y);
// Moments of total's rows minus part's rows; part must be a subset with the
// same shift.
LassoMoments subtract_moments(const LassoMoments& total, const LassoMoments& part);

// Standardized sufficient statistics of (X, y) over a row subset.
class LassoProblem {
 public:
  explicit LassoProblem(const LassoMoments& moments);
  // Rows `rows` of `data`, using the dataset outcome.
  LassoProblem(const Dataset& data, IndexSpan rows);
  // Same, with an explicit response vector indexed like the dataset rows.
  LassoProblem(const Dataset& data, IndexSpan rows, std::span<const double> response);
  // Dense row-major design (rows x p).
  LassoProblem(std::span<const double> x_row_major, std::size_t rows, std::size_t p,
               std::span<const double> y);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t p() const noexcept { return center_.size(); }
  double lambda_max() const noexcept;

  // Single fit from a zero start.
  LassoFit fit(double lambda, const LassoOptions& options = {}) const;
  // Warm-started fits along `lambdas`, in the given order.
  std::vector<LassoFit> fit_path(std::span<const double> lambdas,
                                 const LassoOptions& options = {}) const;

 private:
  void finish_setup();
  LassoFit solve(double lambda, std::vector<double>& beta, const LassoOptions& options) const;

  std::size_t rows_ = 0;
  double y_mean_ = 0.0;
  std::vector<double> center_;
  std::vector<double> scale_;
  std::vector<double> gram_;   // p x p, row-major, standardized
  std::vector<double> cross_;  // (1/m) z_j'(y - ybar)
};

// Builds problems on training subsets of a few datasets, reusing full-data
// sums: when the training rows are most of the eligible rows, their moments
// are the eligible rows' moments minus those of the excluded rows. The path
// taken depends only on set sizes, so results do not depend on cache state.
class LassoMomentCache {
 public:
  explicit LassoMomentCache(std::size_t capacity = 16) : capacity_(capacity) {}

  // `rows` is sorted and contained in `eligible()`, which must be sorted and
  // identical for a given (data, tag, response).
  LassoProblem problem(const Dataset& data, std::uint64_t tag, IndexSpan rows,
                       std::span<const double> response,
                       const std::function<std::vector<Index>()>& eligible);

 private:
  struct Entry {
    std::uint64_t uid;
    std::uint64_t tag;
    const double* response;
    std::vector<Index> eligible;
    LassoMoments total;
  };
  std::shared_ptr<const Entry> lookup(const Dataset& data, std::uint64_t tag,
                                      std::span<const double> response,
                                      const std::function<std::vector<Index>()>& eligible);

  std::size_t capacity_;
  std::mutex mutex_;
  std::deque<std::shared_ptr<const Entry>> entries_;  // most recent first
};

LassoFit fit_lasso(std::span<const double> x_row_major, std::size_t rows, std::size_t p,
                   std::span<const double> y, double lambda, const LassoOptions& options = {});

// `length` log-spaced values from lambda_max down to ratio * lambda_max,
// computed on all rows of `data`. Throws kDegenerateDesign if lambda_max = 0.
std::vector<double> lambda_grid(const Dataset& data, std::size_t length, double ratio);
std::vector<double> lambda_grid(double lambda_max, std::size_t length, double ratio);

}  // namespace acr
