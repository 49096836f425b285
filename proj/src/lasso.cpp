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

#include "acr/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "acr/error.hpp"

namespace acr {

namespace {

double soft_threshold(double z, double gamma) {
  if (z > gamma) return z - gamma;
  if (z < -gamma) return z + gamma;
  return 0.0;
}

bool is_constant(double sd, double mean) { return sd <= 1e-10 * std::max(1.0, std::fabs(mean)); }

}  // namespace

double LassoFit::predict(const Dataset& data, Index row) const {
  double out = intercept;
  for (std::size_t j = 0; j < coefficients.size(); ++j) {
    if (coefficients[j] != 0.0) out += coefficients[j] * data.x(row, j);
  }
  return out;
}

std::size_t LassoFit::support_size() const {
  return static_cast<std::size_t>(
      std::count_if(coefficients.begin(), coefficients.end(), [](double c) { return c != 0.0; }));
}

LassoProblem::LassoProblem(const Dataset& data, IndexSpan rows)
    : LassoProblem(data, rows, data.y()) {}

namespace {

// Four independent accumulators so the loop pipelines without reassociation.
double dot(const double* a, const double* b, std::size_t m) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= m; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < m; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

}  // namespace

LassoMoments lasso_moments(const Dataset& data, IndexSpan rows, std::span<const double> response,
                           std::span<const double> shift_x, double shift_y) {
  const std::size_t p = data.p();
  const std::size_t m = rows.size();
  require(shift_x.size() == p, "shift length must equal the covariate count");
  LassoMoments out;
  out.rows = m;
  out.shift_x.assign(shift_x.begin(), shift_x.end());
  out.shift_y = shift_y;
  out.sum_x.assign(p, 0.0);
  out.sum_xx.assign(p * p, 0.0);
  out.sum_xy.assign(p, 0.0);
  if (m == 0) return out;

  // Shifted columns gathered contiguously: p columns of length m, then y.
  std::vector<double> buf((p + 1) * m);
  double* yc = &buf[p * m];
  for (std::size_t i = 0; i < m; ++i) yc[i] = response[rows[i]] - shift_y;
  for (std::size_t j = 0; j < p; ++j) {
    const auto col = data.x(j);
    double* c = &buf[j * m];
    for (std::size_t i = 0; i < m; ++i) c[i] = col[rows[i]] - shift_x[j];
  }
  for (std::size_t i = 0; i < m; ++i) out.sum_y += yc[i];
  for (std::size_t j = 0; j < p; ++j) {
    const double* cj = &buf[j * m];
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += cj[i];
    out.sum_x[j] = s;
    out.sum_xy[j] = dot(cj, yc, m);
    for (std::size_t t = j; t < p; ++t) out.sum_xx[j * p + t] = dot(cj, &buf[t * m], m);
  }
  return out;
}

LassoMoments subtract_moments(const LassoMoments& total, const LassoMoments& part) {
  require(part.rows <= total.rows && part.shift_x == total.shift_x &&
              part.shift_y == total.shift_y,
          "moments must share a shift and be nested");
  LassoMoments out = total;
  out.rows -= part.rows;
  out.sum_y -= part.sum_y;
  for (std::size_t j = 0; j < out.sum_x.size(); ++j) {
    out.sum_x[j] -= part.sum_x[j];
    out.sum_xy[j] -= part.sum_xy[j];
  }
  for (std::size_t t = 0; t < out.sum_xx.size(); ++t) out.sum_xx[t] -= part.sum_xx[t];
  return out;
}

LassoProblem::LassoProblem(const LassoMoments& moments) : rows_(moments.rows) {
  require(rows_ >= 2, "lasso needs at least 2 rows");
  const std::size_t p = moments.shift_x.size();
  const double m = static_cast<double>(rows_);
  y_mean_ = moments.shift_y + moments.sum_y / m;
  center_.resize(p);
  gram_.assign(p * p, 0.0);
  cross_.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    const double sj = moments.sum_x[j];
    center_[j] = moments.shift_x[j] + sj / m;
    cross_[j] = moments.sum_xy[j] - sj * moments.sum_y / m;
    for (std::size_t t = j; t < p; ++t) {
      gram_[j * p + t] = moments.sum_xx[j * p + t] - sj * moments.sum_x[t] / m;
    }
    // Rounding can leave a tiny negative sum of squares for a constant column.
    gram_[j * p + j] = std::max(gram_[j * p + j], 0.0);
  }
  finish_setup();
}

namespace {

LassoMoments centered_moments(const Dataset& data, IndexSpan rows,
                              std::span<const double> response) {
  require(rows.size() >= 2, "lasso needs at least 2 rows");
  const double inv_m = 1.0 / static_cast<double>(rows.size());
  std::vector<double> shift(data.p(), 0.0);
  for (std::size_t j = 0; j < data.p(); ++j) {
    const auto col = data.x(j);
    double s = 0.0;
    for (Index i : rows) s += col[i];
    shift[j] = s * inv_m;
  }
  double shift_y = 0.0;
  for (Index i : rows) shift_y += response[i];
  shift_y *= inv_m;
  return lasso_moments(data, rows, response, shift, shift_y);
}

}  // namespace

LassoProblem::LassoProblem(const Dataset& data, IndexSpan rows, std::span<const double> response)
    : LassoProblem(centered_moments(data, rows, response)) {}

LassoProblem::LassoProblem(std::span<const double> x_row_major, std::size_t rows, std::size_t p,
                           std::span<const double> y)
    : rows_(rows) {
  require(rows_ >= 2, "lasso needs at least 2 rows");
  require(x_row_major.size() == rows * p && y.size() == rows, "design shape mismatch");
  const double inv_m = 1.0 / static_cast<double>(rows_);
  center_.assign(p, 0.0);
  for (std::size_t i = 0; i < rows; ++i) {
    y_mean_ += y[i];
    for (std::size_t j = 0; j < p; ++j) center_[j] += x_row_major[i * p + j];
  }
  y_mean_ *= inv_m;
  for (double& m : center_) m *= inv_m;
  gram_.assign(p * p, 0.0);
  cross_.assign(p, 0.0);
  std::vector<double> c(p);
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < p; ++j) c[j] = x_row_major[i * p + j] - center_[j];
    const double yc = y[i] - y_mean_;
    for (std::size_t j = 0; j < p; ++j) {
      cross_[j] += c[j] * yc;
      for (std::size_t t = j; t < p; ++t) gram_[j * p + t] += c[j] * c[t];
    }
  }
  finish_setup();
}

// Turns raw centered sums into standardized moments and fills the lower
// triangle of the Gram matrix.
void LassoProblem::finish_setup() {
  const std::size_t p = center_.size();
  const double inv_m = 1.0 / static_cast<double>(rows_);
  scale_.assign(p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    const double sd = std::sqrt(gram_[j * p + j] * inv_m);
    scale_[j] = is_constant(sd, center_[j]) ? 0.0 : sd;
  }
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t t = j; t < p; ++t) {
      double v = 0.0;
      if (scale_[j] > 0.0 && scale_[t] > 0.0) {
        v = gram_[j * p + t] * inv_m / (scale_[j] * scale_[t]);
      }
      gram_[j * p + t] = v;
      gram_[t * p + j] = v;
    }
    cross_[j] = scale_[j] > 0.0 ? cross_[j] * inv_m / scale_[j] : 0.0;
  }
}

double LassoProblem::lambda_max() const noexcept {
  double out = 0.0;
  for (double c : cross_) out = std::max(out, 2.0 * std::fabs(c));
  return out;
}

LassoFit LassoProblem::solve(double lambda, std::vector<double>& beta,
                             const LassoOptions& options) const {
  require(lambda >= 0.0, "lambda must be nonnegative");
  const std::size_t p = center_.size();
  const double half_lambda = 0.5 * lambda;

  // residual correlations r_j = cross_j - (G beta)_j
  std::vector<double> r(cross_);
  for (std::size_t j = 0; j < p; ++j) {
    if (beta[j] == 0.0) continue;
    for (std::size_t t = 0; t < p; ++t) r[t] -= gram_[t * p + j] * beta[j];
  }

  LassoFit fit;
  fit.lambda = lambda;
  fit.converged = false;
  int sweep = 0;
  while (sweep < options.max_iter) {
    ++sweep;
    double max_change = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      if (scale_[j] == 0.0) continue;
      const double gjj = gram_[j * p + j];
      const double u = r[j] + gjj * beta[j];
      const double updated = soft_threshold(u, half_lambda) / gjj;
      const double delta = updated - beta[j];
      if (delta == 0.0) continue;
      beta[j] = updated;
      const double* col = &gram_[j * p];
      for (std::size_t t = 0; t < p; ++t) r[t] -= col[t] * delta;
      max_change = std::max(max_change, std::fabs(delta));
    }
    if (max_change < options.tol) {
      fit.converged = true;
      break;
    }
  }
  fit.iterations = sweep;
  fit.center = center_;
  fit.scale = scale_;
  fit.coefficients.assign(p, 0.0);
  fit.intercept = y_mean_;
  for (std::size_t j = 0; j < p; ++j) {
    if (scale_[j] == 0.0 || beta[j] == 0.0) continue;
    fit.coefficients[j] = beta[j] / scale_[j];
    fit.intercept -= fit.coefficients[j] * center_[j];
  }
  return fit;
}

LassoFit LassoProblem::fit(double lambda, const LassoOptions& options) const {
  std::vector<double> beta(center_.size(), 0.0);
  return solve(lambda, beta, options);
}

std::vector<LassoFit> LassoProblem::fit_path(std::span<const double> lambdas,
                                             const LassoOptions& options) const {
  std::vector<double> beta(center_.size(), 0.0);
  std::vector<LassoFit> out;
  out.reserve(lambdas.size());
  for (double lambda : lambdas) out.push_back(solve(lambda, beta, options));
  return out;
}

std::shared_ptr<const LassoMomentCache::Entry> LassoMomentCache::lookup(
    const Dataset& data, std::uint64_t tag, std::span<const double> response,
    const std::function<std::vector<Index>()>& eligible) {
  {
    std::lock_guard lock(mutex_);
    for (auto it = entries_.begin(); it != entries_.end(); ++it) {
      const auto& e = **it;
      if (e.uid == data.uid() && e.tag == tag && e.response == response.data()) {
        auto hit = *it;
        entries_.erase(it);
        entries_.push_front(hit);
        return hit;
      }
    }
  }
  auto entry = std::make_shared<Entry>();
  entry->uid = data.uid();
  entry->tag = tag;
  entry->response = response.data();
  entry->eligible = eligible();
  entry->total = centered_moments(data, entry->eligible, response);
  std::lock_guard lock(mutex_);
  entries_.push_front(entry);
  if (entries_.size() > capacity_) entries_.pop_back();
  return entry;
}

LassoProblem LassoMomentCache::problem(const Dataset& data, std::uint64_t tag, IndexSpan rows,
                                       std::span<const double> response,
                                       const std::function<std::vector<Index>()>& eligible) {
  const auto entry = lookup(data, tag, response, eligible);
  const LassoMoments& total = entry->total;
  require(rows.size() <= total.rows, "training rows exceed the eligible rows");
  if (2 * rows.size() <= total.rows) {
    return LassoProblem(lasso_moments(data, rows, response, total.shift_x, total.shift_y));
  }
  std::vector<Index> excluded;
  excluded.reserve(total.rows - rows.size());
  std::set_difference(entry->eligible.begin(), entry->eligible.end(), rows.begin(), rows.end(),
                      std::back_inserter(excluded));
  require(excluded.size() + rows.size() == total.rows,
          "training rows must be a sorted subset of the eligible rows");
  return LassoProblem(subtract_moments(
      total, lasso_moments(data, excluded, response, total.shift_x, total.shift_y)));
}

LassoFit fit_lasso(std::span<const double> x_row_major, std::size_t rows, std::size_t p,
                   std::span<const double> y, double lambda, const LassoOptions& options) {
  return LassoProblem(x_row_major, rows, p, y).fit(lambda, options);
}

std::vector<double> lambda_grid(double lambda_max, std::size_t length, double ratio) {
  require(length >= 2, "lambda grid length must be at least 2");
  require(ratio > 0.0 && ratio < 1.0, "lambda ratio must lie in (0, 1)");
  if (!(lambda_max > 0.0)) fail(ErrorCode::kDegenerateDesign, "lambda_max is zero");
  std::vector<double> out(length);
  const double denom = static_cast<double>(length - 1);
  for (std::size_t l = 0; l < length; ++l) {
    out[l] = lambda_max * std::pow(ratio, static_cast<double>(l) / denom);
  }
  out.back() = lambda_max * ratio;
  return out;
}

std::vector<double> lambda_grid(const Dataset& data, std::size_t length, double ratio) {
  std::vector<Index> rows(data.n());
  for (Index i = 0; i < rows.size(); ++i) rows[i] = i;
  return lambda_grid(LassoProblem(data, rows).lambda_max(), length, ratio);
}

}  // namespace acr
