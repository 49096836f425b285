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

#include "acr/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>

#include "acr/error.hpp"
#include "acr/normal.hpp"
#include "acr/parallel.hpp"

namespace acr {

namespace {

// Sorted view of an index set; copies only when the input is unsorted.
class SortedIndices {
 public:
  explicit SortedIndices(IndexSpan indices) {
    if (std::is_sorted(indices.begin(), indices.end())) {
      view_ = indices;
    } else {
      copy_.assign(indices.begin(), indices.end());
      std::sort(copy_.begin(), copy_.end());
      view_ = copy_;
    }
  }
  SortedIndices(const SortedIndices&) = delete;
  SortedIndices& operator=(const SortedIndices&) = delete;

  IndexSpan view() const noexcept { return view_; }

 private:
  std::vector<Index> copy_;
  IndexSpan view_;
};

std::vector<Index> filter_rows(const Dataset& data, IndexSpan rows, const RowFilter& filter) {
  std::vector<Index> out;
  out.reserve(rows.size());
  for (Index i : rows) {
    if (!filter || filter(data, i)) out.push_back(i);
  }
  return out;
}

RowFilter subset_filter(RowSubset subset) {
  switch (subset) {
    case RowSubset::kAll: return {};
    case RowSubset::kTreated:
      return [](const Dataset& d, Index i) { return d.w()[i] == 1.0; };
    case RowSubset::kControl:
      return [](const Dataset& d, Index i) { return d.w()[i] == 0.0; };
  }
  return {};
}

}  // namespace

StatisticSpec make_linear_statistic(std::size_t arity, std::string label, ScoreFitter fitter,
                                    RowFilter filter) {
  require(arity >= 1, "statistic arity must be at least 1");
  StatisticSpec spec;
  spec.arity = arity;
  spec.label = std::move(label);
  spec.linear_separable = true;
  spec.fit_score = fitter;
  spec.row_filter = filter;
  spec.eval = [arity, fitter, filter](IndexSpan block, IndexSpan complement,
                                      const Dataset& data) {
    const SortedIndices train(complement);
    const SortedIndices valid(block);
    const RowScore score = fitter(data, train.view());
    std::vector<double> sum(arity, 0.0);
    std::vector<double> psi(arity);
    std::size_t count = 0;
    for (Index i : valid.view()) {
      if (filter && !filter(data, i)) continue;
      score(data, i, psi);
      for (std::size_t c = 0; c < arity; ++c) sum[c] += psi[c];
      ++count;
    }
    if (count == 0) fail(ErrorCode::kEmptyArm, "no scored rows in the evaluation block");
    for (double& v : sum) v /= static_cast<double>(count);
    return sum;
  };
  return spec;
}

std::vector<double> eval_cross_split(const StatisticSpec& stat, const CrossSplit& split,
                                     const Dataset& data, int threads) {
  require(split.n() == data.n(), "cross-split size does not match the dataset");
  const auto per_block = parallel_map(split.k(), threads, [&](std::size_t j) {
    const auto comp = complement(split, j);
    auto value = stat.eval(split.block(j), comp, data);
    if (value.size() != stat.arity) fail(ErrorCode::kArityMismatch, "statistic arity mismatch");
    return value;
  });
  std::vector<double> out(stat.arity, 0.0);
  for (const auto& value : per_block) {
    for (std::size_t c = 0; c < stat.arity; ++c) out[c] += value[c];
  }
  for (double& v : out) v /= static_cast<double>(split.k());
  return out;
}

CrossSplitStatistic cross_split_statistic(StatisticSpec stat) {
  CrossSplitStatistic out;
  out.arity = stat.arity;
  out.label = stat.label;
  out.evaluate = [stat = std::move(stat)](const CrossSplit& split, const Dataset& data,
                                          int threads) {
    return eval_cross_split(stat, split, data, threads);
  };
  return out;
}

std::vector<std::vector<double>> pooled_scores(const StatisticSpec& stat, const CrossSplit& split,
                                               const Dataset& data, int threads) {
  if (!stat.fit_score) fail(ErrorCode::kMissingScore, "statistic has no score accessor");
  const auto per_block = parallel_map(split.k(), threads, [&](std::size_t j) {
    const auto comp = complement(split, j);
    const RowScore score = stat.fit_score(data, comp);
    std::vector<std::vector<double>> rows;
    for (Index i : split.block(j)) {
      if (!stat.includes(data, i)) continue;
      std::vector<double> psi(stat.arity);
      score(data, i, psi);
      rows.push_back(std::move(psi));
    }
    return rows;
  });
  std::vector<std::vector<double>> out;
  for (const auto& rows : per_block) out.insert(out.end(), rows.begin(), rows.end());
  return out;
}

// ---------------------------------------------------------------------------

StatisticSpec cv_mse_statistic(std::vector<double> lambdas, RowSubset subset,
                               LassoOptions options) {
  require(!lambdas.empty(), "lambda vector must be nonempty");
  for (double l : lambdas) require(l >= 0.0, "lambda values must be nonnegative");
  RowFilter filter = subset_filter(subset);
  const std::size_t arity = lambdas.size();
  auto cache = std::make_shared<LassoMomentCache>();
  const auto tag = static_cast<std::uint64_t>(subset);
  auto fitter = [lambdas = std::move(lambdas), filter, options, cache, tag](
                    const Dataset& data, IndexSpan train) -> RowScore {
    const SortedIndices sorted(train);
    std::vector<Index> rows = filter_rows(data, sorted.view(), filter);
    if (rows.size() < 2) fail(ErrorCode::kEmptyArm, "too few training rows in the subset");
    auto eligible = [&data, &filter] {
      std::vector<Index> all(data.n());
      std::iota(all.begin(), all.end(), Index{0});
      return filter_rows(data, all, filter);
    };
    auto fits = std::make_shared<const std::vector<LassoFit>>(
        cache->problem(data, tag, rows, data.y(), eligible).fit_path(lambdas, options));
    return [fits](const Dataset& d, Index i, std::span<double> out) {
      const double y = d.y()[i];
      for (std::size_t l = 0; l < fits->size(); ++l) {
        const double r = y - (*fits)[l].predict(d, i);
        out[l] = r * r;
      }
    };
  };
  std::string label = "cv-mse";
  if (subset == RowSubset::kTreated) label += "-treated";
  if (subset == RowSubset::kControl) label += "-control";
  return make_linear_statistic(arity, std::move(label), std::move(fitter), std::move(filter));
}

StatisticSpec mse_difference_statistic(const StatisticSpec& base) {
  require(base.arity >= 2, "difference statistic needs a base of arity >= 2");
  const std::size_t d = base.arity;
  StatisticSpec out;
  out.arity = d - 1;
  out.label = base.label + "-diff";
  out.linear_separable = base.linear_separable;
  out.row_filter = base.row_filter;
  out.eval = [base_eval = base.eval, d](IndexSpan block, IndexSpan complement,
                                        const Dataset& data) {
    const std::vector<double> v = base_eval(block, complement, data);
    std::vector<double> diff(d - 1);
    for (std::size_t l = 0; l + 1 < d; ++l) diff[l] = v[l] - v[d - 1];
    return diff;
  };
  if (base.fit_score) {
    out.fit_score = [base_fit = base.fit_score, d](const Dataset& data,
                                                   IndexSpan train) -> RowScore {
      RowScore inner = base_fit(data, train);
      return [inner = std::move(inner), d](const Dataset& dd, Index i, std::span<double> o) {
        std::vector<double> v(d);
        inner(dd, i, v);
        for (std::size_t l = 0; l + 1 < d; ++l) o[l] = v[l] - v[d - 1];
      };
    };
  }
  return out;
}

// ---------------------------------------------------------------------------

double aipw_score(double y, double w, double mu1, double mu0, double pi) noexcept {
  return mu1 - mu0 + w * (y - mu1) / pi - (1.0 - w) * (y - mu0) / (1.0 - pi);
}

double AipwComponents::pi(const Dataset& data, Index row) const {
  const double raw = pi_model ? pi_model->predict(data, row) : pi_constant;
  return std::clamp(raw, eps_pi, 1.0 - eps_pi);
}

double AipwComponents::score(const Dataset& data, Index row) const {
  return aipw_score(data.y()[row], data.w()[row], mu1.predict(data, row), mu0.predict(data, row),
                    pi(data, row));
}

double plug_in_lambda(std::span<const double> response, IndexSpan rows, std::size_t p) {
  const auto m = static_cast<double>(rows.size());
  if (rows.size() < 2 || p <= 1) return 0.0;
  double mean = 0.0;
  for (Index i : rows) mean += response[i];
  mean /= m;
  double ss = 0.0;
  for (Index i : rows) ss += (response[i] - mean) * (response[i] - mean);
  const double sd = std::sqrt(ss / (m - 1.0));
  return sd * std::sqrt(2.0 * std::log(static_cast<double>(p)) / m);
}

AipwComponents fit_aipw(const Dataset& data, IndexSpan train, const AipwOptions& options) {
  require(data.has_treatment(), "AIPW needs a treatment column");
  require(options.eps_pi > 0.0 && options.eps_pi < 0.5, "eps_pi must lie in (0, 0.5)");
  const auto w = data.w();
  std::vector<Index> treated;
  std::vector<Index> control;
  for (Index i : train) (w[i] == 1.0 ? treated : control).push_back(i);
  if (treated.size() < 2 || control.size() < 2) {
    fail(ErrorCode::kEmptyArm, "a treatment arm has fewer than 2 training rows");
  }
  AipwComponents out;
  out.eps_pi = options.eps_pi;
  out.mu1 = LassoProblem(data, treated)
                .fit(plug_in_lambda(data.y(), treated, data.p()), options.lasso);
  out.mu0 = LassoProblem(data, control)
                .fit(plug_in_lambda(data.y(), control, data.p()), options.lasso);
  if (options.propensity.kind == Propensity::Kind::kLpm) {
    out.pi_model = LassoProblem(data, train, w).fit(plug_in_lambda(w, train, data.p()),
                                                    options.lasso);
  } else {
    require(options.propensity.p0 > 0.0 && options.propensity.p0 < 1.0,
            "known propensity must lie in (0, 1)");
    out.pi_constant = options.propensity.p0;
  }
  return out;
}

StatisticSpec aipw_statistic(const AipwOptions& options) {
  auto fitter = [options](const Dataset& data, IndexSpan train) -> RowScore {
    auto comps = std::make_shared<const AipwComponents>(fit_aipw(data, train, options));
    return [comps](const Dataset& d, Index i, std::span<double> out) {
      out[0] = comps->score(d, i);
    };
  };
  return make_linear_statistic(1, "aipw", std::move(fitter));
}

double dml_standard_error(std::span<const double> pooled) {
  require(pooled.size() >= 2, "standard error needs n >= 2");
  double mean = 0.0;
  for (double v : pooled) mean += v;
  mean /= static_cast<double>(pooled.size());
  double ss = 0.0;
  for (double v : pooled) ss += (v - mean) * (v - mean);
  return std::sqrt(ss) / static_cast<double>(pooled.size());
}

namespace {

std::vector<double> first_components(const std::vector<std::vector<double>>& rows) {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.front());
  return out;
}

std::pair<double, double> dml_estimate_and_se(const StatisticSpec& aipw, const CrossSplit& split,
                                              const Dataset& data, int threads) {
  require(split.k() * split.b() == split.n(), "DML standard error needs a complete cross-split");
  const auto psi = first_components(pooled_scores(aipw, split, data, threads));
  double mean = 0.0;
  for (double v : psi) mean += v;
  mean /= static_cast<double>(psi.size());
  return {mean, dml_standard_error(psi)};
}

}  // namespace

double dml_standard_error(const CrossSplit& split, const Dataset& data, const StatisticSpec& aipw,
                          int threads) {
  return dml_estimate_and_se(aipw, split, data, threads).second;
}

double pvalue_from(double est, double se) {
  if (!(se > 0.0)) fail(ErrorCode::kDegenerateSe, "standard error must be positive");
  return 1.0 - normal_cdf(est / se);
}

CrossSplitStatistic pvalue_statistic(CrossSplitStatistic estimator, CrossSplitStatistic se) {
  require(estimator.arity == 1 && se.arity == 1, "p-value inputs must be scalar");
  CrossSplitStatistic out;
  out.arity = 1;
  out.label = "pvalue(" + estimator.label + "," + se.label + ")";
  out.evaluate = [estimator = std::move(estimator), se = std::move(se)](
                     const CrossSplit& split, const Dataset& data, int threads) {
    const double e = estimator.evaluate(split, data, threads).front();
    const double s = se.evaluate(split, data, threads).front();
    return std::vector<double>{pvalue_from(e, s)};
  };
  return out;
}

CrossSplitStatistic dml_estimate_statistic(const AipwOptions& options) {
  CrossSplitStatistic out = cross_split_statistic(aipw_statistic(options));
  out.label = "dml";
  return out;
}

CrossSplitStatistic dml_se_statistic(const AipwOptions& options) {
  CrossSplitStatistic out;
  out.arity = 1;
  out.label = "dml-se";
  out.evaluate = [aipw = aipw_statistic(options)](const CrossSplit& split, const Dataset& data,
                                                  int threads) {
    return std::vector<double>{dml_estimate_and_se(aipw, split, data, threads).second};
  };
  return out;
}

CrossSplitStatistic dml_pvalue_statistic(const AipwOptions& options) {
  CrossSplitStatistic out;
  out.arity = 1;
  out.label = "dml-pvalue";
  out.evaluate = [aipw = aipw_statistic(options)](const CrossSplit& split, const Dataset& data,
                                                  int threads) {
    const auto [est, se] = dml_estimate_and_se(aipw, split, data, threads);
    return std::vector<double>{pvalue_from(est, se)};
  };
  return out;
}

}  // namespace acr
