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

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace acr {

using Index = std::size_t;
using IndexSpan = std::span<const Index>;

// Column-oriented numeric table: outcome y, optional binary treatment w, and
// covariates x stored column by column. Row order is the identity referenced
// by every index set in the library. Immutable once constructed.
class Dataset {
 public:
  // Validates the invariants (n >= 2, finite entries, binary treatment with
  // both arms present, consistent column lengths) and throws acr::Error.
  Dataset(std::vector<double> y, std::optional<std::vector<double>> w,
          std::vector<std::vector<double>> x_columns,
          std::vector<std::string> column_names = {},
          std::string outcome_name = "y", std::string treatment_name = "w");

  std::size_t n() const noexcept { return y_.size(); }
  std::size_t p() const noexcept { return x_.size(); }
  bool has_treatment() const noexcept { return w_.has_value(); }

  std::span<const double> y() const noexcept { return y_; }
  std::span<const double> w() const;
  std::span<const double> x(std::size_t column) const { return x_.at(column); }
  double x(std::size_t row, std::size_t column) const { return x_[column][row]; }

  const std::vector<std::string>& column_names() const noexcept { return names_; }
  const std::string& outcome_name() const noexcept { return outcome_name_; }
  const std::string& treatment_name() const noexcept { return treatment_name_; }

  // Copy of this dataset with row `target` overwritten by row `source` of
  // `donor` (same shape). Used for the resampling perturbations in stability
  // estimation; treatment-arm validation is skipped for the copy.
  Dataset with_rows_replaced(IndexSpan targets, IndexSpan sources,
                             const Dataset& donor) const;

  // Identifies this table's contents for caches keyed on the dataset. Copies
  // share it; every constructed or perturbed table gets a fresh one.
  std::uint64_t uid() const noexcept { return uid_; }

  // Compares contents only.
  bool operator==(const Dataset& other) const;

 private:
  Dataset() = default;

  std::vector<double> y_;
  std::optional<std::vector<double>> w_;
  std::vector<std::vector<double>> x_;
  std::vector<std::string> names_;
  std::string outcome_name_;
  std::string treatment_name_;
  std::uint64_t uid_ = 0;
};

struct CsvSchema {
  std::string outcome = "y";
  std::optional<std::string> treatment;
  std::vector<std::string> ignore;
};

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema);
Dataset parse_csv(std::string_view text, const CsvSchema& schema);

// Header: outcome, [treatment], covariates. Floats use the shortest
// representation that round-trips.
std::string to_csv(const Dataset& data);
void write_csv(const Dataset& data, const std::filesystem::path& path);

struct SyntheticSpec {
  std::size_t n = 500;
  std::size_t p = 10;
  std::size_t sparsity = 3;
  double theta_scale = 1.0;
  double tau = 0.0;
  double prop = 0.5;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  bool with_treatment = true;
};

// W ~ Bernoulli(prop), X iid N(0, 1), Y = X'theta + tau W + N(0, noise_sd^2),
// theta = (theta_scale, ..., theta_scale, 0, ..., 0) with `sparsity` leading
// nonzeros. Pure function of the spec.
Dataset generate_synthetic(const SyntheticSpec& spec);

}  // namespace acr
