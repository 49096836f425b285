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

#include "acr/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "acr/error.hpp"
#include "acr/random.hpp"

namespace acr {

namespace {

std::uint64_t next_uid() {
  static std::atomic<std::uint64_t> counter{0};
  return ++counter;
}

}  // namespace

Dataset::Dataset(std::vector<double> y, std::optional<std::vector<double>> w,
                 std::vector<std::vector<double>> x_columns,
                 std::vector<std::string> column_names, std::string outcome_name,
                 std::string treatment_name)
    : y_(std::move(y)),
      w_(std::move(w)),
      x_(std::move(x_columns)),
      names_(std::move(column_names)),
      outcome_name_(std::move(outcome_name)),
      treatment_name_(std::move(treatment_name)),
      uid_(next_uid()) {
  const std::size_t rows = y_.size();
  if (rows < 2) fail(ErrorCode::kTooFewRows, "dataset needs at least 2 rows");
  if (names_.empty()) {
    for (std::size_t j = 0; j < x_.size(); ++j) names_.push_back("x" + std::to_string(j + 1));
  }
  require(names_.size() == x_.size(), "column_names must match covariate count");
  auto check_finite = [](std::span<const double> v, const std::string& what) {
    for (double value : v) {
      if (!std::isfinite(value)) fail(ErrorCode::kNonFinite, "non-finite value in " + what);
    }
  };
  check_finite(y_, outcome_name_);
  for (std::size_t j = 0; j < x_.size(); ++j) {
    require(x_[j].size() == rows, "covariate column length mismatch");
    check_finite(x_[j], names_[j]);
  }
  if (w_) {
    require(w_->size() == rows, "treatment length mismatch");
    std::size_t treated = 0;
    for (double v : *w_) {
      if (v != 0.0 && v != 1.0) {
        fail(ErrorCode::kNonBinaryTreatment, "treatment values must be 0 or 1");
      }
      treated += v == 1.0;
    }
    if (treated == 0 || treated == rows) {
      fail(ErrorCode::kEmptyArm, "both treatment arms must be nonempty");
    }
  }
}

std::span<const double> Dataset::w() const {
  if (!w_) fail(ErrorCode::kInvalidArgument, "dataset has no treatment column");
  return *w_;
}

bool Dataset::operator==(const Dataset& other) const {
  return y_ == other.y_ && w_ == other.w_ && x_ == other.x_ && names_ == other.names_ &&
         outcome_name_ == other.outcome_name_ && treatment_name_ == other.treatment_name_;
}

Dataset Dataset::with_rows_replaced(IndexSpan targets, IndexSpan sources,
                                    const Dataset& donor) const {
  require(targets.size() == sources.size(), "targets/sources size mismatch");
  require(donor.p() == p() && donor.has_treatment() == has_treatment(),
          "donor dataset shape mismatch");
  Dataset out;
  out.uid_ = next_uid();
  out.y_ = y_;
  out.w_ = w_;
  out.x_ = x_;
  out.names_ = names_;
  out.outcome_name_ = outcome_name_;
  out.treatment_name_ = treatment_name_;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    const Index dst = targets[t];
    const Index src = sources[t];
    out.y_[dst] = donor.y_[src];
    if (out.w_) (*out.w_)[dst] = (*donor.w_)[src];
    for (std::size_t j = 0; j < x_.size(); ++j) out.x_[j][dst] = donor.x_[j][src];
  }
  return out;
}

namespace {

// RFC 4180 records. Quoted fields may contain separators, quotes ("") and
// line breaks.
std::vector<std::vector<std::string>> split_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  if (text.starts_with("\xEF\xBB\xBF")) i = 3;
  auto end_record = [&] {
    record.push_back(std::move(field));
    field.clear();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"' && !field_started) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      record.push_back(std::move(field));
      field.clear();
      field_started = false;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      // handled by the '\n' branch
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) fail(ErrorCode::kNonNumeric, "unterminated quoted CSV field");
  if (field_started || !record.empty()) end_record();
  return records;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view cell, std::size_t row, const std::string& column) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != cell.data() + cell.size()) {
    fail(ErrorCode::kNonNumeric, "non-numeric cell '" + std::string(cell) + "' in column '" +
                                     column + "' at data row " + std::to_string(row + 1));
  }
  if (!std::isfinite(value)) {
    fail(ErrorCode::kNonFinite, "non-finite cell '" + std::string(cell) + "' in column '" +
                                    column + "' at data row " + std::to_string(row + 1));
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

Dataset parse_csv(std::string_view text, const CsvSchema& schema) {
  auto records = split_records(text);
  if (records.empty()) fail(ErrorCode::kTooFewRows, "CSV has no header row");
  const auto& header = records.front();

  auto find = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (trim(header[j]) == name) return j;
    }
    return std::nullopt;
  };
  const auto outcome_col = find(schema.outcome);
  if (!outcome_col) fail(ErrorCode::kMissingOutcome, "outcome column '" + schema.outcome + "' not found");
  std::optional<std::size_t> treatment_col;
  if (schema.treatment) {
    treatment_col = find(*schema.treatment);
    if (!treatment_col) {
      fail(ErrorCode::kInvalidArgument, "treatment column '" + *schema.treatment + "' not found");
    }
  }
  for (const auto& name : schema.ignore) {
    if (!find(name)) fail(ErrorCode::kInvalidArgument, "ignored column '" + name + "' not found");
  }

  std::vector<std::size_t> covariate_cols;
  std::vector<std::string> names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    const std::string name(trim(header[j]));
    if (j == *outcome_col || (treatment_col && j == *treatment_col)) continue;
    if (std::find(schema.ignore.begin(), schema.ignore.end(), name) != schema.ignore.end()) continue;
    covariate_cols.push_back(j);
    names.push_back(name);
  }

  const std::size_t rows = records.size() - 1;
  if (rows < 2) fail(ErrorCode::kTooFewRows, "CSV needs at least 2 data rows");
  std::vector<double> y(rows);
  std::optional<std::vector<double>> w;
  if (treatment_col) w.emplace(rows);
  std::vector<std::vector<double>> x(covariate_cols.size(), std::vector<double>(rows));
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& rec = records[r + 1];
    if (rec.size() != header.size()) {
      fail(ErrorCode::kNonNumeric, "data row " + std::to_string(r + 1) + " has " +
                                       std::to_string(rec.size()) + " fields, header has " +
                                       std::to_string(header.size()));
    }
    y[r] = parse_number(rec[*outcome_col], r, schema.outcome);
    if (treatment_col) (*w)[r] = parse_number(rec[*treatment_col], r, *schema.treatment);
    for (std::size_t j = 0; j < covariate_cols.size(); ++j) {
      x[j][r] = parse_number(rec[covariate_cols[j]], r, names[j]);
    }
  }
  return Dataset(std::move(y), std::move(w), std::move(x), std::move(names), schema.outcome,
                 schema.treatment.value_or("w"));
}

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str(), schema);
}

std::string to_csv(const Dataset& data) {
  std::string out = quote_if_needed(data.outcome_name());
  if (data.has_treatment()) out += "," + quote_if_needed(data.treatment_name());
  for (const auto& name : data.column_names()) out += "," + quote_if_needed(name);
  out += "\n";
  for (std::size_t i = 0; i < data.n(); ++i) {
    out += format_double(data.y()[i]);
    if (data.has_treatment()) out += "," + format_double(data.w()[i]);
    for (std::size_t j = 0; j < data.p(); ++j) out += "," + format_double(data.x(i, j));
    out += "\n";
  }
  return out;
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::kIo, "cannot write " + path.string());
  out << to_csv(data);
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  require(spec.prop > 0.0 && spec.prop < 1.0, "prop must lie in (0, 1)");
  require(spec.sparsity <= spec.p, "sparsity must not exceed p");
  require(spec.noise_sd >= 0.0, "noise_sd must be nonnegative");
  require(spec.n >= 2, "n must be at least 2");

  Rng rng(spec.seed, StreamPurpose::kData);
  std::vector<double> y(spec.n);
  std::optional<std::vector<double>> w;
  if (spec.with_treatment) w.emplace(spec.n);
  std::vector<std::vector<double>> x(spec.p, std::vector<double>(spec.n));
  for (std::size_t i = 0; i < spec.n; ++i) {
    double mean = 0.0;
    if (w) {
      (*w)[i] = rng.bernoulli(spec.prop) ? 1.0 : 0.0;
      mean += spec.tau * (*w)[i];
    }
    for (std::size_t j = 0; j < spec.p; ++j) {
      x[j][i] = rng.normal();
      if (j < spec.sparsity) mean += spec.theta_scale * x[j][i];
    }
    const double eps = rng.normal();
    y[i] = mean + spec.noise_sd * eps;
  }
  return Dataset(std::move(y), std::move(w), std::move(x));
}

}  // namespace acr
