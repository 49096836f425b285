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

// Shared fixtures for the unit and acceptance tests.

#pragma once

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "acr/dataset.hpp"
#include "acr/statistics.hpp"

namespace acr::testing {

// T(s, D) = c on every block.
inline StatisticSpec constant_statistic(double c, std::size_t arity = 1) {
  StatisticSpec s;
  s.arity = arity;
  s.label = "constant";
  s.eval = [c, arity](IndexSpan, IndexSpan, const Dataset&) {
    return std::vector<double>(arity, c);
  };
  return s;
}

// psi(D_i, eta) = y_i - mean of y over the training rows: linear in the
// block, with a nuisance fitted on the complement.
inline StatisticSpec centered_mean_statistic() {
  return make_linear_statistic(
      1, "centered_mean", [](const Dataset& data, IndexSpan train) -> RowScore {
        double mean = 0.0;
        for (Index i : train) mean += data.y()[i];
        mean /= static_cast<double>(train.size());
        return [mean](const Dataset& d, Index row, std::span<double> out) {
          out[0] = d.y()[row] - mean;
        };
      });
}

// psi(D_i, eta) = y_i, with no nuisance at all.
inline StatisticSpec block_mean_statistic() {
  return make_linear_statistic(1, "block_mean", [](const Dataset&, IndexSpan) -> RowScore {
    return [](const Dataset& d, Index row, std::span<double> out) { out[0] = d.y()[row]; };
  });
}

inline Dataset small_dataset(std::vector<double> y, std::size_t p = 0) {
  std::vector<std::vector<double>> x;
  for (std::size_t j = 0; j < p; ++j) {
    std::vector<double> col(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) col[i] = static_cast<double>((i * 7 + j * 3) % 5);
    x.push_back(std::move(col));
  }
  return Dataset(std::move(y), std::nullopt, std::move(x));
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct CommandResult {
  int status = -1;
  std::string out;
};

// Runs a shell command; stdout is captured, stderr is discarded unless the
// command redirects it.
inline CommandResult run_command(const std::string& command) {
  CommandResult r;
  const bool redirects = command.find("2>") != std::string::npos;
  FILE* pipe = popen((redirects ? command : command + " 2>/dev/null").c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), got);
  const int status = pclose(pipe);
  r.status = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string cli_path() { return ACR_CLI_PATH; }

// A fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("acr_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace acr::testing
