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

#include "acr/splits.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "acr/error.hpp"

namespace acr {

SplitPlan SplitPlan::cross(std::size_t n, std::size_t k) {
  if (k < 1 || n % k != 0) {
    fail(ErrorCode::kInvalidArgument,
         "k = " + std::to_string(k) + " does not divide n = " + std::to_string(n));
  }
  return SplitPlan{n, k, n / k};
}

SplitMode SplitPlan::mode() const noexcept {
  if (k * b == n) return SplitMode::kCross;
  if (k == 1) return SplitMode::kIndependent;
  return SplitMode::kPartial;
}

void SplitPlan::validate() const {
  require(n >= 1 && b >= 1 && b <= n, "split size b must satisfy 1 <= b <= n");
  if (k < 1 || k > n / b) {
    fail(ErrorCode::kInvalidArgument,
         "k b = " + std::to_string(k * b) + " exceeds n = " + std::to_string(n));
  }
}

CrossSplit::CrossSplit(std::size_t n, std::vector<std::vector<Index>> blocks)
    : n_(n), blocks_(std::move(blocks)) {
  require(!blocks_.empty(), "cross-split needs at least one block");
  const std::size_t b = blocks_.front().size();
  require(b >= 1, "blocks must be nonempty");
  std::vector<char> seen(n, 0);
  for (auto& block : blocks_) {
    require(block.size() == b, "all blocks must have the same size");
    std::sort(block.begin(), block.end());
    for (Index i : block) {
      require(i < n, "block index out of range");
      require(!seen[i], "blocks must be pairwise disjoint");
      seen[i] = 1;
    }
  }
  std::sort(blocks_.begin(), blocks_.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

std::uint64_t CrossSplit::fingerprint() const noexcept {
  std::uint64_t h = mix64(n_);
  for (const auto& block : blocks_) {
    h = mix64(h ^ 0xB10Cull);
    for (Index i : block) h = mix64(h ^ static_cast<std::uint64_t>(i));
  }
  return h;
}

CrossSplit sample_cross_split(const SplitPlan& plan, Rng& rng) {
  plan.validate();
  std::vector<Index> perm(plan.n);
  std::iota(perm.begin(), perm.end(), Index{0});
  const std::size_t used = plan.k * plan.b;
  for (std::size_t i = 0; i < used; ++i) {
    const std::size_t j = i + rng.uniform_index(plan.n - i);
    std::swap(perm[i], perm[j]);
  }
  std::vector<std::vector<Index>> blocks(plan.k);
  for (std::size_t j = 0; j < plan.k; ++j) {
    blocks[j].assign(perm.begin() + j * plan.b, perm.begin() + (j + 1) * plan.b);
  }
  return CrossSplit(plan.n, std::move(blocks));
}

double count_cross_splits(std::size_t n, std::size_t k, std::size_t b) {
  if (b == 0 || k * b > n) return 0.0;
  // log of n! / ((b!)^k (n - kb)! k!)
  const double log_count = std::lgamma(n + 1.0) - k * std::lgamma(b + 1.0) -
                           std::lgamma(n - k * b + 1.0) - std::lgamma(k + 1.0);
  if (log_count > std::log(std::numeric_limits<double>::max())) {
    return std::numeric_limits<double>::infinity();
  }
  return std::round(std::exp(log_count));
}

namespace {

// Recursively appends blocks; each new block's minimum exceeds the previous
// block's minimum, which yields every unordered collection exactly once.
void enumerate_blocks(std::size_t n, std::size_t k, std::size_t b, std::vector<char>& used,
                      std::vector<std::vector<Index>>& current, Index min_floor,
                      std::vector<CrossSplit>& out) {
  if (current.size() == k) {
    out.emplace_back(n, current);
    return;
  }
  std::vector<Index> block;
  block.reserve(b);
  // Choose the block minimum, then the remaining b - 1 elements above it.
  for (Index first = min_floor; first < n; ++first) {
    if (used[first]) continue;
    std::vector<Index> pool;
    for (Index i = first + 1; i < n; ++i) {
      if (!used[i]) pool.push_back(i);
    }
    if (pool.size() + 1 < b) break;
    // Lexicographic combinations of pool choose b - 1.
    std::vector<std::size_t> pick(b - 1);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    while (true) {
      block.assign(1, first);
      for (std::size_t t : pick) block.push_back(pool[t]);
      for (Index i : block) used[i] = 1;
      current.push_back(block);
      enumerate_blocks(n, k, b, used, current, first + 1, out);
      current.pop_back();
      for (Index i : block) used[i] = 0;
      if (b == 1) break;
      std::size_t pos = b - 1;
      while (pos > 0 && pick[pos - 1] == pool.size() - (b - 1) + (pos - 1)) --pos;
      if (pos == 0) break;
      ++pick[pos - 1];
      for (std::size_t t = pos; t < b - 1; ++t) pick[t] = pick[t - 1] + 1;
    }
  }
}

}  // namespace

std::vector<CrossSplit> enumerate_cross_splits(std::size_t n, std::size_t k, std::size_t b,
                                               double guard) {
  SplitPlan{n, k, b}.validate();
  const double count = count_cross_splits(n, k, b);
  if (count > guard) {
    fail(ErrorCode::kCountGuard, "cross-split space has " + std::to_string(count) +
                                     " elements, above the enumeration guard");
  }
  std::vector<CrossSplit> out;
  out.reserve(static_cast<std::size_t>(count));
  std::vector<char> used(n, 0);
  std::vector<std::vector<Index>> current;
  enumerate_blocks(n, k, b, used, current, 0, out);
  return out;
}

std::vector<Index> complement(std::size_t n, IndexSpan block) {
  std::vector<char> in_block(n, 0);
  for (Index i : block) in_block[i] = 1;
  std::vector<Index> out;
  out.reserve(n - block.size());
  for (Index i = 0; i < n; ++i) {
    if (!in_block[i]) out.push_back(i);
  }
  return out;
}

std::vector<Index> complement(const CrossSplit& split, std::size_t j) {
  require(j < split.k(), "block index out of range");
  return complement(split.n(), split.block(j));
}

std::string split_json_line(std::size_t g, const CrossSplit& split) {
  std::string out = "{\"g\":" + std::to_string(g) + ",\"blocks\":[";
  for (std::size_t j = 0; j < split.k(); ++j) {
    if (j) out += ",";
    out += "[";
    const auto& block = split.block(j);
    for (std::size_t t = 0; t < block.size(); ++t) {
      if (t) out += ",";
      out += std::to_string(block[t] + 1);
    }
    out += "]";
  }
  out += "]}";
  return out;
}

}  // namespace acr
