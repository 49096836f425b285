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
#include <string>
#include <vector>

#include "acr/dataset.hpp"
#include "acr/random.hpp"

namespace acr {

enum class SplitMode { kCross, kIndependent, kPartial };

// Sizes of a collection of k disjoint blocks of b indices drawn from [n].
struct SplitPlan {
  std::size_t n = 0;
  std::size_t k = 1;
  std::size_t b = 0;

  // Complete cross-split (k b = n), the default.
  static SplitPlan cross(std::size_t n, std::size_t k);

  SplitMode mode() const noexcept;
  bool complete() const noexcept { return k * b == n; }
  double phi() const noexcept { return static_cast<double>(b) / static_cast<double>(n); }
  // Throws unless 1 <= b <= n and 1 <= k <= n / b.
  void validate() const;
};

// One element of the cross-split space: k pairwise-disjoint blocks of size b.
// Indices are 0-based. Each block is sorted ascending and blocks are ordered
// by their smallest element, so equal unordered partitions compare equal.
class CrossSplit {
 public:
  CrossSplit(std::size_t n, std::vector<std::vector<Index>> blocks);

  std::size_t n() const noexcept { return n_; }
  std::size_t k() const noexcept { return blocks_.size(); }
  std::size_t b() const noexcept { return blocks_.front().size(); }
  const std::vector<std::vector<Index>>& blocks() const noexcept { return blocks_; }
  const std::vector<Index>& block(std::size_t j) const { return blocks_.at(j); }

  // Stable 64-bit identity of the unordered partition.
  std::uint64_t fingerprint() const noexcept;

  bool operator==(const CrossSplit&) const = default;

 private:
  std::size_t n_;
  std::vector<std::vector<Index>> blocks_;
};

// Uniform draw from the cross-split space: a partial Fisher-Yates shuffle of
// [n] on `rng` fixes the first k b positions, which are cut into k
// consecutive blocks of b.
CrossSplit sample_cross_split(const SplitPlan& plan, Rng& rng);

// Number of unordered elements, n! / ((b!)^k (n - k b)! k!). Returns
// +inf when it overflows a double.
double count_cross_splits(std::size_t n, std::size_t k, std::size_t b);

inline constexpr double kEnumerationGuard = 1e6;

// All unordered elements in lexicographic order of their canonical blocks.
// Throws ErrorCode::kCountGuard above `guard` elements.
std::vector<CrossSplit> enumerate_cross_splits(std::size_t n, std::size_t k, std::size_t b,
                                               double guard = kEnumerationGuard);

// [n] \ block j, sorted ascending. `j` is 0-based.
std::vector<Index> complement(const CrossSplit& split, std::size_t j);
std::vector<Index> complement(std::size_t n, IndexSpan block);

// {"g": g, "blocks": [[...], ...]} with 1-based indices, no trailing newline.
std::string split_json_line(std::size_t g, const CrossSplit& split);

}  // namespace acr
