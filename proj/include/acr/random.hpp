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

// Seedable random streams.
//
// The generator is xoshiro256** (Blackman & Vigna, 2018), seeded through
// SplitMix64. Every logical consumer of randomness (data generation, split
// draws, Monte Carlo replications, ...) gets its own stream derived from the
// master seed by a fixed purpose offset and an index, so results never
// depend on how work is scheduled across threads.

#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace acr {

// Fixed offsets separating the streams derived from one master seed.
enum class StreamPurpose : std::uint64_t {
  kData = 1,
  kSplits = 2,
  kMonteCarlo = 3,
  kPilot = 4,
  kBootstrap = 5,
  kPairA = 6,
  kPairB = 7,
};

// SplitMix64 output function.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose,
                                    std::uint64_t index = 0) noexcept {
  const auto p = static_cast<std::uint64_t>(purpose);
  return mix64(mix64(master ^ (p * 0xD1B54A32D192ED03ull)) +
               index * 0x8CB92BA72F3D8DD7ull);
}

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      word = mix64(sm);
      sm += 0x9E3779B97F4A7C15ull;
    }
  }

  Rng(std::uint64_t master, StreamPurpose purpose, std::uint64_t index = 0) noexcept
      : Rng(derive_seed(master, purpose, index)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Advances the stream by 2^128 draws.
  void jump() noexcept;

  // Uniform integer in [0, bound), Lemire's nearly-divisionless method.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept;

  // Uniform double on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal by inversion of the uniform draw.
  double normal() noexcept;

  bool bernoulli(double p) noexcept { return uniform() < p; }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace acr
