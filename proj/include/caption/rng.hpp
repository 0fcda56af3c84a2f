// Copyright 2026 The Caption Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace caption {

/// SplitMix64, used only to expand a 64-bit seed into generator state.
/// Reference: seed 0 yields 0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4, ...
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256** 1.0. Seeded from four consecutive SplitMix64 outputs.
/// Reference: state {1, 2, 3, 4} yields 11520, 0, 1509978240, 1215971899390074240.
class Xoshiro256StarStar {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256StarStar(std::uint64_t seed) noexcept;
  explicit constexpr Xoshiro256StarStar(std::array<std::uint64_t, 4> state) noexcept : s_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }
  result_type operator()() noexcept { return next(); }

  std::uint64_t next() noexcept;
  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  /// Top bit of the next output.
  bool coin() noexcept { return (next() >> 63) != 0; }

 private:
  std::array<std::uint64_t, 4> s_;
};

/// Moves a uniformly chosen k-subset, in random order, to the front of `items`.
template <typename T>
void partial_fisher_yates(std::vector<T>& items, std::size_t k, Xoshiro256StarStar& rng) {
  const std::size_t n = items.size();
  for (std::size_t i = 0; i < k && i < n; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(n - i));
    using std::swap;
    swap(items[i], items[j]);
  }
}

}  // namespace caption
