// Copyright 2026 The gbsmps Authors
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

#ifndef GBSMPS_RNG_HPP
#define GBSMPS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace gbsmps {

/// SplitMix64 finalizer; used to expand (seed, stage, index) into stream keys.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Key of stream `index` within `stage` of a run seeded with `seed`.
constexpr std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stage,
                                   std::uint64_t index) {
  return mix64(mix64(mix64(seed) ^ stage) + index);
}

// Stage identifiers for the per-stage seed expansion.
namespace stage {
inline constexpr std::uint64_t kCircuit = 1;
inline constexpr std::uint64_t kSampleShot = 2;
inline constexpr std::uint64_t kOracle = 3;
inline constexpr std::uint64_t kBootstrap = 4;
inline constexpr std::uint64_t kSubsets = 5;
}  // namespace stage

/// Independent random stream addressed by a counter key. Normal deviates use
/// Box-Muller on the raw engine so values do not depend on the standard
/// library's distribution implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : engine_(key) {}
  RandomStream(std::uint64_t seed, std::uint64_t stage_id, std::uint64_t index)
      : engine_(stream_key(seed, stage_id, index)) {}

  /// Uniform in [0, 1) with 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Rejection to avoid modulo bias.
    const std::uint64_t limit = (~std::uint64_t{0}) - (~std::uint64_t{0}) % n;
    std::uint64_t x = engine_();
    while (x >= limit) x = engine_();
    return x % n;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gbsmps

#endif  // GBSMPS_RNG_HPP
