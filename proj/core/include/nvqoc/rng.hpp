// Copyright 2026 The nvqoc Authors
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

#include <cstdint>
#include <random>

namespace nvqoc {

inline constexpr std::uint64_t kDefaultSeed = 20201027;

/// MT19937-64 with hand-rolled conversions. The engine's output sequence is
/// fixed by the standard; std::uniform_real_distribution is not, so it is
/// avoided to keep results identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = kDefaultSeed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Uniform on (lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

/// SplitMix64 finalizer, used to decorrelate derived seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Seed of superiteration d (1-based): the master seed itself for d = 1,
/// mixed with d afterwards. A single superiteration therefore reproduces a
/// plain run with the master seed.
constexpr std::uint64_t superiteration_seed(std::uint64_t seed, int d) {
  return d <= 1 ? seed : seed ^ mix_seed(static_cast<std::uint64_t>(d));
}

}  // namespace nvqoc
