// Copyright 2026 The qss-sim Authors
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

#include <cmath>
#include <cstdint>
#include <random>

namespace qss {

// Engine used by every stochastic path. mt19937_64 output is fixed by the
// standard; the helpers below avoid std:: distributions so that sampled values
// do not depend on the standard library implementation.
using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of the rng stream for (stream, block) under a root seed.
// stream identifies the entangled-pair session, block the pulse block.
constexpr std::uint64_t derive_seed(std::uint64_t root, std::uint64_t stream,
                                    std::uint64_t block) noexcept {
  return splitmix64(splitmix64(root) ^ splitmix64((stream << 40) ^ block ^ 0x5155535349ULL));
}

inline Rng make_rng(std::uint64_t root, std::uint64_t stream, std::uint64_t block) {
  return Rng(derive_seed(root, stream, block));
}

// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Uniform double in (0, 1].
inline double uniform01_open_low(Rng& rng) { return 1.0 - uniform01(rng); }

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

// Number of failures before the first success, success probability p in (0, 1].
inline std::uint64_t geometric_skip(Rng& rng, double p) {
  if (p >= 1.0) return 0;
  const double g = std::floor(std::log(uniform01_open_low(rng)) / std::log1p(-p));
  return g >= 9.0e18 ? UINT64_MAX : static_cast<std::uint64_t>(g);
}

}  // namespace qss
