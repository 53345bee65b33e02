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

// Privacy amplification by seeded Toeplitz hashing.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace qss::keyrate {

using BitString = std::vector<std::uint8_t>;

// Diagonal bits r_0 .. r_{count-1} of the Toeplitz matrix: the 64-bit words
// of a SplitMix64 stream started at seed, least significant bit first.
BitString toeplitz_seed_bits(std::uint64_t seed, std::size_t count);

// out_i = XOR_j r[i - j + n - 1] x_j for an out_bits x n Toeplitz matrix.
BitString toeplitz_hash(std::span<const std::uint8_t> input, std::size_t out_bits, std::uint64_t seed);

// Compresses every participant's reconciled string to l_bits with the same
// seeded hash. All strings must have equal length >= l_bits.
std::vector<BitString> extract_final_key(std::span<const BitString> reconciled, std::size_t l_bits,
                                         std::uint64_t seed);

}  // namespace qss::keyrate
