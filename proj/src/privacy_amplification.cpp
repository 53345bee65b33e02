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

#include "qss/privacy_amplification.hpp"

#include <bit>

#include "qss/error.hpp"
#include "qss/rng.hpp"

namespace qss::keyrate {
namespace {

using Words = std::vector<std::uint64_t>;

Words pack(std::span<const std::uint8_t> bits) {
  Words w((bits.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < bits.size(); ++i)
    if (bits[i] & 1U) w[i / 64] |= std::uint64_t{1} << (i % 64);
  return w;
}

// 64 bits of `w` starting at bit offset `pos` (zero past the end).
std::uint64_t window(const Words& w, std::size_t pos) {
  const std::size_t word = pos / 64, shift = pos % 64;
  if (word >= w.size()) return 0;
  std::uint64_t v = w[word] >> shift;
  if (shift != 0 && word + 1 < w.size()) v |= w[word + 1] << (64 - shift);
  return v;
}

}  // namespace

BitString toeplitz_seed_bits(std::uint64_t seed, std::size_t count) {
  BitString r(count);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 64 == 0) word = splitmix64(seed + static_cast<std::uint64_t>(i / 64) * 0x9e3779b97f4a7c15ULL);
    r[i] = static_cast<std::uint8_t>((word >> (i % 64)) & 1U);
  }
  return r;
}

BitString toeplitz_hash(std::span<const std::uint8_t> input, std::size_t out_bits, std::uint64_t seed) {
  const std::size_t n = input.size();
  if (out_bits > n) throw InvalidArgument("hash output longer than its input");
  BitString out(out_bits, 0);
  if (out_bits == 0) return out;

  // out_i = XOR_k r[i + k] x[n - 1 - k]
  BitString reversed(input.rbegin(), input.rend());
  const Words x = pack(reversed);
  const Words r = pack(toeplitz_seed_bits(seed, n + out_bits - 1));
  for (std::size_t i = 0; i < out_bits; ++i) {
    std::uint64_t acc = 0;
    for (std::size_t k = 0; k < x.size(); ++k) acc ^= window(r, i + 64 * k) & x[k];
    out[i] = static_cast<std::uint8_t>(std::popcount(acc) & 1);
  }
  return out;
}

std::vector<BitString> extract_final_key(std::span<const BitString> reconciled, std::size_t l_bits,
                                         std::uint64_t seed) {
  std::vector<BitString> keys;
  if (reconciled.empty()) return keys;
  const std::size_t n = reconciled.front().size();
  for (const auto& s : reconciled)
    if (s.size() != n) throw InvalidArgument("reconciled strings must have equal length");
  if (l_bits > n) throw InvalidArgument("final key length exceeds the raw key length");
  for (const auto& s : reconciled) keys.push_back(toeplitz_hash(s, l_bits, seed));
  return keys;
}

}  // namespace qss::keyrate
