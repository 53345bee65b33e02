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

// Postmatching: pairwise dealer/player bit streams are frame-corrected, grouped
// index-by-index across players, and combined into virtual n-party GHZ rounds.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "qss/detection.hpp"
#include "qss/event_log.hpp"
#include "qss/qmath.hpp"

namespace qss::postmatch {

using detection::Basis;

// Bits of one basis from one dealer/player session, in sifting order.
struct SiftedStream {
  int player_id = 1;
  Basis basis = Basis::X;
  std::vector<std::uint8_t> dealer_bits;
  std::vector<std::uint8_t> player_bits;

  std::size_t size() const noexcept { return dealer_bits.size(); }
  void validate() const;
};

struct SessionStreams {
  SiftedStream x;
  SiftedStream z;
};

SessionStreams sift(std::span<const detection::MatchedPair> pairs, int player_id);

struct FrameRule {
  bool flip_x = false;
  bool flip_z = false;
};

// Dealer-side bit flips that map a Bell source onto phi_plus correlations:
// psi_minus flips both bases, psi_plus X only, phi_minus Z only, phi_plus none.
FrameRule frame_rule(qmath::BellKind source_state);

SiftedStream frame_correct(SiftedStream stream, qmath::BellKind source_state);

inline constexpr int kMaxPlayers = 64;

// One postmatched round. Bit j of each mask belongs to player j+1.
//  X rounds: dealer_bit is the XOR of the per-stream dealer bits.
//  Z rounds: dealer_bit is player 1's stream bit a_1, announcements hold
//            a_1 xor a_j, and player_bits are b_j (raw) or b_j xor v_j (after apply_flip).
struct GhzRound {
  Basis basis = Basis::X;
  std::uint8_t dealer_bit = 0;
  std::uint64_t dealer_bits = 0;
  std::uint64_t player_bits = 0;
  std::uint64_t announcements = 0;

  int player_bit(int j) const { return static_cast<int>((player_bits >> j) & 1U); }
  int dealer_stream_bit(int j) const { return static_cast<int>((dealer_bits >> j) & 1U); }
  bool operator==(const GhzRound&) const = default;
};

struct RoundSet {
  int n_players = 3;
  std::vector<GhzRound> x;
  std::vector<GhzRound> z;

  int players() const noexcept { return n_players - 1; }
};

// Groups the i-th entries of every player's stream into round i, per basis,
// truncating to the shortest stream. Z rounds are returned unflipped.
// Expects one SessionStreams per player id 1..n_players-1 (any order).
RoundSet postmatch_rounds(std::span<const SessionStreams> streams, int n_players);

// b~_j = b_j xor v_j for every round; one announcement mask per round.
std::vector<GhzRound> apply_flip(std::vector<GhzRound> z_rounds, std::span<const std::uint64_t> announcements);

std::vector<std::uint64_t> announcements_of(std::span<const GhzRound> z_rounds);

// postmatch_rounds followed by apply_flip on the Z rounds.
RoundSet build_rounds(std::span<const SessionStreams> streams, int n_players);

// Matches, sifts and frame-corrects each recorded session, then postmatches.
// The j-th log supplies player j+1. Logs must be distinct sessions.
RoundSet dataset_postmatch(std::span<const detection::EventLog> logs, int n_players, double window_ns,
                           qmath::BellKind source_state);

// As above with a frame rule per session (one entry per log).
RoundSet dataset_postmatch(std::span<const detection::EventLog> logs, int n_players, double window_ns,
                           std::span<const qmath::BellKind> source_states);

// `round_index,basis,dealer_bit,player_bits,announcements`, bit strings
// ordered player 1 first; X rounds carry an empty announcement field.
void write_transcript(std::ostream& out, const RoundSet& rounds);

}  // namespace qss::postmatch
