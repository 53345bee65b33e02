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

#include "qss/postmatch.hpp"

#include <algorithm>
#include <ostream>
#include <string>

#include "qss/error.hpp"

namespace qss::postmatch {
namespace {

std::uint64_t fingerprint(const detection::EventLog& log) {
  std::uint64_t h = 1469598103934665603ULL;
  const auto mix = [&h](std::uint64_t v) {
    for (int i = 0; i < 8; ++i) {
      h ^= (v >> (8 * i)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(log.events.size());
  for (const auto& e : log.events) {
    mix(static_cast<std::uint64_t>(e.pulse_index));
    mix(static_cast<std::uint64_t>(e.station.role) << 32 | static_cast<std::uint32_t>(e.station.index));
    mix(static_cast<std::uint64_t>(e.basis) << 8 | e.bit);
  }
  return h;
}

std::string bitstring(std::uint64_t mask, int n) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (int j = 0; j < n; ++j)
    if ((mask >> j) & 1U) s[static_cast<std::size_t>(j)] = '1';
  return s;
}

}  // namespace

void SiftedStream::validate() const {
  if (dealer_bits.size() != player_bits.size()) throw InvalidArgument("sifted stream lengths differ");
  for (std::size_t i = 0; i < dealer_bits.size(); ++i)
    if (dealer_bits[i] > 1 || player_bits[i] > 1) throw InvalidArgument("sifted stream holds a non-bit");
}

SessionStreams sift(std::span<const detection::MatchedPair> pairs, int player_id) {
  SessionStreams s;
  s.x.player_id = s.z.player_id = player_id;
  s.x.basis = Basis::X;
  s.z.basis = Basis::Z;
  for (const auto& p : pairs) {
    auto& dst = p.basis == Basis::X ? s.x : s.z;
    dst.dealer_bits.push_back(p.dealer_bit);
    dst.player_bits.push_back(p.player_bit);
  }
  return s;
}

FrameRule frame_rule(qmath::BellKind source_state) {
  switch (source_state) {
    case qmath::BellKind::psi_minus: return {true, true};
    case qmath::BellKind::psi_plus: return {true, false};
    case qmath::BellKind::phi_minus: return {false, true};
    case qmath::BellKind::phi_plus: return {false, false};
  }
  throw InvalidArgument("unsupported bell kind");
}

SiftedStream frame_correct(SiftedStream stream, qmath::BellKind source_state) {
  stream.validate();
  const FrameRule rule = frame_rule(source_state);
  const bool flip = stream.basis == Basis::X ? rule.flip_x : rule.flip_z;
  if (flip)
    for (auto& b : stream.dealer_bits) b ^= 1U;
  return stream;
}

RoundSet postmatch_rounds(std::span<const SessionStreams> streams, int n_players) {
  if (n_players < 3) throw InvalidArgument("postmatching needs at least 3 participants");
  if (n_players - 1 > kMaxPlayers) throw InvalidArgument("too many players");
  const int players = n_players - 1;
  if (static_cast<int>(streams.size()) != players)
    throw InvalidArgument("expected " + std::to_string(players) + " player streams, got " +
                          std::to_string(streams.size()));

  std::vector<const SessionStreams*> by_player(static_cast<std::size_t>(players), nullptr);
  for (const auto& s : streams) {
    s.x.validate();
    s.z.validate();
    const int id = s.x.player_id;
    if (s.z.player_id != id || s.x.basis != Basis::X || s.z.basis != Basis::Z)
      throw InvalidArgument("inconsistent session streams");
    if (id < 1 || id > players) throw InvalidArgument("player id " + std::to_string(id) + " out of range");
    if (by_player[static_cast<std::size_t>(id - 1)] != nullptr)
      throw InvalidArgument("duplicate streams for player " + std::to_string(id));
    by_player[static_cast<std::size_t>(id - 1)] = &s;
  }

  RoundSet out;
  out.n_players = n_players;

  std::size_t nx = by_player[0]->x.size(), nz = by_player[0]->z.size();
  for (const auto* s : by_player) {
    nx = std::min(nx, s->x.size());
    nz = std::min(nz, s->z.size());
  }

  out.x.resize(nx);
  for (std::size_t i = 0; i < nx; ++i) {
    GhzRound& r = out.x[i];
    r.basis = Basis::X;
    std::uint8_t combined = 0;
    for (int j = 0; j < players; ++j) {
      const auto& s = by_player[static_cast<std::size_t>(j)]->x;
      combined ^= s.dealer_bits[i];
      r.dealer_bits |= std::uint64_t{s.dealer_bits[i]} << j;
      r.player_bits |= std::uint64_t{s.player_bits[i]} << j;
    }
    r.dealer_bit = combined;
  }

  out.z.resize(nz);
  for (std::size_t i = 0; i < nz; ++i) {
    GhzRound& r = out.z[i];
    r.basis = Basis::Z;
    const std::uint8_t reference = by_player[0]->z.dealer_bits[i];
    r.dealer_bit = reference;
    for (int j = 0; j < players; ++j) {
      const auto& s = by_player[static_cast<std::size_t>(j)]->z;
      r.dealer_bits |= std::uint64_t{s.dealer_bits[i]} << j;
      r.player_bits |= std::uint64_t{s.player_bits[i]} << j;
      r.announcements |= std::uint64_t(reference ^ s.dealer_bits[i]) << j;
    }
  }
  return out;
}

std::vector<GhzRound> apply_flip(std::vector<GhzRound> z_rounds, std::span<const std::uint64_t> announcements) {
  if (z_rounds.size() != announcements.size())
    throw InvalidArgument("apply_flip: one announcement per round required");
  for (std::size_t i = 0; i < z_rounds.size(); ++i) {
    z_rounds[i].announcements = announcements[i];
    z_rounds[i].player_bits ^= announcements[i];
  }
  return z_rounds;
}

std::vector<std::uint64_t> announcements_of(std::span<const GhzRound> z_rounds) {
  std::vector<std::uint64_t> v;
  v.reserve(z_rounds.size());
  for (const auto& r : z_rounds) v.push_back(r.announcements);
  return v;
}

RoundSet build_rounds(std::span<const SessionStreams> streams, int n_players) {
  RoundSet rounds = postmatch_rounds(streams, n_players);
  const auto v = announcements_of(rounds.z);
  rounds.z = apply_flip(std::move(rounds.z), v);
  return rounds;
}

RoundSet dataset_postmatch(std::span<const detection::EventLog> logs, int n_players, double window_ns,
                           qmath::BellKind source_state) {
  const qmath::BellKind states[] = {source_state};
  return dataset_postmatch(logs, n_players, window_ns, states);
}

RoundSet dataset_postmatch(std::span<const detection::EventLog> logs, int n_players, double window_ns,
                           std::span<const qmath::BellKind> source_states) {
  const auto players = static_cast<std::size_t>(n_players - 1);
  if (n_players < 3) throw InvalidArgument("postmatching needs at least 3 participants");
  if (logs.size() < players)
    throw InvalidArgument(std::to_string(n_players) + " participants need " + std::to_string(players) +
                          " session logs, got " + std::to_string(logs.size()));
  if (logs.size() > players)
    throw InvalidArgument("got " + std::to_string(logs.size()) + " session logs for " +
                          std::to_string(players) + " players");

  if (source_states.size() != 1 && source_states.size() != players)
    throw InvalidArgument("expected one source state or one per session log");

  std::vector<std::uint64_t> seen;
  std::vector<SessionStreams> streams;
  for (std::size_t j = 0; j < logs.size(); ++j) {
    const auto fp = fingerprint(logs[j]);
    for (std::size_t k = 0; k < j; ++k) {
      if (seen[k] == fp || (!logs[j].name.empty() && logs[j].name == logs[k].name))
        throw InvalidArgument("session logs must be distinct: '" + logs[j].name + "' repeats '" +
                              logs[k].name + "'");
    }
    seen.push_back(fp);

    const auto session = logs[j].split();
    const int player_id = static_cast<int>(j) + 1;
    const auto coincidences = detection::match_coincidences(session.dealer, session.player, window_ns, player_id);
    const auto state = source_states.size() == 1 ? source_states[0] : source_states[j];
    SessionStreams s = sift(coincidences.matched, player_id);
    s.x = frame_correct(std::move(s.x), state);
    s.z = frame_correct(std::move(s.z), state);
    streams.push_back(std::move(s));
  }
  return build_rounds(streams, n_players);
}

void write_transcript(std::ostream& out, const RoundSet& rounds) {
  out << "round_index,basis,dealer_bit,player_bits,announcements\n";
  const int n = rounds.players();
  for (std::size_t i = 0; i < rounds.x.size(); ++i) {
    const auto& r = rounds.x[i];
    out << i << ",X," << static_cast<int>(r.dealer_bit) << ',' << bitstring(r.player_bits, n) << ",\n";
  }
  for (std::size_t i = 0; i < rounds.z.size(); ++i) {
    const auto& r = rounds.z[i];
    out << i << ",Z," << static_cast<int>(r.dealer_bit) << ',' << bitstring(r.player_bits, n) << ','
        << bitstring(r.announcements, n) << '\n';
  }
}

}  // namespace qss::postmatch
