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

// Event-level model of one dealer-module / player pair: channel loss, passive
// basis choice, projective outcome, detector efficiency and dark counts, plus
// the coincidence matcher that turns two click streams into matched pairs.

#include <array>
#include <compare>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qss/qmath.hpp"
#include "qss/rng.hpp"
#include "qss/source_model.hpp"

namespace qss::detection {

// Protocol bases: X is rectilinear (H/V), Z is diagonal (D/A).
enum class Basis : std::uint8_t { X = 0, Z = 1 };

char to_char(Basis b);
Basis parse_basis(std::string_view s);
qmath::Basis optical_basis(Basis b);

inline constexpr std::size_t kChannelsPerStation = 4;

// Detector index inside a station: basis * 2 + bit.
constexpr std::size_t channel_index(Basis basis, int bit) {
  return static_cast<std::size_t>(basis) * 2 + static_cast<std::size_t>(bit);
}

struct DetectorSet {
  std::array<double, kChannelsPerStation> efficiency{1.0, 1.0, 1.0, 1.0};
  std::array<double, kChannelsPerStation> dark_probability{0.0, 0.0, 0.0, 0.0};

  static DetectorSet uniform(double efficiency, double dark_probability);
  void validate() const;
  bool operator==(const DetectorSet&) const = default;
};

struct ChannelParams {
  double loss_db_dealer = 0.0;
  double loss_db_player = 0.0;
  DetectorSet dealer;
  DetectorSet player;
  double p_x = 0.5;
  double rep_rate_hz = 96.7e6;
  double window_ns = 5.16;

  void validate() const;
  double dealer_transmittance() const;
  double player_transmittance() const;
  double pulse_period_ns() const { return 1e9 / rep_rate_hz; }
  bool operator==(const ChannelParams&) const = default;
};

enum class Role : std::uint8_t { dealer, player };

// A1, A2, ... are the dealer's measurement modules; B1, B2, ... the players.
struct StationId {
  Role role = Role::dealer;
  int index = 1;

  std::string label() const;
  static StationId parse(std::string_view label);
  auto operator<=>(const StationId&) const = default;
};

struct DetectionEvent {
  std::int64_t pulse_index = 0;
  double timestamp_ns = 0.0;
  StationId station;
  Basis basis = Basis::X;
  std::uint8_t bit = 0;

  bool operator==(const DetectionEvent&) const = default;
};

struct MatchedPair {
  std::int64_t pulse_index = 0;
  Basis basis = Basis::X;
  std::uint8_t dealer_bit = 0;
  std::uint8_t player_bit = 0;
  int player_id = 1;
};

// Joint and marginal outcome probabilities of one emitted pair, precomputed
// from the source state for the four protocol basis combinations.
class PairModel {
 public:
  explicit PairModel(const qmath::DensityMatrix& state);

  // Entry [2a + b] is P(dealer bit a, player bit b | bases).
  const std::array<double, 4>& joint(Basis dealer, Basis player) const {
    return joint_[static_cast<std::size_t>(dealer) * 2 + static_cast<std::size_t>(player)];
  }
  double dealer_marginal(Basis dealer, int bit) const;
  double player_marginal(Basis player, int bit) const;

 private:
  std::array<std::array<double, 4>, 4> joint_{};
};

// Probability of registering (basis, bit) at index channel_index(basis, bit)
// given the set of clicked channels. Empty mask: all zeros. Several clicks
// in one basis give a uniformly random bit in that basis; clicks in both
// bases give a uniformly random basis and bit.
std::array<double, 4> registration_distribution(std::uint8_t click_mask);

// Events of one pulse for session `session` (stations A<session>, B<session>).
// Dark counts are drawn per channel with the configured probabilities.
std::vector<DetectionEvent> simulate_pulse(const PairModel& model, std::uint32_t pair_count,
                                           const ChannelParams& params, std::int64_t pulse_index,
                                           int session, Rng& rng);

// As simulate_pulse with the dark-count clicks supplied by the caller.
void simulate_pulse_into(const PairModel& model, std::uint32_t pair_count, const ChannelParams& params,
                         std::int64_t pulse_index, int session, std::uint8_t dealer_dark_mask,
                         std::uint8_t player_dark_mask, Rng& rng, std::vector<DetectionEvent>& dealer_out,
                         std::vector<DetectionEvent>& player_out);

struct SessionEvents {
  std::vector<DetectionEvent> dealer;
  std::vector<DetectionEvent> player;
};

// Simulates pulses [first_pulse, first_pulse + n_pulses). Empty pulses are
// skipped geometrically, which is distributionally identical to drawing
// every pulse.
SessionEvents simulate_session(const source::SourceParams& source, const PairModel& model,
                               const ChannelParams& params, int session, std::int64_t first_pulse,
                               std::int64_t n_pulses, Rng& rng);

struct CoincidenceResult {
  std::vector<MatchedPair> matched;   // same-basis coincidences
  std::size_t basis_mismatched = 0;   // coincidences discarded by sifting
};

// Greedy first-fit pairing in time order; each event is used at most once.
// Both inputs must be sorted by timestamp (InvalidArgument otherwise).
CoincidenceResult match_coincidences(std::span<const DetectionEvent> dealer,
                                     std::span<const DetectionEvent> player, double window_ns,
                                     int player_id);

}  // namespace qss::detection
