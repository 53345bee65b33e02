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

#include "qss/detection.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "qss/error.hpp"

namespace qss::detection {
namespace {

constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

std::int64_t advance(std::int64_t from, std::uint64_t skip) {
  const auto room = static_cast<std::uint64_t>(kNever - from);
  return skip >= room ? kNever : from + static_cast<std::int64_t>(skip);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

int sample_index(const std::array<double, 4>& probs, Rng& rng) {
  double u = uniform01(rng);
  for (int i = 0; i < 3; ++i) {
    if (u < probs[static_cast<std::size_t>(i)]) return i;
    u -= probs[static_cast<std::size_t>(i)];
  }
  return 3;
}

void emit(std::uint8_t mask, std::int64_t pulse, double period_ns, StationId station, Rng& rng,
          std::vector<DetectionEvent>& out) {
  if (mask == 0) return;
  int channel;
  if (std::has_single_bit(mask)) {
    channel = std::countr_zero(mask);
  } else {
    channel = sample_index(registration_distribution(mask), rng);
  }
  out.push_back(DetectionEvent{pulse, static_cast<double>(pulse) * period_ns, station,
                               static_cast<Basis>(channel >> 1), static_cast<std::uint8_t>(channel & 1)});
}

}  // namespace

char to_char(Basis b) { return b == Basis::X ? 'X' : 'Z'; }

Basis parse_basis(std::string_view s) {
  if (s == "X") return Basis::X;
  if (s == "Z") return Basis::Z;
  throw InvalidArgument("basis must be X or Z, got '" + std::string(s) + "'");
}

qmath::Basis optical_basis(Basis b) {
  return b == Basis::X ? qmath::Basis::rectilinear : qmath::Basis::diagonal;
}

DetectorSet DetectorSet::uniform(double efficiency, double dark_probability) {
  DetectorSet d;
  d.efficiency.fill(efficiency);
  d.dark_probability.fill(dark_probability);
  return d;
}

void DetectorSet::validate() const {
  for (std::size_t c = 0; c < kChannelsPerStation; ++c) {
    if (!is_probability(efficiency[c])) throw InvalidArgument("detector efficiency must lie in [0,1]");
    if (!is_probability(dark_probability[c]) || dark_probability[c] >= 1.0)
      throw InvalidArgument("dark-count probability must lie in [0,1)");
  }
}

void ChannelParams::validate() const {
  if (!(loss_db_dealer >= 0.0) || !(loss_db_player >= 0.0) || !std::isfinite(loss_db_dealer) ||
      !std::isfinite(loss_db_player))
    throw InvalidArgument("channel loss must be a finite value >= 0 dB");
  dealer.validate();
  player.validate();
  if (!is_probability(p_x)) throw InvalidArgument("p_x must lie in [0,1]");
  if (!(rep_rate_hz > 0.0)) throw InvalidArgument("repetition rate must be positive");
  if (!(window_ns > 0.0)) throw InvalidArgument("coincidence window must be positive");
}

double ChannelParams::dealer_transmittance() const { return std::pow(10.0, -loss_db_dealer / 10.0); }
double ChannelParams::player_transmittance() const { return std::pow(10.0, -loss_db_player / 10.0); }

std::string StationId::label() const {
  return (role == Role::dealer ? "A" : "B") + std::to_string(index);
}

StationId StationId::parse(std::string_view label) {
  if (label.size() < 2 || (label[0] != 'A' && label[0] != 'B'))
    throw InvalidArgument("station must look like A1 or B1, got '" + std::string(label) + "'");
  int index = 0;
  for (char c : label.substr(1)) {
    if (c < '0' || c > '9') throw InvalidArgument("bad station index in '" + std::string(label) + "'");
    index = index * 10 + (c - '0');
    if (index > 1000000) throw InvalidArgument("station index too large");
  }
  if (index < 1) throw InvalidArgument("station index must be >= 1");
  return {label[0] == 'A' ? Role::dealer : Role::player, index};
}

PairModel::PairModel(const qmath::DensityMatrix& state) {
  if (state.dim() != 4) throw InvalidArgument("pair model needs a two-qubit state");
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      const std::array<qmath::Basis, 2> bases{optical_basis(static_cast<Basis>(a)),
                                              optical_basis(static_cast<Basis>(b))};
      const auto table = qmath::outcome_distribution(state, bases);
      auto& dst = joint_[static_cast<std::size_t>(a * 2 + b)];
      const double total = table.sum();
      for (std::size_t i = 0; i < 4; ++i) dst[i] = table[i] / total;
    }
  }
}

double PairModel::dealer_marginal(Basis dealer, int bit) const {
  const auto& j = joint(dealer, dealer);
  return j[static_cast<std::size_t>(bit * 2)] + j[static_cast<std::size_t>(bit * 2 + 1)];
}

double PairModel::player_marginal(Basis player, int bit) const {
  const auto& j = joint(player, player);
  return j[static_cast<std::size_t>(bit)] + j[static_cast<std::size_t>(2 + bit)];
}

std::array<double, 4> registration_distribution(std::uint8_t click_mask) {
  std::array<double, 4> out{};
  const std::uint8_t x = click_mask & 0x3, z = (click_mask >> 2) & 0x3;
  if (x != 0 && z != 0) {
    out.fill(0.25);
    return out;
  }
  const std::size_t base = x != 0 ? 0 : 2;
  const std::uint8_t bits = x != 0 ? x : z;
  if (bits == 1) out[base] = 1.0;
  else if (bits == 2) out[base + 1] = 1.0;
  else if (bits == 3) out[base] = out[base + 1] = 0.5;
  return out;
}

void simulate_pulse_into(const PairModel& model, std::uint32_t pair_count, const ChannelParams& params,
                         std::int64_t pulse_index, int session, std::uint8_t dealer_dark_mask,
                         std::uint8_t player_dark_mask, Rng& rng, std::vector<DetectionEvent>& dealer_out,
                         std::vector<DetectionEvent>& player_out) {
  // Passive basis choice, one per station per pulse.
  const Basis dealer_basis = bernoulli(rng, params.p_x) ? Basis::X : Basis::Z;
  const Basis player_basis = bernoulli(rng, params.p_x) ? Basis::X : Basis::Z;
  std::uint8_t dealer_clicks = dealer_dark_mask;
  std::uint8_t player_clicks = player_dark_mask;

  const double t_dealer = params.dealer_transmittance();
  const double t_player = params.player_transmittance();
  const auto& joint = model.joint(dealer_basis, player_basis);

  for (std::uint32_t k = 0; k < pair_count; ++k) {
    const bool dealer_arrives = bernoulli(rng, t_dealer);
    const bool player_arrives = bernoulli(rng, t_player);
    int a = -1, b = -1;
    if (dealer_arrives && player_arrives) {
      const int idx = sample_index(joint, rng);
      a = idx >> 1;
      b = idx & 1;
    } else if (dealer_arrives) {
      a = uniform01(rng) < model.dealer_marginal(dealer_basis, 0) ? 0 : 1;
    } else if (player_arrives) {
      b = uniform01(rng) < model.player_marginal(player_basis, 0) ? 0 : 1;
    } else {
      continue;
    }
    if (a >= 0) {
      const std::size_t ch = channel_index(dealer_basis, a);
      if (bernoulli(rng, params.dealer.efficiency[ch])) dealer_clicks |= static_cast<std::uint8_t>(1U << ch);
    }
    if (b >= 0) {
      const std::size_t ch = channel_index(player_basis, b);
      if (bernoulli(rng, params.player.efficiency[ch])) player_clicks |= static_cast<std::uint8_t>(1U << ch);
    }
  }

  const double period = params.pulse_period_ns();
  emit(dealer_clicks, pulse_index, period, {Role::dealer, session}, rng, dealer_out);
  emit(player_clicks, pulse_index, period, {Role::player, session}, rng, player_out);
}

std::vector<DetectionEvent> simulate_pulse(const PairModel& model, std::uint32_t pair_count,
                                           const ChannelParams& params, std::int64_t pulse_index,
                                           int session, Rng& rng) {
  std::uint8_t dealer_dark = 0, player_dark = 0;
  for (std::size_t c = 0; c < kChannelsPerStation; ++c) {
    if (bernoulli(rng, params.dealer.dark_probability[c])) dealer_dark |= static_cast<std::uint8_t>(1U << c);
    if (bernoulli(rng, params.player.dark_probability[c])) player_dark |= static_cast<std::uint8_t>(1U << c);
  }
  std::vector<DetectionEvent> dealer, player;
  simulate_pulse_into(model, pair_count, params, pulse_index, session, dealer_dark, player_dark, rng, dealer,
                      player);
  dealer.insert(dealer.end(), player.begin(), player.end());
  return dealer;
}

SessionEvents simulate_session(const source::SourceParams& source, const PairModel& model,
                               const ChannelParams& params, int session, std::int64_t first_pulse,
                               std::int64_t n_pulses, Rng& rng) {
  SessionEvents out;
  const std::int64_t end = first_pulse + n_pulses;

  const double p_emit = source::emission_probability(source);
  std::int64_t next_pair = p_emit > 0.0 ? advance(first_pulse, geometric_skip(rng, p_emit)) : kNever;

  // Channels 0-3 dealer, 4-7 player.
  std::array<double, 8> p_dark{};
  for (std::size_t c = 0; c < 4; ++c) {
    p_dark[c] = params.dealer.dark_probability[c];
    p_dark[c + 4] = params.player.dark_probability[c];
  }
  std::array<std::int64_t, 8> next_dark{};
  for (std::size_t c = 0; c < 8; ++c)
    next_dark[c] = p_dark[c] > 0.0 ? advance(first_pulse, geometric_skip(rng, p_dark[c])) : kNever;

  while (true) {
    std::int64_t pulse = next_pair;
    for (auto t : next_dark) pulse = std::min(pulse, t);
    if (pulse >= end) break;

    std::uint8_t dealer_dark = 0, player_dark = 0;
    for (std::size_t c = 0; c < 8; ++c) {
      if (next_dark[c] != pulse) continue;
      if (c < 4) dealer_dark |= static_cast<std::uint8_t>(1U << c);
      else player_dark |= static_cast<std::uint8_t>(1U << (c - 4));
      next_dark[c] = advance(pulse + 1, geometric_skip(rng, p_dark[c]));
    }
    std::uint32_t pairs = 0;
    if (next_pair == pulse) {
      pairs = source::sample_nonzero_pair_count(source, rng);
      next_pair = advance(pulse + 1, geometric_skip(rng, p_emit));
    }
    simulate_pulse_into(model, pairs, params, pulse, session, dealer_dark, player_dark, rng, out.dealer,
                        out.player);
  }
  return out;
}

CoincidenceResult match_coincidences(std::span<const DetectionEvent> dealer,
                                     std::span<const DetectionEvent> player, double window_ns,
                                     int player_id) {
  if (!(window_ns > 0.0)) throw InvalidArgument("coincidence window must be positive");
  const auto by_time = [](const DetectionEvent& l, const DetectionEvent& r) {
    return l.timestamp_ns < r.timestamp_ns;
  };
  if (!std::is_sorted(dealer.begin(), dealer.end(), by_time) ||
      !std::is_sorted(player.begin(), player.end(), by_time))
    throw InvalidArgument("match_coincidences: events must be sorted by timestamp");

  CoincidenceResult result;
  std::size_t j = 0;
  for (const auto& d : dealer) {
    while (j < player.size() && player[j].timestamp_ns < d.timestamp_ns - window_ns) ++j;
    if (j == player.size()) break;
    if (player[j].timestamp_ns > d.timestamp_ns + window_ns) continue;
    const auto& p = player[j++];
    if (p.basis == d.basis) {
      result.matched.push_back(MatchedPair{d.pulse_index, d.basis, d.bit, p.bit, player_id});
    } else {
      ++result.basis_mismatched;
    }
  }
  return result;
}

}  // namespace qss::detection
