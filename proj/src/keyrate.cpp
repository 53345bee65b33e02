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

#include "qss/keyrate.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "qss/error.hpp"
#include "qss/postmatch.hpp"

namespace qss::keyrate {
namespace {

using detection::Basis;
using detection::channel_index;

constexpr std::array<Basis, 2> kBases{Basis::X, Basis::Z};

// 1 - E[(1 - p_hit)^K] * prod_{c in S} (1 - pd_c), i.e. the probability that at
// least one indicator in S fires, evaluated without cancellation.
double any_click_probability(const source::SourceParams& source, double p_hit, double log_dark_off) {
  if (source.statistics == source::PairStatistics::poisson)
    return -std::expm1(-source.mu * p_hit + log_dark_off);
  const double pair_hit = source.mu * p_hit;
  return pair_hit + (1.0 - pair_hit) * -std::expm1(log_dark_off);
}

}  // namespace

void SecurityParams::validate() const {
  const auto open_unit = [](double e) { return e > 0.0 && e < 1.0; };
  if (!open_unit(epsilon_c) || !open_unit(epsilon_prime) || !open_unit(epsilon_bar))
    throw InvalidArgument("failure probabilities must lie in (0,1)");
  if (!(f_e >= 1.0)) throw InvalidArgument("f_e must be >= 1");
  if (!(q > 0.0 && q <= 1.0)) throw InvalidArgument("q must lie in (0,1]");
}

double binary_entropy(double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("binary entropy argument must lie in [0,1]");
  if (x == 0.0 || x == 1.0) return 0.0;
  return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

KeyLength key_length(double n_x, double e_x_total, std::span<const double> phi_bar, const SecurityParams& sec) {
  sec.validate();
  if (!(n_x >= 0.0)) throw InvalidArgument("n_x must be >= 0");
  double max_h = 0.0;
  for (double p : phi_bar) max_h = std::max(max_h, binary_entropy(p));
  const double correction = -2.0 - std::log2(sec.epsilon_c) - 2.0 * std::log2(sec.epsilon_prime);
  KeyLength k;
  k.raw = n_x * (sec.q - max_h - sec.f_e * binary_entropy(e_x_total)) - correction;
  k.l_bits = k.raw >= 1.0 ? static_cast<std::int64_t>(std::floor(k.raw)) : 0;
  k.aborted = k.l_bits == 0;
  return k;
}

KeyRates key_rates(double l_bits, double n_pulses, double rep_rate_hz) {
  if (!(n_pulses > 0.0)) throw InvalidArgument("key rates need a positive pulse count");
  if (!(rep_rate_hz > 0.0)) throw InvalidArgument("repetition rate must be positive");
  if (!(l_bits >= 0.0)) throw InvalidArgument("key length must be >= 0");
  KeyRates r;
  r.per_pulse = l_bits / n_pulses;
  r.bps = r.per_pulse * rep_rate_hz;
  return r;
}

double RateSummary::max_phi_bar() const {
  double m = 0.0;
  for (double p : phi_bar) m = std::max(m, p);
  return m;
}

RateSummary summarize(const estimation::EstimationResult& est) {
  RateSummary s;
  s.n_x = static_cast<double>(est.n_x);
  for (auto k : est.n_z) s.n_z.push_back(static_cast<double>(k));
  s.e_x_total = est.e_x_total.value();
  for (const auto& r : est.e_x_pair) s.e_x_pair.push_back(r.value());
  for (const auto& r : est.e_z_pair) s.e_z_pair.push_back(r.value());
  s.phi_bar = est.phi_bar;
  s.epsilon_bar = est.epsilon_bar;
  return s;
}

KeyReport finalize_report(RateSummary estimate, const SecurityParams& sec, double n_pulses,
                          std::span<const detection::ChannelParams> channels) {
  if (channels.empty()) throw InvalidArgument("at least one channel required");
  KeyReport report;
  report.key = key_length(estimate.n_x, std::min(estimate.e_x_total, 0.5), estimate.phi_bar, sec);
  report.leak_ec_bits = estimate.n_x * sec.f_e * binary_entropy(std::min(estimate.e_x_total, 0.5));
  report.estimation = std::move(estimate);
  report.n_pulses = n_pulses;
  report.rep_rate_hz = channels.front().rep_rate_hz;
  report.p_x = channels.front().p_x;
  double loss = 0.0;
  for (const auto& c : channels) loss += c.loss_db_dealer + c.loss_db_player;
  report.loss_db = loss / (2.0 * static_cast<double>(channels.size()));
  const auto rates = key_rates(static_cast<double>(report.key.l_bits), n_pulses, report.rep_rate_hz);
  report.rate_per_pulse = rates.per_pulse;
  report.rate_bps = rates.bps;
  return report;
}

PairYield pair_yield(const source::SourceParams& source, const detection::PairModel& model,
                     const detection::ChannelParams& channel) {
  source.validate();
  channel.validate();
  const double t_dealer = channel.dealer_transmittance();
  const double t_player = channel.player_transmittance();
  const postmatch::FrameRule frame = postmatch::frame_rule(source.base_state);

  // Indicators 0-3: dealer channels, 4-7: player channels.
  std::array<double, 8> log_dark_off{};
  for (std::size_t c = 0; c < 4; ++c) {
    log_dark_off[c] = std::log1p(-channel.dealer.dark_probability[c]);
    log_dark_off[c + 4] = std::log1p(-channel.player.dark_probability[c]);
  }

  PairYield y;
  for (Basis dealer_basis : kBases) {
    for (Basis player_basis : kBases) {
      const double weight = (dealer_basis == Basis::X ? channel.p_x : 1.0 - channel.p_x) *
                            (player_basis == Basis::X ? channel.p_x : 1.0 - channel.p_x);
      if (weight == 0.0) continue;
      const auto& joint = model.joint(dealer_basis, player_basis);

      // g[S]: probability that at least one indicator in S fires.
      std::array<double, 256> g{};
      for (unsigned s = 1; s < 256; ++s) {
        double p_hit = 0.0;
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            const std::size_t ca = channel_index(dealer_basis, a), cb = channel_index(player_basis, b);
            const double x = (s >> ca) & 1U ? t_dealer * channel.dealer.efficiency[ca] : 0.0;
            const double z = (s >> (cb + 4)) & 1U ? t_player * channel.player.efficiency[cb] : 0.0;
            p_hit += joint[static_cast<std::size_t>(2 * a + b)] * (x + z - x * z);
          }
        }
        double dark = 0.0;
        for (std::size_t c = 0; c < 8; ++c)
          if ((s >> c) & 1U) dark += log_dark_off[c];
        g[s] = any_click_probability(source, p_hit, dark);
      }

      // P(exactly T fires) = sum_{U subset T} (-1)^{|U|+1} g(~T | U) for T != {}.
      for (unsigned t = 1; t < 256; ++t) {
        if ((t & 0x0f) == 0 || (t & 0xf0) == 0) continue;
        const unsigned complement = 0xffU & ~t;
        double p = 0.0;
        for (unsigned u = t;; u = (u - 1) & t) {
          const double sign = (std::popcount(u) & 1) ? 1.0 : -1.0;
          p += sign * g[complement | u];
          if (u == 0) break;
        }
        if (p <= 0.0) continue;
        const auto reg_dealer = detection::registration_distribution(static_cast<std::uint8_t>(t & 0x0f));
        const auto reg_player = detection::registration_distribution(static_cast<std::uint8_t>(t >> 4));
        for (Basis basis : kBases) {
          const bool flip = basis == Basis::X ? frame.flip_x : frame.flip_z;
          double q = 0.0, err = 0.0;
          for (int a = 0; a < 2; ++a) {
            for (int b = 0; b < 2; ++b) {
              const double pr = reg_dealer[channel_index(basis, a)] * reg_player[channel_index(basis, b)];
              q += pr;
              if ((a ^ static_cast<int>(flip)) != b) err += pr;
            }
          }
          if (basis == Basis::X) {
            y.q_x += weight * p * q;
            y.err_x += weight * p * err;
          } else {
            y.q_z += weight * p * q;
            y.err_z += weight * p * err;
          }
        }
      }
    }
  }
  return y;
}

FirstOrderYield first_order_yield(double mu, double t_dealer, double t_player, double p_dark, double e_d) {
  const double signal = mu * t_dealer * t_player;
  const double q = signal + mu * mu * t_dealer * t_player + 4.0 * p_dark * mu * (t_dealer + t_player) +
                   16.0 * p_dark * p_dark;
  if (q <= 0.0) return {};
  return {q, (e_d * signal + 0.5 * (q - signal)) / q};
}

KeyReport analytic_model(std::span<const source::SourceParams> sources,
                         std::span<const detection::ChannelParams> channels, const SecurityParams& sec,
                         double n_pulses, const source::Misalignment& misalignment) {
  if (sources.empty() || sources.size() != channels.size())
    throw InvalidArgument("analytic model needs one source and one channel per player");
  if (!(n_pulses > 0.0)) throw InvalidArgument("n_pulses must be positive");
  sec.validate();

  std::vector<PairYield> yields;
  for (std::size_t j = 0; j < sources.size(); ++j) {
    const detection::PairModel model(source::effective_state(sources[j], misalignment));
    yields.push_back(pair_yield(sources[j], model, channels[j]));
  }

  RateSummary est;
  est.epsilon_bar = sec.epsilon_bar;
  double q_x = yields.front().q_x, q_z = yields.front().q_z;
  for (const auto& y : yields) {
    q_x = std::min(q_x, y.q_x);
    q_z = std::min(q_z, y.q_z);
  }
  est.n_x = n_pulses * q_x;
  const double n_z = n_pulses * q_z;
  for (const auto& y : yields) {
    est.e_x_pair.push_back(std::min(y.e_x(), 0.5));
    est.e_z_pair.push_back(std::min(y.e_z(), 0.5));
    est.n_z.push_back(n_z);
  }
  est.e_x_total = estimation::xor_error_composition(est.e_x_pair);
  for (double e_z : est.e_z_pair) {
    est.phi_bar.push_back(est.n_x >= 1.0 && n_z >= 1.0
                              ? estimation::phase_error_bound(e_z, est.n_x, n_z, sec.epsilon_bar)
                              : 0.5);
  }
  return finalize_report(std::move(est), sec, n_pulses, channels);
}

}  // namespace qss::keyrate
