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

// Finite-key length, key rates and the closed-form expected-performance model.

#include <cstdint>
#include <span>
#include <vector>

#include "qss/detection.hpp"
#include "qss/estimation.hpp"
#include "qss/source_model.hpp"

namespace qss::keyrate {

struct SecurityParams {
  double epsilon_c = 1e-10;
  double epsilon_prime = 1e-10;
  double epsilon_bar = 1e-10;
  double f_e = 1.16;   // error-correction inefficiency
  double q = 1.0;      // basis complementarity

  void validate() const;
  bool operator==(const SecurityParams&) const = default;
};

// h(x) = -x log2 x - (1-x) log2(1-x), h(0) = h(1) = 0.
double binary_entropy(double x);

struct KeyLength {
  double raw = 0.0;          // value before flooring and clamping
  std::int64_t l_bits = 0;
  bool aborted = true;       // l_bits == 0
};

// l = floor(n_x [q - max_j h(phi_j) - f_e h(E^X)] - log2(1 / (4 eps_c eps'^2))), clamped at 0.
KeyLength key_length(double n_x, double e_x_total, std::span<const double> phi_bar, const SecurityParams& sec);

struct KeyRates {
  double per_pulse = 0.0;
  double bps = 0.0;
};

KeyRates key_rates(double l_bits, double n_pulses, double rep_rate_hz);

// Real-valued view of the estimated parameters; the analytic model yields
// expected (non-integer) counts, the Monte-Carlo path exact ones.
struct RateSummary {
  double n_x = 0.0;
  std::vector<double> n_z;
  double e_x_total = 0.0;
  std::vector<double> e_x_pair;
  std::vector<double> e_z_pair;
  std::vector<double> phi_bar;
  double epsilon_bar = 1e-10;

  double max_phi_bar() const;
};

RateSummary summarize(const estimation::EstimationResult& est);

struct KeyReport {
  RateSummary estimation;
  KeyLength key;
  double leak_ec_bits = 0.0;
  double n_pulses = 0.0;
  double rep_rate_hz = 0.0;
  double rate_per_pulse = 0.0;
  double rate_bps = 0.0;
  double loss_db = 0.0;   // mean per-arm loss
  double p_x = 0.0;

  std::int64_t l_bits() const { return key.l_bits; }
  bool aborted() const { return key.aborted; }
};

// Key length, leakage and rates for an estimate obtained over n_pulses.
KeyReport finalize_report(RateSummary estimate, const SecurityParams& sec, double n_pulses,
                          std::span<const detection::ChannelParams> channels);

// Per-pulse probabilities of a same-basis coincidence and of an erroneous one
// (after the dealer's frame correction), per protocol basis.
struct PairYield {
  double q_x = 0.0;
  double err_x = 0.0;   // joint probability: X coincidence and bits disagree
  double q_z = 0.0;
  double err_z = 0.0;

  double e_x() const { return q_x > 0 ? err_x / q_x : 0.5; }
  double e_z() const { return q_z > 0 ? err_z / q_z : 0.5; }
};

// Exact expectation of the event simulator: pair numbers, channel loss,
// per-detector efficiency and dark counts enter through independent thinning,
// and the click pattern of all eight detectors is resolved by
// inclusion-exclusion before applying the double-click rule.
PairYield pair_yield(const source::SourceParams& source, const detection::PairModel& model,
                     const detection::ChannelParams& channel);

// Leading-order yield in mu and dark counts with uniform detectors:
// Q = mu tA tB + mu^2 tA tB + 4 pd mu (tA + tB) + 16 pd^2 and
// error = [e_d mu tA tB + (Q - mu tA tB)/2] / Q.
struct FirstOrderYield {
  double q = 0.0;
  double error_rate = 0.5;
};
FirstOrderYield first_order_yield(double mu, double t_dealer, double t_player, double p_dark, double e_d);

// Expected-value performance model for n_players - 1 = sources.size() pairs.
KeyReport analytic_model(std::span<const source::SourceParams> sources,
                         std::span<const detection::ChannelParams> channels, const SecurityParams& sec,
                         double n_pulses, const source::Misalignment& misalignment);

}  // namespace qss::keyrate
