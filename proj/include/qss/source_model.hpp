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

#include <cstdint>
#include <string_view>

#include "qss/qmath.hpp"
#include "qss/rng.hpp"

namespace qss::source {

enum class PairStatistics {
  poisson,  // pulsed SPDC: pairs per pulse ~ Poisson(mu)
  single,   // at most one pair per pulse, emitted with probability mu
};

PairStatistics parse_pair_statistics(std::string_view name);
std::string_view to_string(PairStatistics s);

// One polarization-entangled pair source.
struct SourceParams {
  double mu = 0.0;                 // mean pairs per pulse
  double visibility_param = 1.0;   // Werner weight p
  double rotation_theta = 0.0;     // polarization rotation on the dealer photon, radians
  qmath::BellKind base_state = qmath::BellKind::psi_minus;
  PairStatistics statistics = PairStatistics::poisson;

  void validate() const;
};

// Local Pauli channel on the player photon: rectilinear flip with prob. x,
// diagonal flip with prob. z. Models measurement misalignment e_d.
struct Misalignment {
  double x = 0.0;
  double z = 0.0;

  static Misalignment symmetric(double e_d) { return {e_d, e_d}; }
  void validate() const;
};

// Werner weight reproducing a fidelity F to the base Bell state: p = (4F - 1)/3.
double werner_weight_from_fidelity(double fidelity);

// (R(theta) (x) I) . M[p |bell><bell| + (1-p) I/4] . (R(theta) (x) I)^dagger.
qmath::DensityMatrix effective_state(const SourceParams& params, const Misalignment& misalignment = {});

// Pairs emitted in one pulse.
std::uint32_t sample_pair_count(const SourceParams& params, Rng& rng);

// Pair count conditioned on at least one pair (used by pulse skipping).
std::uint32_t sample_nonzero_pair_count(const SourceParams& params, Rng& rng);

// Probability that a pulse emits at least one pair.
double emission_probability(const SourceParams& params);

// E[s^K] for the pair-number distribution K.
double pair_number_pgf(const SourceParams& params, double s);

}  // namespace qss::source
