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
#include <span>
#include <vector>

#include "qss/postmatch.hpp"
#include "qss/rng.hpp"

namespace qss::estimation {

// Error count over a sample size, kept exact until a real value is needed.
struct Rate {
  std::uint64_t errors = 0;
  std::uint64_t total = 0;

  bool defined() const noexcept { return total > 0; }
  // errors / total; 0.5 when undefined so downstream bounds abort.
  double value() const noexcept { return total > 0 ? static_cast<double>(errors) / static_cast<double>(total) : 0.5; }
};

struct EstimationResult {
  std::uint64_t n_x = 0;            // m: X rounds (raw key length)
  std::vector<std::uint64_t> n_z;   // k_j: Z samples used against player j
  Rate e_x_total;                   // multiparty X error E^X
  std::vector<Rate> e_x_pair;       // diagnostic pairwise X errors
  std::vector<Rate> e_z_pair;       // E^Z between dealer and player j
  std::vector<double> phi_bar;      // phase-error bound per player
  double epsilon_bar = 1e-10;

  double max_phi_bar() const;
};

// Counts E^X, E^X_{AB_j} and E^Z_{AB_j} from rounds whose Z bits are already
// aligned (postmatch::build_rounds). phi_bar is left empty.
EstimationResult compute_qbers(const postmatch::RoundSet& rounds);

// Uniform random subset (without replacement, order kept) of the Z rounds.
postmatch::RoundSet subsample_z(postmatch::RoundSet rounds, double fraction, Rng& rng);

// (1 - prod_j (1 - 2 e_j)) / 2: error of the XOR of independent noisy bits.
double xor_error_composition(std::span<const double> pairwise_rates);

// Finite-sample deviation for random sampling without replacement; m is the
// key-sample size, k the test-sample size. lambda is clamped to
// [1/(m+k), 1 - 1/(m+k)] so zero-error samples stay finite.
double gamma(double lambda, double epsilon_bar, double m, double k);

// min(1/2, e_z + gamma(e_z, epsilon_bar, m, k)).
double phase_error_bound(double e_z, double m, double k, double epsilon_bar);

// Fills result.phi_bar from e_z_pair, n_x and n_z. Empty samples give 1/2.
void bound_phase_errors(EstimationResult& result, double epsilon_bar);

}  // namespace qss::estimation
