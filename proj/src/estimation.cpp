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

#include "qss/estimation.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

#include "qss/error.hpp"

namespace qss::estimation {

double EstimationResult::max_phi_bar() const {
  double m = 0.0;
  for (double p : phi_bar) m = std::max(m, p);
  return m;
}

EstimationResult compute_qbers(const postmatch::RoundSet& rounds) {
  const int players = rounds.players();
  EstimationResult r;
  r.n_x = rounds.x.size();
  r.n_z.assign(static_cast<std::size_t>(players), rounds.z.size());
  r.e_x_pair.assign(static_cast<std::size_t>(players), Rate{0, rounds.x.size()});
  r.e_z_pair.assign(static_cast<std::size_t>(players), Rate{0, rounds.z.size()});
  r.e_x_total.total = rounds.x.size();

  for (const auto& round : rounds.x) {
    const int parity = std::popcount(round.player_bits) & 1;
    if (parity != round.dealer_bit) ++r.e_x_total.errors;
    const std::uint64_t diff = round.dealer_bits ^ round.player_bits;
    for (int j = 0; j < players; ++j)
      if ((diff >> j) & 1U) ++r.e_x_pair[static_cast<std::size_t>(j)].errors;
  }
  for (const auto& round : rounds.z) {
    const std::uint64_t reference = round.dealer_bit ? ~std::uint64_t{0} : 0;
    const std::uint64_t diff = reference ^ round.player_bits;
    for (int j = 0; j < players; ++j)
      if ((diff >> j) & 1U) ++r.e_z_pair[static_cast<std::size_t>(j)].errors;
  }
  return r;
}

postmatch::RoundSet subsample_z(postmatch::RoundSet rounds, double fraction, Rng& rng) {
  if (!(fraction > 0.0 && fraction <= 1.0)) throw InvalidArgument("Z sample fraction must lie in (0,1]");
  if (fraction == 1.0) return rounds;
  const std::size_t n = rounds.z.size();
  const auto keep = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(n)));
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < keep; ++i) {
    const auto span = n - i;
    const auto pick = i + std::min(span - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(span)));
    std::swap(idx[i], idx[pick]);
  }
  idx.resize(keep);
  std::sort(idx.begin(), idx.end());
  std::vector<postmatch::GhzRound> kept;
  kept.reserve(keep);
  for (auto i : idx) kept.push_back(rounds.z[i]);
  rounds.z = std::move(kept);
  return rounds;
}

double xor_error_composition(std::span<const double> pairwise_rates) {
  double product = 1.0;
  for (double e : pairwise_rates) {
    if (!(e >= 0.0 && e <= 0.5)) throw InvalidArgument("pairwise error rates must lie in [0, 1/2]");
    product *= 1.0 - 2.0 * e;
  }
  return 0.5 * (1.0 - product);
}

double gamma(double lambda, double epsilon_bar, double m, double k) {
  if (!(m >= 1.0) || !(k >= 1.0)) throw InvalidArgument("gamma needs m >= 1 and k >= 1");
  if (!(epsilon_bar > 0.0 && epsilon_bar < 1.0)) throw InvalidArgument("epsilon_bar must lie in (0,1)");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("gamma: observed rate must lie in [0,1]");
  const double n = m + k;
  const double floor_rate = 1.0 / n;
  lambda = std::clamp(lambda, floor_rate, 1.0 - floor_rate);

  const double a = std::max(m, k);
  const double g = n / (m * k) *
                   std::log(n / (2.0 * std::numbers::pi * m * k * lambda * (1.0 - lambda) * epsilon_bar * epsilon_bar));
  if (!(g > 0.0)) throw InvalidArgument("gamma: sample sizes too large for this epsilon_bar (log term <= 0)");
  const double ag_n = a * g / n;
  const double numerator = (1.0 - 2.0 * lambda) * ag_n + std::sqrt(ag_n * ag_n + 4.0 * lambda * (1.0 - lambda) * g);
  const double denominator = 2.0 + 2.0 * a * a * g / (n * n);
  return numerator / denominator;
}

double phase_error_bound(double e_z, double m, double k, double epsilon_bar) {
  return std::min(0.5, e_z + gamma(e_z, epsilon_bar, m, k));
}

void bound_phase_errors(EstimationResult& result, double epsilon_bar) {
  result.epsilon_bar = epsilon_bar;
  result.phi_bar.clear();
  for (std::size_t j = 0; j < result.e_z_pair.size(); ++j) {
    const auto& rate = result.e_z_pair[j];
    const double k = static_cast<double>(j < result.n_z.size() ? result.n_z[j] : rate.total);
    if (result.n_x == 0 || !rate.defined() || k < 1.0) {
      result.phi_bar.push_back(0.5);
      continue;
    }
    result.phi_bar.push_back(phase_error_bound(rate.value(), static_cast<double>(result.n_x), k, epsilon_bar));
  }
}

}  // namespace qss::estimation
