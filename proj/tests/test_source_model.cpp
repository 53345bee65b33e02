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

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "qss/error.hpp"
#include "qss/source_model.hpp"

using namespace qss;
using namespace qss::source;
using qmath::Basis;
using qmath::BellKind;

namespace {

double p_equal(const qmath::DensityMatrix& rho, Basis b) {
  const Basis bases[] = {b, b};
  const auto t = qmath::outcome_distribution(rho, bases);
  return t[0] + t[3];
}

}  // namespace

TEST_CASE("effective state") {
  SourceParams ideal{.mu = 0.02};
  const auto psi = qmath::DensityMatrix::pure(qmath::bell_state(BellKind::psi_minus));
  CHECK((effective_state(ideal).matrix() - psi.matrix()).norm() < 1e-12);

  for (double theta : {0.0, 0.4, 2.0}) {
    SourceParams mixed{.mu = 0.02, .visibility_param = 0.0, .rotation_theta = theta};
    CHECK((effective_state(mixed).matrix() - qmath::DensityMatrix::maximally_mixed(4).matrix()).norm() < 1e-12);
  }

  SourceParams rotated{.mu = 0.02, .rotation_theta = std::numbers::pi / 4};
  CHECK(p_equal(effective_state(rotated), Basis::rectilinear) == doctest::Approx(0.5).epsilon(1e-12));

  for (double p = 0.0; p <= 1.0; p += 0.1) {
    SourceParams s{.mu = 0.02, .visibility_param = p};
    CHECK(std::abs(qmath::fidelity(effective_state(s), psi) - (3 * p + 1) / 4) < 1e-12);
  }

  for (double theta : {0.1, 0.7, 1.9, -2.4}) {
    for (auto kind : {BellKind::psi_minus, BellKind::phi_plus}) {
      SourceParams a{.mu = 0.1, .visibility_param = 0.8, .rotation_theta = theta, .base_state = kind};
      SourceParams b = a;
      b.rotation_theta += std::numbers::pi;
      CHECK((effective_state(a).matrix() - effective_state(b).matrix()).norm() < 1e-12);
    }
  }
}

TEST_CASE("misalignment acts per basis on the player photon") {
  SourceParams ideal{.mu = 0.02};
  const auto rho = effective_state(ideal, {0.01, 0.0});
  CHECK(p_equal(rho, Basis::rectilinear) == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(p_equal(rho, Basis::diagonal) == doctest::Approx(0.0).epsilon(1e-12));
  const auto both = effective_state(ideal, Misalignment::symmetric(0.03));
  CHECK(p_equal(both, Basis::rectilinear) == doctest::Approx(0.03).epsilon(1e-12));
  CHECK(p_equal(both, Basis::diagonal) == doctest::Approx(0.03).epsilon(1e-12));
  CHECK_THROWS_AS(effective_state(ideal, {1.5, 0.0}), InvalidArgument);
}

TEST_CASE("fidelity calibration") {
  CHECK(werner_weight_from_fidelity(0.988) == doctest::Approx(0.984).epsilon(1e-14));
  CHECK(werner_weight_from_fidelity(1.0) == 1.0);
  CHECK(werner_weight_from_fidelity(0.25) == 0.0);
  CHECK_THROWS_AS(werner_weight_from_fidelity(0.2), InvalidArgument);
  CHECK_THROWS_AS(werner_weight_from_fidelity(1.01), InvalidArgument);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(effective_state(SourceParams{.mu = -1.0}), InvalidArgument);
  CHECK_THROWS_AS(effective_state(SourceParams{.mu = 0.1, .visibility_param = 1.2}), InvalidArgument);
  CHECK_THROWS_AS((SourceParams{.mu = 1.5, .statistics = PairStatistics::single}.validate()), InvalidArgument);
  CHECK(parse_pair_statistics("single") == PairStatistics::single);
  CHECK(to_string(parse_pair_statistics("poisson")) == "poisson");
  CHECK_THROWS_AS(parse_pair_statistics("thermal"), InvalidArgument);
}

TEST_CASE("poisson pair statistics") {
  SourceParams zero{.mu = 0.0};
  auto rng = make_rng(1, 0, 0);
  for (int i = 0; i < 1000; ++i) CHECK(sample_pair_count(zero, rng) == 0);

  const double mu = 0.023;
  SourceParams s{.mu = mu};
  CHECK(emission_probability(s) == doctest::Approx(0.02274).epsilon(1e-4));
  const double p1 = mu * std::exp(-mu);
  const double p2plus = 1.0 - std::exp(-mu) - p1;
  CHECK(p2plus / p1 == doctest::Approx(0.0116).epsilon(5e-3));

  constexpr int kDraws = 1000000;
  double sum = 0, sum_sq = 0;
  int ones = 0, many = 0;
  for (int i = 0; i < kDraws; ++i) {
    const double k = sample_pair_count(s, rng);
    sum += k;
    sum_sq += k * k;
    ones += k == 1;
    many += k >= 2;
  }
  const double mean = sum / kDraws;
  CHECK(std::abs(mean - mu) < 3 * std::sqrt(mu / kDraws));
  CHECK((sum_sq / kDraws - mean * mean) == doctest::Approx(mu).epsilon(0.05));
  const double emitted = ones + many;
  CHECK(std::abs(emitted / kDraws - emission_probability(s)) <
        3 * std::sqrt(emission_probability(s) * (1 - emission_probability(s)) / kDraws));
  const double ratio = static_cast<double>(many) / ones;
  CHECK(std::abs(ratio - p2plus / p1) < 3 * ratio / std::sqrt(static_cast<double>(many)));
}

TEST_CASE("zero-truncated and single-pair sampling") {
  auto rng = make_rng(5, 0, 0);
  SourceParams s{.mu = 0.4};
  constexpr int kDraws = 200000;
  double sum = 0;
  for (int i = 0; i < kDraws; ++i) {
    const auto k = sample_nonzero_pair_count(s, rng);
    REQUIRE(k >= 1);
    sum += k;
  }
  const double expected = s.mu / -std::expm1(-s.mu);
  CHECK(sum / kDraws == doctest::Approx(expected).epsilon(0.01));

  SourceParams single{.mu = 0.3, .statistics = PairStatistics::single};
  int emitted = 0;
  for (int i = 0; i < kDraws; ++i) {
    const auto k = sample_pair_count(single, rng);
    REQUIRE(k <= 1);
    emitted += static_cast<int>(k);
  }
  CHECK(std::abs(emitted / double(kDraws) - 0.3) < 3 * std::sqrt(0.21 / kDraws));
  CHECK(sample_nonzero_pair_count(single, rng) == 1);
  CHECK(pair_number_pgf(single, 0.5) == doctest::Approx(0.85));
  CHECK(pair_number_pgf(s, 0.5) == doctest::Approx(std::exp(-0.2)));
  CHECK(emission_probability(SourceParams{.mu = 1.0, .statistics = PairStatistics::single}) == 1.0);
}
