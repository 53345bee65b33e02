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

#include "doctest.h"
#include "qss/error.hpp"
#include "qss/estimation.hpp"
#include "test_support.hpp"

using namespace qss;
using namespace qss::estimation;
using qss::test::point;
using qss::test::rel_err;

TEST_CASE("rates") {
  CHECK(Rate{3, 10}.value() == 0.3);
  CHECK_FALSE(Rate{0, 0}.defined());
  CHECK(Rate{0, 0}.value() == 0.5);
}

TEST_CASE("xor composition") {
  const double zeros[] = {0.0, 0.0, 0.0};
  CHECK(xor_error_composition(zeros) == 0.0);
  const double two[] = {0.0104, 0.0102};
  CHECK(rel_err(xor_error_composition(two), point("xor_0.0104_0.0102")) < 1e-14);
  CHECK(std::abs(xor_error_composition(two) - 0.0204) < 5e-4);
  const double three[] = {0.0104, 0.0103, 0.0101};
  CHECK(std::abs(xor_error_composition(three) - 0.0301) < 5e-4);
  const double four[] = {0.0102, 0.0102, 0.0101, 0.0103};
  CHECK(std::abs(xor_error_composition(four) - 0.0396) < 5e-4);
  const double half[] = {0.5, 0.01};
  CHECK(xor_error_composition(half) == 0.5);
  const double bad[] = {0.6};
  CHECK_THROWS_AS(xor_error_composition(bad), InvalidArgument);
}

TEST_CASE("gamma against the high-precision oracle") {
  CHECK(rel_err(gamma(0.02, 1e-10, 1e6, 1e6), point("gamma_0.02_1e6_1e6")) < 1e-9);
  const double g = gamma(0.0265, 1e-10, 1e7, 1e5);
  CHECK(rel_err(g, point("gamma_0.0265_1e7_1e5")) < 1e-9);
  CHECK(g < 0.01);
  const double small = gamma(0.25, 1e-10, 1e4, 1e4);
  CHECK(rel_err(small, point("gamma_0.25_1e4_1e4")) < 1e-9);
  CHECK(small > gamma(0.25, 1e-10, 1e6, 1e6));

  for (const auto& row : test::read_csv(test::data_path("finite_key_grid.csv"))) {
    const double got = gamma(std::stod(row[0]), std::stod(row[1]), std::stod(row[2]), std::stod(row[3]));
    CHECK(rel_err(got, std::stod(row[4])) < 1e-9);
  }
}

TEST_CASE("gamma domain") {
  CHECK_THROWS_AS(gamma(0.02, 1e-10, 0.0, 10.0), InvalidArgument);
  CHECK_THROWS_AS(gamma(0.02, 1e-10, 10.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(gamma(0.02, 0.0, 10.0, 10.0), InvalidArgument);
  CHECK_THROWS_AS(gamma(1.5, 1e-10, 10.0, 10.0), InvalidArgument);
  // λ = 0 is clamped to one virtual error, so the bound stays finite.
  const double g0 = gamma(0.0, 1e-10, 1e6, 1e6);
  CHECK(std::isfinite(g0));
  CHECK(g0 == gamma(1.0 / 2e6, 1e-10, 1e6, 1e6));
  CHECK(gamma(1.0, 1e-10, 1e6, 1e6) == gamma(1.0 - 1.0 / 2e6, 1e-10, 1e6, 1e6));
}

TEST_CASE("gamma monotonicity") {
  for (double lambda : {0.005, 0.02, 0.1}) {
    double prev = INFINITY;
    for (double m = 1e4; m <= 1e9; m *= 3) {
      const double g = gamma(lambda, 1e-10, m, 1e5);
      CHECK(g < prev);
      prev = g;
    }
    prev = INFINITY;
    for (double k = 1e4; k <= 1e9; k *= 3) {
      const double g = gamma(lambda, 1e-10, 1e6, k);
      CHECK(g < prev);
      prev = g;
    }
    prev = 0;
    for (double eps = 1e-3; eps >= 1e-15; eps /= 10) {
      const double g = gamma(lambda, eps, 1e6, 1e5);
      CHECK(g > prev);
      prev = g;
    }
  }
  CHECK(gamma(0.02, 1e-10, 1e12, 1e12) < 1e-4);
}

TEST_CASE("phase-error bound") {
  CHECK(phase_error_bound(0.0, 1e9, 1e9, 1e-10) < 1e-3);
  const double phi = phase_error_bound(0.0265, 1e8, 1e8, 1e-10);
  CHECK(phi > 0.0265);
  CHECK(phi - 0.0265 < 1e-3);
  CHECK(phase_error_bound(0.49, 1e3, 1e3, 1e-10) == 0.5);
  for (double e : {0.001, 0.01, 0.1, 0.3})
    for (double n : {1e3, 1e6, 1e9}) CHECK(phase_error_bound(e, n, n, 1e-10) > e);
}

TEST_CASE("phase-error bounds on an estimation result") {
  EstimationResult r;
  r.n_x = 1000000;
  r.n_z = {200000, 0};
  r.e_z_pair = {Rate{2000, 200000}, Rate{0, 0}};
  bound_phase_errors(r, 1e-10);
  REQUIRE(r.phi_bar.size() == 2);
  CHECK(r.phi_bar[0] == doctest::Approx(phase_error_bound(0.01, 1e6, 2e5, 1e-10)));
  CHECK(r.phi_bar[1] == 0.5);
  CHECK(r.max_phi_bar() == 0.5);

  EstimationResult swapped = r;
  std::swap(swapped.n_z[0], swapped.n_z[1]);
  std::swap(swapped.e_z_pair[0], swapped.e_z_pair[1]);
  bound_phase_errors(swapped, 1e-10);
  CHECK(swapped.max_phi_bar() == r.max_phi_bar());
}

TEST_CASE("Z subsampling") {
  postmatch::RoundSet rounds;
  rounds.n_players = 3;
  rounds.z.resize(1000);
  for (std::size_t i = 0; i < rounds.z.size(); ++i) rounds.z[i].dealer_bits = i;
  auto rng = make_rng(2, 0, 0);
  const auto half = subsample_z(rounds, 0.5, rng);
  CHECK(half.z.size() == 500);
  for (std::size_t i = 1; i < half.z.size(); ++i) CHECK(half.z[i].dealer_bits > half.z[i - 1].dealer_bits);
  CHECK(subsample_z(rounds, 1.0, rng).z.size() == 1000);
  CHECK_THROWS_AS(subsample_z(rounds, 0.0, rng), InvalidArgument);
}
