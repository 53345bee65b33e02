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
#include <map>
#include <numbers>

#include "doctest.h"
#include "qss/error.hpp"
#include "qss/keyrate.hpp"
#include "qss/privacy_amplification.hpp"
#include "test_support.hpp"

using namespace qss;
using namespace qss::keyrate;
using detection::Basis;
using detection::ChannelParams;
using detection::DetectorSet;
using qss::test::point;
using qss::test::rel_err;

namespace {

// Forward evaluation of the click-pattern distribution: OR-convolve dark
// counts and K independent pairs, weighting K by the pair-number law.
PairYield enumerate_yield(const source::SourceParams& src, const detection::PairModel& model, const ChannelParams& ch) {
  using Dist = std::array<double, 256>;
  const auto or_convolve = [](const Dist& a, const Dist& b) {
    Dist out{};
    for (unsigned i = 0; i < 256; ++i)
      for (unsigned j = 0; j < 256; ++j) out[i | j] += a[i] * b[j];
    return out;
  };
  const auto frame = postmatch::frame_rule(src.base_state);
  PairYield y;
  for (Basis bd : {Basis::X, Basis::Z}) {
    for (Basis bp : {Basis::X, Basis::Z}) {
      const double w = (bd == Basis::X ? ch.p_x : 1 - ch.p_x) * (bp == Basis::X ? ch.p_x : 1 - ch.p_x);
      Dist dark{};
      dark[0] = 1.0;
      for (unsigned c = 0; c < 8; ++c) {
        const double p = c < 4 ? ch.dealer.dark_probability[c] : ch.player.dark_probability[c - 4];
        Dist next{};
        for (unsigned m = 0; m < 256; ++m) {
          next[m] += dark[m] * (1 - p);
          next[m | (1U << c)] += dark[m] * p;
        }
        dark = next;
      }
      Dist pair{};
      const auto& joint = model.joint(bd, bp);
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
          const auto ca = detection::channel_index(bd, a), cb = detection::channel_index(bp, b);
          const double pa = ch.dealer_transmittance() * ch.dealer.efficiency[ca];
          const double pb = ch.player_transmittance() * ch.player.efficiency[cb];
          const double pj = joint[static_cast<std::size_t>(2 * a + b)];
          pair[0] += pj * (1 - pa) * (1 - pb);
          pair[1U << ca] += pj * pa * (1 - pb);
          pair[1U << (cb + 4)] += pj * (1 - pa) * pb;
          pair[(1U << ca) | (1U << (cb + 4))] += pj * pa * pb;
        }
      }
      Dist total{};
      Dist current = dark;
      const int k_max = src.statistics == source::PairStatistics::single ? 1 : 40;
      for (int k = 0; k <= k_max; ++k) {
        const double pk = src.statistics == source::PairStatistics::single
                              ? (k == 0 ? 1 - src.mu : src.mu)
                              : std::exp(-src.mu + k * std::log(src.mu) - std::lgamma(k + 1.0));
        for (unsigned m = 0; m < 256; ++m) total[m] += pk * current[m];
        current = or_convolve(current, pair);
      }
      for (unsigned m = 0; m < 256; ++m) {
        if ((m & 0xf) == 0 || (m >> 4) == 0) continue;
        const auto rd = detection::registration_distribution(static_cast<std::uint8_t>(m & 0xf));
        const auto rp = detection::registration_distribution(static_cast<std::uint8_t>(m >> 4));
        for (Basis b : {Basis::X, Basis::Z}) {
          const bool flip = b == Basis::X ? frame.flip_x : frame.flip_z;
          for (int a = 0; a < 2; ++a) {
            for (int c = 0; c < 2; ++c) {
              const double p = w * total[m] * rd[detection::channel_index(b, a)] * rp[detection::channel_index(b, c)];
              (b == Basis::X ? y.q_x : y.q_z) += p;
              if ((a ^ int(flip)) != c) (b == Basis::X ? y.err_x : y.err_z) += p;
            }
          }
        }
      }
    }
  }
  return y;
}

ChannelParams table_channel(double loss_db, double p_x) {
  ChannelParams c;
  c.loss_db_dealer = c.loss_db_player = loss_db;
  c.dealer = c.player = DetectorSet::uniform(0.83, 1.3e-7);
  c.p_x = p_x;
  return c;
}

KeyReport table_point(double loss_db, double p_x, double e_d = 0.01) {
  const std::vector<source::SourceParams> sources{{.mu = 0.023}, {.mu = 0.021}};
  const std::vector<ChannelParams> channels(2, table_channel(loss_db, p_x));
  return analytic_model(sources, channels, SecurityParams{}, 1e11, source::Misalignment::symmetric(e_d));
}

}  // namespace

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5) == 1.0);
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(rel_err(binary_entropy(0.035), point("h_0.035")) < 1e-13);
  CHECK(std::abs(binary_entropy(0.035) - 0.2189) < 1e-4);
  CHECK_THROWS_AS(binary_entropy(-0.1), InvalidArgument);
  CHECK_THROWS_AS(binary_entropy(1.1), InvalidArgument);
}

TEST_CASE("key length examples") {
  const SecurityParams sec;
  const double zero_phi[] = {0.0, 0.0};
  const auto k = key_length(1e6, 0.0, zero_phi, sec);
  CHECK(k.l_bits == 999902);
  CHECK(rel_err(k.raw, point("key_raw_1e6_0_0")) < 1e-12);
  CHECK_FALSE(k.aborted);

  const double half[] = {0.01, 0.5};
  const auto aborted = key_length(1e6, 0.0, half, sec);
  CHECK(aborted.l_bits == 0);
  CHECK(aborted.aborted);

  const double phi[] = {0.027};
  const auto mid = key_length(1e6, 0.035, phi, sec);
  CHECK(rel_err(mid.raw, point("key_raw_1e6_0.035_0.027")) < 1e-9);
  CHECK(mid.l_bits == static_cast<std::int64_t>(std::floor(point("key_raw_1e6_0.035_0.027"))));
  CHECK(mid.l_bits == doctest::Approx(5.67e5).epsilon(0.01));

  CHECK(key_length(0.0, 0.0, zero_phi, sec).aborted);
  CHECK_THROWS_AS(key_length(-1.0, 0.0, zero_phi, sec), InvalidArgument);
  SecurityParams bad;
  bad.f_e = 0.9;
  CHECK_THROWS_AS(key_length(1e6, 0.0, zero_phi, bad), InvalidArgument);
}

TEST_CASE("key length against the high-precision grid") {
  const SecurityParams sec;
  const auto rows = test::read_csv(test::data_path("finite_key_grid.csv"));
  CHECK(rows.size() == 100);
  for (const auto& row : rows) {
    const double phi[] = {std::stod(row[7]), std::stod(row[8])};
    const auto k = key_length(std::stod(row[5]), std::stod(row[6]), phi, sec);
    CHECK(rel_err(k.raw, std::stod(row[9])) < 1e-9);
    CHECK(k.l_bits == std::stoll(row[10]));
    const double phi_bar = estimation::phase_error_bound(std::stod(row[0]), std::stod(row[2]), std::stod(row[3]),
                                                         std::stod(row[1]));
    CHECK(rel_err(phi_bar, phi[0]) < 1e-9);
  }
}

TEST_CASE("key length monotonicity") {
  const SecurityParams sec;
  std::int64_t prev = INT64_MAX;
  for (double e = 0.0; e <= 0.12; e += 0.005) {
    const double phi[] = {0.02};
    const auto l = key_length(1e7, e, phi, sec).l_bits;
    CHECK(l <= prev);
    prev = l;
  }
  prev = INT64_MAX;
  for (double p = 0.0; p <= 0.5; p += 0.02) {
    const double phi[] = {0.01, p};
    const auto l = key_length(1e7, 0.02, phi, sec).l_bits;
    CHECK(l <= prev);
    prev = l;
  }
  prev = 0;
  for (double n = 1e3; n <= 1e10; n *= 2) {
    const double phi[] = {0.02};
    const auto l = key_length(n, 0.02, phi, sec).l_bits;
    CHECK(l >= prev);
    prev = l;
  }
}

TEST_CASE("key rates") {
  const auto r = key_rates(2.19e-4 * 1e11, 1e11, 96.7e6);
  CHECK(r.per_pulse == doctest::Approx(2.19e-4));
  CHECK(r.bps == doctest::Approx(21177.3));
  const auto row3 = key_rates(1.77e-5 * 1e11, 1e11, 96.7e6);
  CHECK(std::abs(row3.bps - 1711.0) < 1.0);
  const auto none = key_rates(0, 1e11, 96.7e6);
  CHECK(none.per_pulse == 0.0);
  CHECK(none.bps == 0.0);
  CHECK_THROWS_AS(key_rates(10, 0, 96.7e6), InvalidArgument);
}

TEST_CASE("exact yield model matches forward enumeration") {
  ChannelParams ch;
  ch.loss_db_dealer = 3.0;
  ch.loss_db_player = 7.0;
  ch.dealer.efficiency = {0.9, 0.8, 0.7, 0.6};
  ch.player.efficiency = {0.5, 0.95, 0.85, 0.75};
  ch.dealer.dark_probability = {1e-2, 2e-2, 5e-3, 3e-2};
  ch.player.dark_probability = {4e-3, 1e-2, 2e-2, 1e-3};
  ch.p_x = 0.7;
  for (auto stats : {source::PairStatistics::poisson, source::PairStatistics::single}) {
    for (auto kind : {qmath::BellKind::psi_minus, qmath::BellKind::phi_minus}) {
      const source::SourceParams src{.mu = 0.35, .visibility_param = 0.9, .rotation_theta = 0.2, .base_state = kind,
                                     .statistics = stats};
      const detection::PairModel model(source::effective_state(src, {0.02, 0.05}));
      const auto exact = pair_yield(src, model, ch);
      const auto oracle = enumerate_yield(src, model, ch);
      CHECK(rel_err(exact.q_x, oracle.q_x) < 1e-10);
      CHECK(rel_err(exact.q_z, oracle.q_z) < 1e-10);
      CHECK(rel_err(exact.err_x, oracle.err_x) < 1e-10);
      CHECK(rel_err(exact.err_z, oracle.err_z) < 1e-10);
    }
  }
}

TEST_CASE("exact yield agrees with the first-order formula at leading order") {
  for (double mu : {1e-3, 3e-3}) {
    const source::SourceParams src{.mu = mu};
    auto ch = table_channel(7.6, 0.5);
    ch.dealer = ch.player = DetectorSet::uniform(0.83, 1e-9);
    const detection::PairModel model(source::effective_state(src, source::Misalignment::symmetric(0.01)));
    const auto exact = pair_yield(src, model, ch);
    const double t = ch.dealer_transmittance() * 0.83;
    const auto first = first_order_yield(mu, t, t, 1e-9, 0.01);
    // Differences are O(mu): multi-pair and double-click corrections.
    CHECK(std::abs(exact.q_x / (0.25 * first.q) - 1.0) < 2 * mu);
    CHECK(std::abs(exact.e_x() - first.error_rate) < 2 * mu);
  }
  const auto first = first_order_yield(0.023, 0.144, 0.144, 1.3e-7, 0.01);
  CHECK(first.q == doctest::Approx(0.023 * 0.144 * 0.144 * 1.023 + 4 * 1.3e-7 * 0.023 * 0.288 + 16 * 1.69e-14));
  CHECK(first_order_yield(0, 0.1, 0.1, 0, 0.01).q == 0.0);
}

TEST_CASE("analytic model") {
  const auto r = table_point(7.6, 0.9);
  CHECK(r.rate_per_pulse == doctest::Approx(2.19e-4).epsilon(0.30));
  CHECK(r.rate_bps / r.rate_per_pulse == doctest::Approx(96.7e6).epsilon(1e-15));
  CHECK(table_point(12.9, 0.9).rate_per_pulse == doctest::Approx(1.77e-5).epsilon(0.30));
  CHECK(r.loss_db == 7.6);
  CHECK(r.p_x == 0.9);
  CHECK(r.estimation.e_x_pair.size() == 2);
  CHECK(r.estimation.e_x_total == doctest::Approx(estimation::xor_error_composition(r.estimation.e_x_pair)));
  CHECK(r.leak_ec_bits == doctest::Approx(r.estimation.n_x * 1.16 * binary_entropy(r.estimation.e_x_total)));

  const std::vector<source::SourceParams> dark{{.mu = 0.0}, {.mu = 0.0}};
  const std::vector<ChannelParams> channels(2, table_channel(7.6, 0.9));
  const auto none = analytic_model(dark, channels, SecurityParams{}, 1e11, {});
  CHECK(none.l_bits() == 0);
  CHECK(none.aborted());
  CHECK(none.rate_per_pulse == 0.0);

  double prev = INFINITY;
  double cutoff = -1;
  for (double loss = 0.0; loss <= 40.0; loss += 0.5) {
    const double rate = table_point(loss, 0.9).rate_per_pulse;
    CHECK(rate <= prev);
    if (rate == 0.0 && cutoff < 0) cutoff = loss;
    prev = rate;
  }
  CHECK(cutoff > 15.0);
  CHECK(cutoff < 40.0);

  CHECK_THROWS_AS(analytic_model(std::span(dark.data(), 1), channels, SecurityParams{}, 1e11, {}), InvalidArgument);
  CHECK_THROWS_AS(analytic_model(dark, channels, SecurityParams{}, 0, {}), InvalidArgument);
}

TEST_CASE("rate summary of a counted estimation") {
  estimation::EstimationResult e;
  e.n_x = 1000;
  e.n_z = {400, 400};
  e.e_x_total = {20, 1000};
  e.e_x_pair = {{10, 1000}, {10, 1000}};
  e.e_z_pair = {{4, 400}, {0, 0}};
  e.phi_bar = {0.05, 0.5};
  const auto s = summarize(e);
  CHECK(s.n_x == 1000);
  CHECK(s.e_x_total == 0.02);
  CHECK(s.e_z_pair[1] == 0.5);
  CHECK(s.max_phi_bar() == 0.5);
  const std::vector<ChannelParams> channels(2, table_channel(1.0, 0.5));
  const auto report = finalize_report(s, SecurityParams{}, 1e6, channels);
  CHECK(report.aborted());
  CHECK(report.rep_rate_hz == 96.7e6);
}

TEST_CASE("final key extraction") {
  const std::vector<BitString> strings{BitString(256, 1), BitString(256, 1)};
  const auto empty = extract_final_key(strings, 0, 7);
  REQUIRE(empty.size() == 2);
  CHECK(empty[0].empty());

  auto rng = make_rng(1, 0, 0);
  BitString raw(500);
  for (auto& b : raw) b = bernoulli(rng, 0.5);
  const std::vector<BitString> same{raw, raw, raw};
  const auto keys = extract_final_key(same, 120, 99);
  CHECK(keys[0].size() == 120);
  CHECK(keys[0] == keys[1]);
  CHECK(keys[1] == keys[2]);
  CHECK(extract_final_key(same, 120, 99) == keys);
  CHECK(extract_final_key(same, 120, 100)[0] != keys[0]);

  CHECK_THROWS_AS(extract_final_key(same, 501, 1), InvalidArgument);
  const std::vector<BitString> uneven{raw, BitString(10, 0)};
  CHECK_THROWS_AS(extract_final_key(uneven, 5, 1), InvalidArgument);

  for (const auto& row : test::read_csv(test::data_path("toeplitz_vector.csv"))) {
    const auto seed = std::stoull(row[0]);
    const auto out_bits = std::stoul(row[2]);
    BitString input, expected;
    for (char c : row[3]) input.push_back(static_cast<std::uint8_t>(c - '0'));
    for (char c : row[4]) expected.push_back(static_cast<std::uint8_t>(c - '0'));
    REQUIRE(input.size() == std::stoul(row[1]));
    CHECK(toeplitz_hash(input, out_bits, seed) == expected);
  }
}
