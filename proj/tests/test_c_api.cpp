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

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "qss/qss.h"

namespace {

const char* kConfig =
    "n_pulses = 1e11\nsource1.mu = 0.023\nsource2.mu = 0.021\nchannel.loss_db = 7.6\n"
    "channel.eta_d = 0.83\nchannel.p_d = 1.3e-7\np_x = 0.9\nmisalignment.e_d = 0.01\n";

std::array<double, 16> werner_counts(double p, double total) {
  const double bloch[4][3] = {{0, 0, 1}, {0, 0, -1}, {1, 0, 0}, {0, 1, 0}};
  std::array<double, 16> c{};
  for (int s = 0; s < 4; ++s)
    for (int i = 0; i < 4; ++i) {
      double dot = 0;
      for (int a = 0; a < 3; ++a) dot += bloch[s][a] * bloch[i][a];
      c[s * 4 + i] = total * (1 - p * dot) / 4;
    }
  return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("qss_c_api_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("version and error reporting") {
  CHECK(std::string(qss_version()).size() > 0);
  qss_config* cfg = nullptr;
  CHECK(qss_config_parse("n_players = 2\n", &cfg) == QSS_ERR_CONFIG);
  CHECK(cfg == nullptr);
  CHECK(std::string(qss_last_error()).find("n_players") != std::string::npos);
  CHECK(qss_config_parse("bogus_key = 1\n", &cfg) == QSS_ERR_CONFIG);
  CHECK(qss_config_load("/nonexistent/file.cfg", &cfg) == QSS_ERR_IO);
  CHECK(qss_config_parse(nullptr, &cfg) == QSS_ERR_INVALID_ARGUMENT);
  CHECK(qss_config_parse(kConfig, nullptr) == QSS_ERR_INVALID_ARGUMENT);
  qss_config_free(nullptr);
  qss_report_free(nullptr);
  qss_tomography_free(nullptr);
  qss_string_free(nullptr);
}

TEST_CASE("config round trip") {
  qss_config* cfg = nullptr;
  REQUIRE(qss_config_parse(kConfig, &cfg) == QSS_OK);
  CHECK(qss_config_set(cfg, "n_players", "4") == QSS_OK);
  int n = 0;
  CHECK(qss_config_players(cfg, &n) == QSS_OK);
  CHECK(n == 4);
  CHECK(qss_config_set(cfg, "channel.loss_db", "-1") == QSS_ERR_CONFIG);
  CHECK(qss_config_set(cfg, "output.dir", "somewhere") == QSS_OK);
  char* dir = nullptr;
  REQUIRE(qss_config_output_dir(cfg, &dir) == QSS_OK);
  CHECK(std::string(dir) == "somewhere");
  qss_string_free(dir);

  char* text = nullptr;
  REQUIRE(qss_config_serialize(cfg, &text) == QSS_OK);
  qss_config* again = nullptr;
  REQUIRE(qss_config_parse(text, &again) == QSS_OK);
  char* text2 = nullptr;
  REQUIRE(qss_config_serialize(again, &text2) == QSS_OK);
  CHECK(std::string(text) == std::string(text2));
  qss_string_free(text);
  qss_string_free(text2);
  qss_config_free(again);
  qss_config_free(cfg);
}

TEST_CASE("keyrate report accessors") {
  qss_config* cfg = nullptr;
  REQUIRE(qss_config_parse(kConfig, &cfg) == QSS_OK);
  qss_report* rep = nullptr;
  REQUIRE(qss_keyrate(cfg, &rep) == QSS_OK);
  REQUIRE(qss_report_rows(rep) == 1);
  double rate = 0, loss = 0, l_bits = 0, n_x = 0;
  CHECK(qss_report_get(rep, 0, QSS_FIELD_RATE_PER_PULSE, &rate) == QSS_OK);
  CHECK(qss_report_get(rep, 0, QSS_FIELD_LOSS_DB, &loss) == QSS_OK);
  CHECK(qss_report_get(rep, 0, QSS_FIELD_L_BITS, &l_bits) == QSS_OK);
  CHECK(qss_report_get(rep, 0, QSS_FIELD_N_X, &n_x) == QSS_OK);
  CHECK(std::abs(rate / 2.19e-4 - 1) < 0.3);
  CHECK(loss == doctest::Approx(7.6));
  CHECK(l_bits == doctest::Approx(rate * 1e11).epsilon(1e-12));
  CHECK(qss_report_aborted(rep, 0) == 0);
  CHECK(qss_report_aborted(rep, 5) == -1);
  double v = 0;
  CHECK(qss_report_get(rep, 1, QSS_FIELD_N_X, &v) == QSS_ERR_INVALID_ARGUMENT);
  for (int j = 1; j <= 2; ++j) {
    CHECK(qss_report_player_get(rep, 0, j, QSS_PLAYER_E_Z_PAIR, &v) == QSS_OK);
    CHECK(v > 0.005);
    CHECK(v < 0.05);
    CHECK(qss_report_player_get(rep, 0, j, QSS_PLAYER_PHI_BAR, &v) == QSS_OK);
    CHECK(v > 0);
  }
  CHECK(qss_report_player_get(rep, 0, 0, QSS_PLAYER_N_Z, &v) == QSS_ERR_INVALID_ARGUMENT);
  CHECK(qss_report_player_get(rep, 0, 3, QSS_PLAYER_N_Z, &v) == QSS_ERR_INVALID_ARGUMENT);

  char* csv = nullptr;
  REQUIRE(qss_report_csv(rep, &csv) == QSS_OK);
  CHECK(std::string(csv).rfind("loss_db,p_x,N,n_x,E_X,max_phi_bar,l_bits,rate_per_pulse,rate_bps,aborted", 0) == 0);
  const auto dir = scratch_dir("keyrate");
  const auto path = (dir / "report.csv").string();
  CHECK(qss_report_write_csv(rep, path.c_str()) == QSS_OK);
  std::ifstream in(path);
  std::string contents((std::istreambuf_iterator<char>(in)), {});
  CHECK(contents == csv);
  qss_string_free(csv);
  CHECK(qss_report_write_csv(rep, "/nonexistent/dir/report.csv") == QSS_ERR_IO);
  qss_report_free(rep);

  CHECK(qss_simulate(cfg, nullptr, nullptr, &rep) == QSS_ERR_CONFIG);
  qss_config_free(cfg);
}

TEST_CASE("simulate and analyze through the C interface") {
  qss_config* cfg = nullptr;
  REQUIRE(qss_config_parse(kConfig, &cfg) == QSS_OK);
  REQUIRE(qss_config_set(cfg, "mode", "montecarlo") == QSS_OK);
  REQUIRE(qss_config_set(cfg, "seed", "7") == QSS_OK);
  REQUIRE(qss_config_set(cfg, "n_pulses", "2000000") == QSS_OK);
  REQUIRE(qss_config_set(cfg, "source.mu", "0.1") == QSS_OK);
  const auto dir = scratch_dir("simulate");
  const auto events = (dir / "events").string();
  const auto transcript = (dir / "transcript.csv").string();
  qss_report* sim = nullptr;
  const auto status = qss_simulate(cfg, events.c_str(), transcript.c_str(), &sim);
  REQUIRE((status == QSS_OK || status == QSS_ABORTED));
  CHECK(std::filesystem::exists(transcript));
  const std::string a = (dir / "events" / "session_1.csv").string();
  const std::string b = (dir / "events" / "session_2.csv").string();
  const char* logs[] = {a.c_str(), b.c_str()};
  qss_report* ana = nullptr;
  CHECK(qss_analyze(cfg, logs, 2, nullptr, &ana) == status);
  double x = 0, y = 0;
  qss_report_get(sim, 0, QSS_FIELD_N_X, &x);
  qss_report_get(ana, 0, QSS_FIELD_N_X, &y);
  CHECK(x > 0);
  CHECK(x == y);
  qss_report_get(sim, 0, QSS_FIELD_E_X, &x);
  qss_report_get(ana, 0, QSS_FIELD_E_X, &y);
  CHECK(x == y);
  qss_report_free(ana);
  qss_report_free(sim);
  CHECK(qss_analyze(cfg, logs, 1, nullptr, &ana) == QSS_ERR_CONFIG);
  const char* missing[] = {"/nonexistent/a.csv", "/nonexistent/b.csv"};
  CHECK(qss_analyze(cfg, missing, 2, nullptr, &ana) == QSS_ERR_IO);
  qss_config_free(cfg);
}

TEST_CASE("sweep through the C interface") {
  qss_config* cfg = nullptr;
  REQUIRE(qss_config_parse(kConfig, &cfg) == QSS_OK);
  qss_report* rep = nullptr;
  CHECK(qss_sweep(cfg, &rep) == QSS_ERR_CONFIG);
  CHECK(qss_config_set(cfg, "sweep.param", "loss_db") == QSS_ERR_CONFIG);
  REQUIRE(qss_config_set(cfg, "sweep.step", "5") == QSS_OK);
  REQUIRE(qss_config_set(cfg, "sweep.stop", "20") == QSS_OK);
  REQUIRE(qss_config_set(cfg, "sweep.param", "loss_db") == QSS_OK);
  REQUIRE(qss_sweep(cfg, &rep) == QSS_OK);
  REQUIRE(qss_report_rows(rep) == 5);
  double prev = INFINITY;
  for (size_t i = 0; i < 5; ++i) {
    double v = 0, r = 0;
    qss_report_get(rep, i, QSS_FIELD_SWEEP_VALUE, &v);
    qss_report_get(rep, i, QSS_FIELD_RATE_PER_PULSE, &r);
    CHECK(v == doctest::Approx(5.0 * i));
    CHECK(r <= prev);
    prev = r;
  }
  qss_report_free(rep);
  qss_config_free(cfg);
}

TEST_CASE("scalar helpers") {
  double v = 0;
  CHECK(qss_binary_entropy(0.5, &v) == QSS_OK);
  CHECK(v == doctest::Approx(1.0));
  CHECK(qss_binary_entropy(1.5, &v) == QSS_ERR_INVALID_ARGUMENT);
  const double rates[] = {0.0104, 0.0102};
  CHECK(qss_xor_error_composition(rates, 2, &v) == QSS_OK);
  CHECK(v == doctest::Approx(0.02038784).epsilon(1e-12));
  CHECK(qss_xor_error_composition(nullptr, 2, &v) == QSS_ERR_INVALID_ARGUMENT);
  CHECK(qss_gamma(0.02, 1e-10, 1e6, 1e6, &v) == QSS_OK);
  CHECK(v == doctest::Approx(0.00118864173965383).epsilon(1e-9));
  CHECK(qss_gamma(0.02, 1e-10, 0, 1e6, &v) == QSS_ERR_INVALID_ARGUMENT);
  double phi = 0;
  CHECK(qss_phase_error_bound(0.02, 1e6, 1e6, 1e-10, &phi) == QSS_OK);
  CHECK(phi == doctest::Approx(0.02 + 0.00118864173965383).epsilon(1e-9));
  const double phis[] = {0.027, 0.027};
  int64_t l = 0;
  int aborted = -1;
  CHECK(qss_key_length(1e6, 0.035, phis, 2, 1e-10, 1e-10, 1.16, 1, &l, &aborted) == QSS_OK);
  CHECK(aborted == 0);
  CHECK(l > 0);
  CHECK(qss_key_length(1e3, 0.4, phis, 2, 1e-10, 1e-10, 1.16, 1, &l, &aborted) == QSS_ABORTED);
  CHECK(aborted == 1);
  CHECK(l == 0);
}

TEST_CASE("tomography") {
  for (double p : {1.0, 0.8, 0.3}) {
    const auto counts = werner_counts(p, 40000);
    qss_tomography* t = nullptr;
    REQUIRE(qss_tomography_from_counts(counts.data(), QSS_PSI_MINUS, &t) == QSS_OK);
    double f = 0, purity = 0, vis = 0;
    CHECK(qss_tomography_fidelity(t, &f) == QSS_OK);
    CHECK(std::abs(f - (3 * p + 1) / 4) < 1e-12);
    CHECK(qss_tomography_purity(t, &purity) == QSS_OK);
    CHECK(purity == doctest::Approx((1 + 3 * p * p) / 4).epsilon(1e-12));
    CHECK(qss_tomography_visibility(t, 0, &vis) == QSS_OK);
    CHECK(vis == doctest::Approx(p).epsilon(1e-9));
    CHECK(qss_tomography_visibility(t, 1, &vis) == QSS_OK);
    CHECK(vis == doctest::Approx(p).epsilon(1e-9));
    double re[16], im[16];
    CHECK(qss_tomography_density(t, re, im) == QSS_OK);
    CHECK(re[5] == doctest::Approx((1 + p) / 4).epsilon(1e-12));
    CHECK(re[6] == doctest::Approx(-p / 2).epsilon(1e-12));
    const auto dir = scratch_dir("tomo");
    CHECK(qss_tomography_write_report(t, dir.string().c_str()) == QSS_OK);
    CHECK(std::filesystem::exists(dir / "density_matrix.csv"));
    CHECK(std::filesystem::exists(dir / "tomography.csv"));
    qss_tomography_free(t);
  }
  qss_tomography* t = nullptr;
  CHECK(qss_tomography_load("/nonexistent/counts.csv", QSS_PSI_MINUS, &t) == QSS_ERR_IO);
  std::array<double, 16> zeros{};
  CHECK(qss_tomography_from_counts(zeros.data(), QSS_PSI_MINUS, &t) != QSS_OK);
}
