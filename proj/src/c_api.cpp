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

#include "qss/qss.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <new>
#include <numbers>
#include <sstream>

#include "qss/config.hpp"
#include "qss/error.hpp"
#include "qss/estimation.hpp"
#include "qss/event_log.hpp"
#include "qss/keyrate.hpp"
#include "qss/pipeline.hpp"
#include "qss/qmath.hpp"
#include "qss/report.hpp"

struct qss_config {
  qss::config::RunConfig value;
};

struct qss_report {
  std::vector<qss::pipeline::ReportRow> rows;
};

struct qss_tomography {
  qss::qmath::DensityMatrix rho;
  qss::qmath::BellKind reference;
};

namespace {

namespace fs = std::filesystem;

thread_local std::string g_last_error;

qss_status fail(qss_status status, const char* what) {
  g_last_error = what;
  return status;
}

template <class F>
qss_status guarded(F&& f) {
  try {
    return f();
  } catch (const qss::ConfigError& e) {
    return fail(QSS_ERR_CONFIG, e.what());
  } catch (const qss::IoError& e) {
    return fail(QSS_ERR_IO, e.what());
  } catch (const qss::InvalidArgument& e) {
    return fail(QSS_ERR_INVALID_ARGUMENT, e.what());
  } catch (const fs::filesystem_error& e) {
    return fail(QSS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(QSS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(QSS_ERR_INTERNAL, e.what());
  }
}

qss_status null_argument(const char* name) {
  return fail(QSS_ERR_INVALID_ARGUMENT, (std::string("null argument: ") + name).c_str());
}

char* copy_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

qss::qmath::BellKind to_kind(qss_bell b) {
  switch (b) {
    case QSS_PSI_MINUS: return qss::qmath::BellKind::psi_minus;
    case QSS_PSI_PLUS: return qss::qmath::BellKind::psi_plus;
    case QSS_PHI_MINUS: return qss::qmath::BellKind::phi_minus;
    case QSS_PHI_PLUS: return qss::qmath::BellKind::phi_plus;
  }
  throw qss::InvalidArgument("unknown Bell state code");
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qss::IoError("cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  if (!out) throw qss::IoError("failed writing '" + path.string() + "'");
}

void write_transcript(const char* path, const qss::postmatch::RoundSet& rounds) {
  std::ostringstream text;
  qss::postmatch::write_transcript(text, rounds);
  write_text(path, text.str());
}

qss_report* single_row(const qss::config::RunConfig& config, qss::keyrate::KeyReport report) {
  auto* out = new qss_report;
  out->rows.push_back({std::move(report), config.n_players, config.seed, {}, std::nan("")});
  return out;
}

const qss::pipeline::ReportRow* row_at(const qss_report* report, size_t row) {
  if (!report || row >= report->rows.size()) return nullptr;
  return &report->rows[row];
}

double fringe_visibility(const qss_tomography& t, double idler_angle) {
  constexpr int kSteps = 360;
  std::vector<double> angles;
  for (int i = 0; i < kSteps; ++i) angles.push_back(std::numbers::pi * i / kSteps);
  const auto fringe = qss::qmath::polarization_fringe(t.rho, idler_angle, angles);
  const auto [lo, hi] = std::minmax_element(fringe.begin(), fringe.end());
  return qss::qmath::visibility(*hi, std::max(0.0, *lo));
}

}  // namespace

extern "C" {

const char* qss_version(void) { return "0.1.0"; }

const char* qss_last_error(void) { return g_last_error.c_str(); }

void qss_string_free(char* s) { std::free(s); }

qss_status qss_config_parse(const char* text, qss_config** out) {
  if (!text) return null_argument("text");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new qss_config{qss::config::parse_config(text)};
    return QSS_OK;
  });
}

qss_status qss_config_load(const char* path, qss_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new qss_config{qss::config::load_config(path)};
    return QSS_OK;
  });
}

qss_status qss_config_set(qss_config* config, const char* key, const char* value) {
  if (!config) return null_argument("config");
  if (!key || !value) return null_argument("key/value");
  return guarded([&] {
    qss::config::set_value(config->value, key, value);
    return QSS_OK;
  });
}

qss_status qss_config_serialize(const qss_config* config, char** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = copy_string(qss::config::serialize(config->value));
    return QSS_OK;
  });
}

qss_status qss_config_players(const qss_config* config, int* n_players) {
  if (!config) return null_argument("config");
  if (!n_players) return null_argument("n_players");
  *n_players = config->value.n_players;
  return QSS_OK;
}

qss_status qss_config_output_dir(const qss_config* config, char** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = copy_string(config->value.output_dir);
    return QSS_OK;
  });
}

void qss_config_free(qss_config* config) { delete config; }

qss_status qss_keyrate(const qss_config* config, qss_report** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = single_row(config->value, qss::pipeline::run_analytic(config->value));
    return QSS_OK;
  });
}

qss_status qss_simulate(const qss_config* config, const char* events_dir, const char* transcript_path,
                        qss_report** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    qss::pipeline::Options options;
    options.keep_events = events_dir != nullptr;
    options.keep_rounds = transcript_path != nullptr;
    auto result = qss::pipeline::run_montecarlo(config->value, options);
    if (events_dir) {
      fs::create_directories(events_dir);
      for (std::size_t j = 0; j < result.session_events.size(); ++j) {
        qss::detection::save_event_log(fs::path(events_dir) / ("session_" + std::to_string(j + 1) + ".csv"),
                                       result.session_events[j]);
      }
    }
    if (transcript_path) write_transcript(transcript_path, result.rounds);
    *out = single_row(config->value, std::move(result.report));
    return QSS_OK;
  });
}

qss_status qss_analyze(const qss_config* config, const char* const* log_paths, size_t n_logs,
                       const char* transcript_path, qss_report** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  if (n_logs > 0 && !log_paths) return null_argument("log_paths");
  return guarded([&] {
    std::vector<qss::detection::EventLog> logs;
    for (size_t i = 0; i < n_logs; ++i) {
      if (!log_paths[i]) throw qss::InvalidArgument("null log path");
      logs.push_back(qss::detection::load_event_log(log_paths[i]));
    }
    if (n_logs == 0)
      for (const auto& path : config->value.analyze_logs) logs.push_back(qss::detection::load_event_log(path));
    qss::pipeline::Options options;
    options.keep_rounds = transcript_path != nullptr;
    auto result = qss::pipeline::run_analyze(config->value, logs, options);
    if (transcript_path) write_transcript(transcript_path, result.rounds);
    *out = single_row(config->value, std::move(result.report));
    return QSS_OK;
  });
}

qss_status qss_sweep(const qss_config* config, qss_report** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new qss_report{qss::pipeline::run_sweep(config->value)};
    return QSS_OK;
  });
}

size_t qss_report_rows(const qss_report* report) { return report ? report->rows.size() : 0; }

qss_status qss_report_get(const qss_report* report, size_t row, qss_field field, double* out) {
  const auto* r = row_at(report, row);
  if (!r) return fail(QSS_ERR_INVALID_ARGUMENT, "report row out of range");
  if (!out) return null_argument("out");
  const auto& k = r->report;
  switch (field) {
    case QSS_FIELD_LOSS_DB: *out = k.loss_db; break;
    case QSS_FIELD_P_X: *out = k.p_x; break;
    case QSS_FIELD_N_PULSES: *out = k.n_pulses; break;
    case QSS_FIELD_N_X: *out = k.estimation.n_x; break;
    case QSS_FIELD_E_X: *out = k.estimation.e_x_total; break;
    case QSS_FIELD_MAX_PHI_BAR: *out = k.estimation.max_phi_bar(); break;
    case QSS_FIELD_L_BITS: *out = static_cast<double>(k.l_bits()); break;
    case QSS_FIELD_RATE_PER_PULSE: *out = k.rate_per_pulse; break;
    case QSS_FIELD_RATE_BPS: *out = k.rate_bps; break;
    case QSS_FIELD_LEAK_EC_BITS: *out = k.leak_ec_bits; break;
    case QSS_FIELD_REP_RATE_HZ: *out = k.rep_rate_hz; break;
    case QSS_FIELD_SWEEP_VALUE: *out = r->sweep_value; break;
    default: return fail(QSS_ERR_INVALID_ARGUMENT, "unknown report field");
  }
  return QSS_OK;
}

qss_status qss_report_player_get(const qss_report* report, size_t row, int player, qss_player_field field,
                                 double* out) {
  const auto* r = row_at(report, row);
  if (!r) return fail(QSS_ERR_INVALID_ARGUMENT, "report row out of range");
  if (!out) return null_argument("out");
  const auto& e = r->report.estimation;
  if (player < 1 || static_cast<size_t>(player) > e.phi_bar.size())
    return fail(QSS_ERR_INVALID_ARGUMENT, "player index out of range");
  const auto j = static_cast<size_t>(player - 1);
  switch (field) {
    case QSS_PLAYER_N_Z: *out = e.n_z[j]; break;
    case QSS_PLAYER_E_X_PAIR: *out = e.e_x_pair[j]; break;
    case QSS_PLAYER_E_Z_PAIR: *out = e.e_z_pair[j]; break;
    case QSS_PLAYER_PHI_BAR: *out = e.phi_bar[j]; break;
    default: return fail(QSS_ERR_INVALID_ARGUMENT, "unknown player field");
  }
  return QSS_OK;
}

int qss_report_aborted(const qss_report* report, size_t row) {
  const auto* r = row_at(report, row);
  return r ? (r->report.aborted() ? 1 : 0) : -1;
}

qss_status qss_report_csv(const qss_report* report, char** out) {
  if (!report) return null_argument("report");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::ostringstream text;
    qss::report::write_report_csv(text, report->rows);
    *out = copy_string(text.str());
    return QSS_OK;
  });
}

qss_status qss_report_write_csv(const qss_report* report, const char* path) {
  if (!report) return null_argument("report");
  if (!path) return null_argument("path");
  return guarded([&] {
    std::ostringstream text;
    qss::report::write_report_csv(text, report->rows);
    write_text(path, text.str());
    return QSS_OK;
  });
}

void qss_report_free(qss_report* report) { delete report; }

qss_status qss_tomography_load(const char* counts_path, qss_bell reference, qss_tomography** out) {
  if (!counts_path) return null_argument("counts_path");
  if (!out) return null_argument("out");
  return guarded([&] {
    std::ifstream in(counts_path, std::ios::binary);
    if (!in) throw qss::IoError(std::string("cannot open counts file '") + counts_path + "'");
    const auto counts = qss::qmath::read_tomography_csv(in);
    *out = new qss_tomography{qss::qmath::tomographic_reconstruction(counts), to_kind(reference)};
    return QSS_OK;
  });
}

qss_status qss_tomography_run(const qss_config* config, const char* counts_path, qss_tomography** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  return guarded([&] {
    const std::string path = counts_path ? counts_path : config->value.tomography_counts;
    if (path.empty()) throw qss::ConfigError("tomography.counts is not set");
    std::ifstream in(path, std::ios::binary);
    if (!in) throw qss::IoError("cannot open counts file '" + path + "'");
    const auto counts = qss::qmath::read_tomography_csv(in);
    *out = new qss_tomography{qss::qmath::tomographic_reconstruction(counts), config->value.tomography_reference};
    return QSS_OK;
  });
}

qss_status qss_tomography_from_counts(const double counts[16], qss_bell reference, qss_tomography** out) {
  if (!counts) return null_argument("counts");
  if (!out) return null_argument("out");
  return guarded([&] {
    qss::qmath::TomographyCounts c{};
    std::copy(counts, counts + 16, c.begin());
    *out = new qss_tomography{qss::qmath::tomographic_reconstruction(c), to_kind(reference)};
    return QSS_OK;
  });
}

qss_status qss_tomography_density(const qss_tomography* t, double re[16], double im[16]) {
  if (!t) return null_argument("tomography");
  if (!re || !im) return null_argument("re/im");
  const auto& m = t->rho.matrix();
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) {
      re[r * 4 + c] = m(r, c).real();
      im[r * 4 + c] = m(r, c).imag();
    }
  }
  return QSS_OK;
}

qss_status qss_tomography_fidelity(const qss_tomography* t, double* out) {
  if (!t) return null_argument("tomography");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = qss::qmath::fidelity(t->rho, qss::qmath::DensityMatrix::pure(qss::qmath::bell_state(t->reference)));
    return QSS_OK;
  });
}

qss_status qss_tomography_purity(const qss_tomography* t, double* out) {
  if (!t) return null_argument("tomography");
  if (!out) return null_argument("out");
  *out = t->rho.purity();
  return QSS_OK;
}

qss_status qss_tomography_visibility(const qss_tomography* t, int diagonal, double* out) {
  if (!t) return null_argument("tomography");
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = fringe_visibility(*t, diagonal ? std::numbers::pi / 4 : 0.0);
    return QSS_OK;
  });
}

qss_status qss_tomography_write_report(const qss_tomography* t, const char* dir) {
  if (!t) return null_argument("tomography");
  if (!dir) return null_argument("dir");
  return guarded([&] {
    fs::create_directories(dir);
    std::ostringstream rho;
    rho << "row,col,re,im\n";
    const auto& m = t->rho.matrix();
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c)
        rho << r << ',' << c << ',' << qss::report::format_number(m(r, c).real()) << ','
            << qss::report::format_number(m(r, c).imag()) << '\n';
    write_text(fs::path(dir) / "density_matrix.csv", rho.str());

    const double f = qss::qmath::fidelity(t->rho, qss::qmath::DensityMatrix::pure(qss::qmath::bell_state(t->reference)));
    std::ostringstream summary;
    summary << "metric,value\n"
            << "reference," << qss::qmath::to_string(t->reference) << '\n'
            << "fidelity," << qss::report::format_number(f) << '\n'
            << "purity," << qss::report::format_number(t->rho.purity()) << '\n'
            << "visibility_hv," << qss::report::format_number(fringe_visibility(*t, 0.0)) << '\n'
            << "visibility_da," << qss::report::format_number(fringe_visibility(*t, std::numbers::pi / 4)) << '\n';
    write_text(fs::path(dir) / "tomography.csv", summary.str());
    return QSS_OK;
  });
}

void qss_tomography_free(qss_tomography* t) { delete t; }

qss_status qss_binary_entropy(double x, double* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = qss::keyrate::binary_entropy(x);
    return QSS_OK;
  });
}

qss_status qss_gamma(double lambda, double epsilon_bar, double m, double k, double* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = qss::estimation::gamma(lambda, epsilon_bar, m, k);
    return QSS_OK;
  });
}

qss_status qss_phase_error_bound(double e_z, double m, double k, double epsilon_bar, double* out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = qss::estimation::phase_error_bound(e_z, m, k, epsilon_bar);
    return QSS_OK;
  });
}

qss_status qss_xor_error_composition(const double* rates, size_t n, double* out) {
  if (!out) return null_argument("out");
  if (n > 0 && !rates) return null_argument("rates");
  return guarded([&] {
    *out = qss::estimation::xor_error_composition(std::span<const double>(rates, n));
    return QSS_OK;
  });
}

qss_status qss_key_length(double n_x, double e_x_total, const double* phi_bar, size_t n_phi, double epsilon_c,
                          double epsilon_prime, double f_e, double q, int64_t* l_bits, int* aborted) {
  if (!l_bits) return null_argument("l_bits");
  if (n_phi > 0 && !phi_bar) return null_argument("phi_bar");
  return guarded([&] {
    qss::keyrate::SecurityParams sec;
    sec.epsilon_c = epsilon_c;
    sec.epsilon_prime = epsilon_prime;
    sec.f_e = f_e;
    sec.q = q;
    const auto k = qss::keyrate::key_length(n_x, e_x_total, std::span<const double>(phi_bar, n_phi), sec);
    *l_bits = k.l_bits;
    if (aborted) *aborted = k.aborted ? 1 : 0;
    return k.aborted ? QSS_ABORTED : QSS_OK;
  });
}

}  // extern "C"
