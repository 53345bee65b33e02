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

/* C interface to the qss-sim library.
 *
 * Every fallible call returns a qss_status; on failure qss_last_error() holds a
 * message for the calling thread until its next failing call. Objects returned
 * through out-parameters are owned by the caller and released with the matching
 * *_free function. */
#ifndef QSS_QSS_H
#define QSS_QSS_H

#include <stddef.h>
#include <stdint.h>

#if defined(QSS_BUILDING_LIBRARY)
#define QSS_API __attribute__((visibility("default")))
#else
#define QSS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qss_status {
  QSS_OK = 0,
  QSS_ABORTED = 1,
  QSS_ERR_CONFIG = 2,
  QSS_ERR_IO = 3,
  QSS_ERR_INVALID_ARGUMENT = 4,
  QSS_ERR_INTERNAL = 5
} qss_status;

typedef enum qss_bell { QSS_PSI_MINUS = 0, QSS_PSI_PLUS = 1, QSS_PHI_MINUS = 2, QSS_PHI_PLUS = 3 } qss_bell;

typedef enum qss_field {
  QSS_FIELD_LOSS_DB = 0,
  QSS_FIELD_P_X,
  QSS_FIELD_N_PULSES,
  QSS_FIELD_N_X,
  QSS_FIELD_E_X,
  QSS_FIELD_MAX_PHI_BAR,
  QSS_FIELD_L_BITS,
  QSS_FIELD_RATE_PER_PULSE,
  QSS_FIELD_RATE_BPS,
  QSS_FIELD_LEAK_EC_BITS,
  QSS_FIELD_REP_RATE_HZ,
  QSS_FIELD_SWEEP_VALUE
} qss_field;

/* Per-player quantities; player is 1-based. */
typedef enum qss_player_field {
  QSS_PLAYER_N_Z = 0,
  QSS_PLAYER_E_X_PAIR,
  QSS_PLAYER_E_Z_PAIR,
  QSS_PLAYER_PHI_BAR
} qss_player_field;

typedef struct qss_config qss_config;
typedef struct qss_report qss_report;
typedef struct qss_tomography qss_tomography;

QSS_API const char* qss_version(void);
QSS_API const char* qss_last_error(void);
QSS_API void qss_string_free(char* s);

/* Configuration */
QSS_API qss_status qss_config_parse(const char* text, qss_config** out);
QSS_API qss_status qss_config_load(const char* path, qss_config** out);
QSS_API qss_status qss_config_set(qss_config* config, const char* key, const char* value);
QSS_API qss_status qss_config_serialize(const qss_config* config, char** out);
QSS_API qss_status qss_config_players(const qss_config* config, int* n_players);
QSS_API qss_status qss_config_output_dir(const qss_config* config, char** out);
QSS_API void qss_config_free(qss_config* config);

/* Runs. Optional paths may be NULL; qss_analyze falls back to analyze.logs when n_logs is 0. */
QSS_API qss_status qss_keyrate(const qss_config* config, qss_report** out);
QSS_API qss_status qss_simulate(const qss_config* config, const char* events_dir, const char* transcript_path,
                                qss_report** out);
QSS_API qss_status qss_analyze(const qss_config* config, const char* const* log_paths, size_t n_logs,
                               const char* transcript_path, qss_report** out);
QSS_API qss_status qss_sweep(const qss_config* config, qss_report** out);

/* Reports */
QSS_API size_t qss_report_rows(const qss_report* report);
QSS_API qss_status qss_report_get(const qss_report* report, size_t row, qss_field field, double* out);
QSS_API qss_status qss_report_player_get(const qss_report* report, size_t row, int player, qss_player_field field,
                                         double* out);
/* 1 if the row aborted (l = 0), 0 if not, -1 on a bad row index. */
QSS_API int qss_report_aborted(const qss_report* report, size_t row);
QSS_API qss_status qss_report_csv(const qss_report* report, char** out);
QSS_API qss_status qss_report_write_csv(const qss_report* report, const char* path);
QSS_API void qss_report_free(qss_report* report);

/* Tomography. Counts are indexed [signal * 4 + idler] over projectors H, V, D, R. */
QSS_API qss_status qss_tomography_load(const char* counts_path, qss_bell reference, qss_tomography** out);
/* Counts file and reference state from the config; counts_path overrides tomography.counts. */
QSS_API qss_status qss_tomography_run(const qss_config* config, const char* counts_path, qss_tomography** out);
QSS_API qss_status qss_tomography_from_counts(const double counts[16], qss_bell reference, qss_tomography** out);
QSS_API qss_status qss_tomography_density(const qss_tomography* t, double re[16], double im[16]);
QSS_API qss_status qss_tomography_fidelity(const qss_tomography* t, double* out);
QSS_API qss_status qss_tomography_purity(const qss_tomography* t, double* out);
/* Fringe visibility with the idler polarizer at 0 (H/V) or 45 degrees (D/A). */
QSS_API qss_status qss_tomography_visibility(const qss_tomography* t, int diagonal, double* out);
/* Writes density_matrix.csv and tomography.csv into dir. */
QSS_API qss_status qss_tomography_write_report(const qss_tomography* t, const char* dir);
QSS_API void qss_tomography_free(qss_tomography* t);

/* Scalar helpers */
QSS_API qss_status qss_binary_entropy(double x, double* out);
QSS_API qss_status qss_gamma(double lambda, double epsilon_bar, double m, double k, double* out);
QSS_API qss_status qss_phase_error_bound(double e_z, double m, double k, double epsilon_bar, double* out);
QSS_API qss_status qss_xor_error_composition(const double* rates, size_t n, double* out);
// Returns QSS_ABORTED with *l_bits = 0 when no key survives.
QSS_API qss_status qss_key_length(double n_x, double e_x_total, const double* phi_bar, size_t n_phi,
                                  double epsilon_c, double epsilon_prime, double f_e, double q, int64_t* l_bits,
                                  int* aborted);

#ifdef __cplusplus
}
#endif

#endif
