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

// qss-sim: batch front-end over the qss C library.

#include <qss/qss.h>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitAborted = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;

int exit_code(qss_status s) {
  switch (s) {
    case QSS_OK: return kExitOk;
    case QSS_ABORTED: return kExitAborted;
    case QSS_ERR_IO: return kExitIo;
    default: return kExitConfig;
  }
}

int report_failure(qss_status s) {
  std::fprintf(stderr, "qss-sim: %s\n", qss_last_error());
  return exit_code(s);
}

struct Owned {
  qss_config* config = nullptr;
  qss_report* report = nullptr;
  qss_tomography* tomography = nullptr;
  ~Owned() {
    qss_report_free(report);
    qss_config_free(config);
    qss_tomography_free(tomography);
  }
};

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
};

std::string take(char* s) {
  std::string out = s ? s : "";
  qss_string_free(s);
  return out;
}

qss_status load(const CommonFlags& flags, Owned& owned) {
  qss_status s = flags.config_path.empty() ? qss_config_parse("", &owned.config)
                                           : qss_config_load(flags.config_path.c_str(), &owned.config);
  if (s != QSS_OK) return s;
  if (flags.seed) s = qss_config_set(owned.config, "seed", std::to_string(*flags.seed).c_str());
  if (s == QSS_OK && !flags.out_dir.empty()) s = qss_config_set(owned.config, "output.dir", flags.out_dir.c_str());
  return s;
}

std::optional<fs::path> output_dir(const Owned& owned, qss_status& s) {
  char* dir = nullptr;
  s = qss_config_output_dir(owned.config, &dir);
  if (s != QSS_OK) return std::nullopt;
  fs::path path = take(dir);
  std::error_code ec;
  fs::create_directories(path, ec);
  if (ec) {
    std::fprintf(stderr, "qss-sim: cannot create output directory '%s': %s\n", path.c_str(), ec.message().c_str());
    s = QSS_ERR_IO;
    return std::nullopt;
  }
  return path;
}

// Writes report.csv and the effective config (run.cfg) next to it.
int emit(const Owned& owned, const fs::path& dir, bool abort_is_failure) {
  qss_status s = qss_report_write_csv(owned.report, (dir / "report.csv").c_str());
  if (s != QSS_OK) return report_failure(s);
  char* text = nullptr;
  if ((s = qss_config_serialize(owned.config, &text)) != QSS_OK) return report_failure(s);
  const std::string cfg = take(text);
  std::ofstream out(dir / "run.cfg", std::ios::binary);
  out << cfg;
  out.close();
  if (!out) {
    std::fprintf(stderr, "qss-sim: failed writing '%s'\n", (dir / "run.cfg").c_str());
    return kExitIo;
  }

  char* csv = nullptr;
  if ((s = qss_report_csv(owned.report, &csv)) != QSS_OK) return report_failure(s);
  std::fputs(take(csv).c_str(), stdout);

  if (abort_is_failure) {
    for (size_t i = 0; i < qss_report_rows(owned.report); ++i) {
      if (qss_report_aborted(owned.report, i) == 1) {
        std::fprintf(stderr, "qss-sim: protocol aborted (final key length 0)\n");
        return kExitAborted;
      }
    }
  }
  return kExitOk;
}

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config_path, "Run configuration file");
  if (config_required) opt->required();
  cmd->add_option("--seed", flags.seed, "Root seed (overrides the config)");
  cmd->add_option("--out", flags.out_dir, "Output directory (overrides output.dir)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator and key-rate calculator for postmatching quantum secret sharing"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(qss_version()));

  CommonFlags flags;
  bool emit_events = false;
  bool emit_transcript = false;
  std::vector<std::string> logs;
  std::string counts;

  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo run: detection, postmatching, estimation, key length");
  add_common(simulate, flags, true);
  simulate->add_flag("--emit-events", emit_events, "Write per-session event logs to OUT/events/");
  simulate->add_flag("--emit-transcript", emit_transcript, "Write the round transcript to OUT/transcript.csv");

  auto* keyrate = app.add_subcommand("keyrate", "Analytic key rate");
  add_common(keyrate, flags, true);

  auto* sweep = app.add_subcommand("sweep", "One report row per sweep grid point");
  add_common(sweep, flags, true);

  auto* analyze = app.add_subcommand("analyze", "Postmatch recorded event logs (one per player)");
  add_common(analyze, flags, true);
  analyze->add_option("--logs", logs, "Session event logs (default: analyze.logs)");
  analyze->add_flag("--emit-transcript", emit_transcript, "Write the round transcript to OUT/transcript.csv");

  auto* tomography = app.add_subcommand("tomography", "Reconstruct a two-photon state from coincidence counts");
  add_common(tomography, flags, false);
  tomography->add_option("--counts", counts, "Counts CSV (default: tomography.counts)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  Owned owned;
  qss_status s = load(flags, owned);
  if (s != QSS_OK) return report_failure(s);
  const auto dir = output_dir(owned, s);
  if (!dir) return s == QSS_ERR_IO ? kExitIo : report_failure(s);

  if (*simulate) {
    const std::string events = (*dir / "events").string();
    const std::string transcript = (*dir / "transcript.csv").string();
    s = qss_simulate(owned.config, emit_events ? events.c_str() : nullptr,
                     emit_transcript ? transcript.c_str() : nullptr, &owned.report);
    return s == QSS_OK ? emit(owned, *dir, true) : report_failure(s);
  }
  if (*keyrate) {
    s = qss_keyrate(owned.config, &owned.report);
    return s == QSS_OK ? emit(owned, *dir, true) : report_failure(s);
  }
  if (*sweep) {
    s = qss_sweep(owned.config, &owned.report);
    return s == QSS_OK ? emit(owned, *dir, false) : report_failure(s);
  }
  if (*analyze) {
    std::vector<const char*> paths;
    for (const auto& p : logs) paths.push_back(p.c_str());
    const std::string transcript = (*dir / "transcript.csv").string();
    s = qss_analyze(owned.config, paths.data(), paths.size(), emit_transcript ? transcript.c_str() : nullptr,
                    &owned.report);
    return s == QSS_OK ? emit(owned, *dir, true) : report_failure(s);
  }

  s = qss_tomography_run(owned.config, counts.empty() ? nullptr : counts.c_str(), &owned.tomography);
  if (s == QSS_OK) s = qss_tomography_write_report(owned.tomography, dir->c_str());
  if (s != QSS_OK) return report_failure(s);
  std::ifstream summary(*dir / "tomography.csv");
  std::string line;
  while (std::getline(summary, line)) std::printf("%s\n", line.c_str());
  return kExitOk;
}
