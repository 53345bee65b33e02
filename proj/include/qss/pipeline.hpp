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

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qss/config.hpp"
#include "qss/event_log.hpp"
#include "qss/keyrate.hpp"
#include "qss/postmatch.hpp"

namespace qss::pipeline {

struct Options {
  bool keep_events = false;   // retain per-session event logs in the output
  bool keep_rounds = false;   // retain postmatched rounds (transcript export)
  unsigned threads = 0;       // 0: worker_count()
};

struct RunOutput {
  keyrate::KeyReport report;
  estimation::EstimationResult estimation;   // counts behind the report (Monte-Carlo and analyze only)
  postmatch::RoundSet rounds;
  std::vector<std::vector<detection::DetectionEvent>> session_events;
};

// Hardware threads, capped by QSS_SIM_THREADS when set.
unsigned worker_count();

// Pulses simulated per independent rng block.
inline constexpr std::int64_t kBlockPulses = std::int64_t{1} << 22;

keyrate::KeyReport run_analytic(const config::RunConfig& config);

RunOutput run_montecarlo(const config::RunConfig& config, const Options& options = {});

// Full pipeline over recorded session logs, one per player.
RunOutput run_analyze(const config::RunConfig& config, std::span<const detection::EventLog> logs,
                      const Options& options = {});

struct ReportRow {
  keyrate::KeyReport report;
  int n_players = 3;
  std::optional<std::uint64_t> seed;
  std::string sweep_param;
  double sweep_value = std::nan("");
};

// One row per grid point, in grid order. Monte-Carlo mode reuses the root seed for every point.
std::vector<ReportRow> run_sweep(const config::RunConfig& config, const Options& options = {});

}  // namespace qss::pipeline
