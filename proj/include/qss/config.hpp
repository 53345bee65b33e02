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

// Run configuration: line-oriented `key = value` text with dotted prefixes.
//
// Unindexed `source.*` / `channel.*` keys set every pair; `sourceJ.*` and
// `channelJ.*` (J = 1..n_players-1) override one pair regardless of order.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qss/detection.hpp"
#include "qss/keyrate.hpp"
#include "qss/source_model.hpp"

namespace qss::config {

enum class Mode { analytic, montecarlo, analyze };

Mode parse_mode(std::string_view name);
std::string_view to_string(Mode mode);

struct SweepSpec {
  std::string param;   // empty: no sweep
  double start = 0.0;
  double stop = 0.0;
  double step = 0.0;

  bool enabled() const { return !param.empty(); }
  std::size_t rows() const;
  double value(std::size_t row) const { return start + static_cast<double>(row) * step; }
  void validate() const;
  bool operator==(const SweepSpec&) const = default;
};

struct RunConfig {
  Mode mode = Mode::analytic;
  int n_players = 3;
  std::int64_t n_pulses = 0;   // 0: derived from the logs in analyze mode
  std::optional<std::uint64_t> seed;
  std::vector<source::SourceParams> sources{2};
  std::vector<detection::ChannelParams> channels{2};
  keyrate::SecurityParams security;
  source::Misalignment misalignment;
  double z_sample_fraction = 1.0;
  SweepSpec sweep;
  std::vector<std::string> analyze_logs;
  std::string tomography_counts;
  qmath::BellKind tomography_reference = qmath::BellKind::psi_minus;
  std::string output_dir = ".";

  std::size_t pairs() const { return static_cast<std::size_t>(n_players - 1); }
  void validate() const;
  bool operator==(const RunConfig&) const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

// Canonical text; parse_config(serialize(c)) == c.
std::string serialize(const RunConfig& config);

// Applies one `key = value` assignment as if it were the last line of the file.
void set_value(RunConfig& config, std::string_view key, std::string_view value);

// Names accepted by sweep.param.
bool is_sweep_param(std::string_view name);

// Copy of the config with the sweep parameter set to value everywhere it applies.
RunConfig with_sweep_value(const RunConfig& config, std::string_view param, double value);

}  // namespace qss::config
