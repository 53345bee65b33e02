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

// CSV event logs: `pulse_index,timestamp_ns,station,basis,bit`.

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qss/detection.hpp"

namespace qss::detection {

inline constexpr const char* kEventLogHeader = "pulse_index,timestamp_ns,station,basis,bit";

// One recorded (dealer module, player) session.
struct EventLog {
  std::string name;
  std::vector<DetectionEvent> events;

  // Dealer-side (A*) and player-side (B*) events, each sorted by timestamp.
  SessionEvents split() const;
};

// Writes events in (timestamp, station) order.
void write_event_log(std::ostream& out, std::span<const DetectionEvent> events);

// Throws ConfigError (with line number) on malformed rows.
std::vector<DetectionEvent> read_event_log(std::istream& in);

// Throws IoError when the file cannot be opened.
EventLog load_event_log(const std::filesystem::path& path);
void save_event_log(const std::filesystem::path& path, std::span<const DetectionEvent> events);

}  // namespace qss::detection
