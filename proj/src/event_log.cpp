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

#include "qss/event_log.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "qss/error.hpp"

namespace qss::detection {
namespace {

std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <typename T>
T parse_number(std::string_view s, int line) {
  T v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw ConfigError("malformed number '" + std::string(s) + "'", line);
  return v;
}

bool event_order(const DetectionEvent& l, const DetectionEvent& r) {
  if (l.timestamp_ns != r.timestamp_ns) return l.timestamp_ns < r.timestamp_ns;
  return l.station < r.station;
}

}  // namespace

SessionEvents EventLog::split() const {
  SessionEvents s;
  for (const auto& e : events) (e.station.role == Role::dealer ? s.dealer : s.player).push_back(e);
  const auto by_time = [](const DetectionEvent& l, const DetectionEvent& r) {
    return l.timestamp_ns < r.timestamp_ns;
  };
  std::stable_sort(s.dealer.begin(), s.dealer.end(), by_time);
  std::stable_sort(s.player.begin(), s.player.end(), by_time);
  return s;
}

void write_event_log(std::ostream& out, std::span<const DetectionEvent> events) {
  std::vector<DetectionEvent> sorted(events.begin(), events.end());
  std::stable_sort(sorted.begin(), sorted.end(), event_order);
  out << kEventLogHeader << '\n';
  for (const auto& e : sorted) {
    out << e.pulse_index << ',' << format_double(e.timestamp_ns) << ',' << e.station.label() << ','
        << to_char(e.basis) << ',' << static_cast<int>(e.bit) << '\n';
  }
}

std::vector<DetectionEvent> read_event_log(std::istream& in) {
  std::vector<DetectionEvent> events;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kEventLogHeader) throw ConfigError(std::string("expected header ") + kEventLogHeader, line_no);
      header = true;
      continue;
    }
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cols.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols.size() != 5) throw ConfigError("expected 5 columns", line_no);
    DetectionEvent e;
    e.pulse_index = parse_number<std::int64_t>(cols[0], line_no);
    e.timestamp_ns = parse_number<double>(cols[1], line_no);
    try {
      e.station = StationId::parse(cols[2]);
      e.basis = parse_basis(cols[3]);
    } catch (const InvalidArgument& ex) {
      throw ConfigError(ex.what(), line_no);
    }
    const int bit = parse_number<int>(cols[4], line_no);
    if (bit != 0 && bit != 1) throw ConfigError("bit must be 0 or 1", line_no);
    e.bit = static_cast<std::uint8_t>(bit);
    events.push_back(e);
  }
  if (!header) throw ConfigError("empty event log");
  return events;
}

EventLog load_event_log(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open event log " + path.string());
  try {
    return EventLog{path.string(), read_event_log(in)};
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void save_event_log(const std::filesystem::path& path, std::span<const DetectionEvent> events) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write event log " + path.string());
  write_event_log(out, events);
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace qss::detection
