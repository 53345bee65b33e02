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

#include "qss/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "qss/error.hpp"
#include "qss/postmatch.hpp"

namespace qss::config {
namespace {

constexpr std::string_view kSweepParams[] = {"loss_db", "p_x", "mu", "n_pulses", "e_d", "rotation_theta_deg"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string format(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_list(const std::array<double, detection::kChannelsPerStation>& values) {
  if (values[1] == values[0] && values[2] == values[0] && values[3] == values[0]) return format(values[0]);
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? " " : "") + format(values[i]);
  return out;
}

// Parses one assignment; `line` is only used for diagnostics.
class Applier {
 public:
  Applier(RunConfig& config, std::string_view key, std::string_view value, int line)
      : c_(config), key_(key), value_(value), line_(line) {}

  void apply() {
    const auto dot = key_.find('.');
    if (dot == std::string_view::npos) return apply_global();
    const auto prefix = key_.substr(0, dot);
    const auto rest = key_.substr(dot + 1);
    if (prefix.starts_with("source")) return for_pairs(prefix.substr(6), [&](std::size_t j) { apply_source(j, rest); });
    if (prefix.starts_with("channel"))
      return for_pairs(prefix.substr(7), [&](std::size_t j) { apply_channel(j, rest); });
    if (prefix == "misalignment") return apply_misalignment(rest);
    if (prefix == "security") return apply_security(rest);
    if (prefix == "estimation" && rest == "z_sample_fraction") return void(c_.z_sample_fraction = number());
    if (prefix == "sweep") return apply_sweep(rest);
    if (prefix == "analyze" && rest == "logs") return void(c_.analyze_logs = list());
    if (prefix == "tomography" && rest == "counts") return void(c_.tomography_counts = std::string(value_));
    if (prefix == "tomography" && rest == "reference") return void(c_.tomography_reference = bell_kind());
    if (prefix == "output" && rest == "dir") return void(c_.output_dir = std::string(value_));
    unknown();
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("'" + std::string(key_) + "': " + what, line_);
  }
  [[noreturn]] void unknown() const { fail("unknown key"); }

  double number() const {
    double v = 0.0;
    const auto* end = value_.data() + value_.size();
    const auto res = std::from_chars(value_.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) fail("expected a number, got '" + std::string(value_) + "'");
    return v;
  }

  std::int64_t integer() const {
    const double v = number();
    if (v != std::floor(v) || std::fabs(v) > 9.0e15) fail("expected an integer, got '" + std::string(value_) + "'");
    return static_cast<std::int64_t>(v);
  }

  std::uint64_t unsigned_integer() const {
    std::uint64_t v = 0;
    const auto* end = value_.data() + value_.size();
    const auto res = std::from_chars(value_.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) fail("expected an unsigned integer, got '" + std::string(value_) + "'");
    return v;
  }

  std::array<double, detection::kChannelsPerStation> per_channel() const {
    std::vector<double> values;
    std::string text(value_);
    for (char& ch : text)
      if (ch == ',') ch = ' ';
    std::istringstream in(text);
    std::string token;
    while (in >> token) values.push_back(Applier(c_, key_, token, line_).number());
    if (values.size() == 1) values.assign(detection::kChannelsPerStation, values[0]);
    if (values.size() != detection::kChannelsPerStation) fail("expected 1 or 4 values");
    return {values[0], values[1], values[2], values[3]};
  }

  std::vector<std::string> list() const {
    std::vector<std::string> items;
    std::string_view rest = value_;
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      if (item.empty()) fail("empty list entry");
      items.emplace_back(item);
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return items;
  }

  qmath::BellKind bell_kind() const {
    try {
      return qmath::parse_bell_kind(value_);
    } catch (const Error& e) {
      fail(e.what());
    }
  }

  template <class F>
  void for_pairs(std::string_view index, F&& f) {
    if (index.empty()) {
      for (std::size_t j = 0; j < c_.pairs(); ++j) f(j);
      return;
    }
    std::size_t j = 0;
    const auto res = std::from_chars(index.data(), index.data() + index.size(), j);
    if (res.ec != std::errc{} || res.ptr != index.data() + index.size()) unknown();
    if (j < 1 || j > c_.pairs())
      fail("pair index out of range for n_players = " + std::to_string(c_.n_players));
    f(j - 1);
  }

  void apply_global() {
    if (key_ == "mode") {
      try {
        c_.mode = parse_mode(value_);
      } catch (const Error& e) {
        fail(e.what());
      }
    } else if (key_ == "n_players") {
      const auto n = integer();
      if (n < 3 || n > postmatch::kMaxPlayers + 1) fail("must lie in [3, 65]");
      c_.n_players = static_cast<int>(n);
      const auto source = c_.sources.front();
      const auto channel = c_.channels.front();
      c_.sources.resize(c_.pairs(), source);
      c_.channels.resize(c_.pairs(), channel);
    } else if (key_ == "n_pulses") {
      const auto n = integer();
      if (n < 0) fail("must be >= 0");
      c_.n_pulses = n;
    } else if (key_ == "seed") {
      c_.seed = unsigned_integer();
    } else if (key_ == "p_x" || key_ == "rep_rate_hz" || key_ == "window_ns") {
      for (std::size_t j = 0; j < c_.pairs(); ++j) apply_channel(j, key_);
    } else {
      unknown();
    }
  }

  void apply_source(std::size_t j, std::string_view field) {
    auto& s = c_.sources[j];
    if (field == "mu") {
      s.mu = number();
    } else if (field == "p") {
      s.visibility_param = number();
    } else if (field == "fidelity") {
      try {
        s.visibility_param = source::werner_weight_from_fidelity(number());
      } catch (const InvalidArgument& e) {
        fail(e.what());
      }
    } else if (field == "rotation_theta") {
      s.rotation_theta = number();
    } else if (field == "rotation_theta_deg") {
      s.rotation_theta = number() * std::numbers::pi / 180.0;
    } else if (field == "base_state") {
      s.base_state = bell_kind();
    } else if (field == "pair_statistics") {
      try {
        s.statistics = source::parse_pair_statistics(value_);
      } catch (const Error& e) {
        fail(e.what());
      }
    } else {
      unknown();
    }
  }

  void apply_channel(std::size_t j, std::string_view field) {
    auto& ch = c_.channels[j];
    if (field == "loss_db") {
      ch.loss_db_dealer = ch.loss_db_player = number();
    } else if (field == "loss_db_dealer") {
      ch.loss_db_dealer = number();
    } else if (field == "loss_db_player") {
      ch.loss_db_player = number();
    } else if (field == "eta_d") {
      ch.dealer.efficiency = ch.player.efficiency = per_channel();
    } else if (field == "p_d") {
      ch.dealer.dark_probability = ch.player.dark_probability = per_channel();
    } else if (field == "dealer.eta_d") {
      ch.dealer.efficiency = per_channel();
    } else if (field == "dealer.p_d") {
      ch.dealer.dark_probability = per_channel();
    } else if (field == "player.eta_d") {
      ch.player.efficiency = per_channel();
    } else if (field == "player.p_d") {
      ch.player.dark_probability = per_channel();
    } else if (field == "p_x") {
      ch.p_x = number();
    } else if (field == "rep_rate_hz") {
      ch.rep_rate_hz = number();
    } else if (field == "window_ns") {
      ch.window_ns = number();
    } else {
      unknown();
    }
  }

  void apply_misalignment(std::string_view field) {
    if (field == "e_d") {
      c_.misalignment.x = c_.misalignment.z = number();
    } else if (field == "e_d_x") {
      c_.misalignment.x = number();
    } else if (field == "e_d_z") {
      c_.misalignment.z = number();
    } else {
      unknown();
    }
  }

  void apply_security(std::string_view field) {
    auto& s = c_.security;
    if (field == "epsilon_c") s.epsilon_c = number();
    else if (field == "epsilon_prime") s.epsilon_prime = number();
    else if (field == "epsilon_bar") s.epsilon_bar = number();
    else if (field == "f_e") s.f_e = number();
    else if (field == "q") s.q = number();
    else unknown();
  }

  void apply_sweep(std::string_view field) {
    auto& s = c_.sweep;
    if (field == "param") {
      if (!is_sweep_param(value_)) fail("unsupported sweep parameter '" + std::string(value_) + "'");
      s.param = std::string(value_);
    } else if (field == "start") {
      s.start = number();
    } else if (field == "stop") {
      s.stop = number();
    } else if (field == "step") {
      s.step = number();
    } else {
      unknown();
    }
  }

  RunConfig& c_;
  std::string_view key_;
  std::string_view value_;
  int line_;
};

struct Entry {
  std::string key;
  std::string value;
  int line = 0;
  bool indexed = false;
};

bool is_indexed(std::string_view key) {
  for (std::string_view prefix : {"source", "channel"}) {
    if (key.starts_with(prefix) && key.size() > prefix.size() &&
        std::isdigit(static_cast<unsigned char>(key[prefix.size()])))
      return true;
  }
  return false;
}

bool same_source(const source::SourceParams& a, const source::SourceParams& b) {
  return a.mu == b.mu && a.visibility_param == b.visibility_param && a.rotation_theta == b.rotation_theta &&
         a.base_state == b.base_state && a.statistics == b.statistics;
}

}  // namespace

Mode parse_mode(std::string_view name) {
  if (name == "analytic") return Mode::analytic;
  if (name == "montecarlo") return Mode::montecarlo;
  if (name == "analyze") return Mode::analyze;
  throw ConfigError("unknown mode '" + std::string(name) + "'");
}

std::string_view to_string(Mode mode) {
  switch (mode) {
    case Mode::analytic: return "analytic";
    case Mode::montecarlo: return "montecarlo";
    case Mode::analyze: return "analyze";
  }
  return "analytic";
}

bool is_sweep_param(std::string_view name) {
  for (auto p : kSweepParams)
    if (p == name) return true;
  return false;
}

std::size_t SweepSpec::rows() const {
  if (!enabled()) return 0;
  return static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
}

void SweepSpec::validate() const {
  if (!enabled()) return;
  if (!is_sweep_param(param)) throw ConfigError("sweep.param: unsupported parameter '" + param + "'");
  if (!(step > 0.0)) throw ConfigError("sweep.step must be positive");
  if (!(stop >= start)) throw ConfigError("sweep range is empty (stop < start)");
}

void RunConfig::validate() const {
  if (n_players < 3 || n_players > postmatch::kMaxPlayers + 1) throw ConfigError("n_players must lie in [3, 65]");
  if (sources.size() != pairs() || channels.size() != pairs())
    throw ConfigError("expected one source and one channel per player");
  try {
    for (const auto& s : sources) s.validate();
    for (const auto& ch : channels) ch.validate();
    misalignment.validate();
    security.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  if (!(z_sample_fraction > 0.0 && z_sample_fraction <= 1.0))
    throw ConfigError("estimation.z_sample_fraction must lie in (0,1]");
  sweep.validate();
}

bool RunConfig::operator==(const RunConfig& o) const {
  if (sources.size() != o.sources.size()) return false;
  for (std::size_t j = 0; j < sources.size(); ++j)
    if (!same_source(sources[j], o.sources[j])) return false;
  return mode == o.mode && n_players == o.n_players && n_pulses == o.n_pulses && seed == o.seed &&
         channels == o.channels && security == o.security && misalignment.x == o.misalignment.x &&
         misalignment.z == o.misalignment.z && z_sample_fraction == o.z_sample_fraction && sweep == o.sweep &&
         analyze_logs == o.analyze_logs && tomography_counts == o.tomography_counts &&
         tomography_reference == o.tomography_reference && output_dir == o.output_dir;
}

RunConfig parse_config(std::string_view text) {
  std::vector<Entry> entries;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line_no);
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", line_no);
    if (value.empty()) throw ConfigError("'" + std::string(key) + "': missing value", line_no);
    entries.push_back({std::string(key), std::string(value), line_no, is_indexed(key)});
  }

  RunConfig config;
  for (const auto& e : entries)
    if (e.key == "n_players") Applier(config, e.key, e.value, e.line).apply();
  for (const auto& e : entries)
    if (!e.indexed && e.key != "n_players") Applier(config, e.key, e.value, e.line).apply();
  for (const auto& e : entries)
    if (e.indexed) Applier(config, e.key, e.value, e.line).apply();
  config.validate();
  return config;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  if (in.bad()) throw IoError("failed reading config file '" + path.string() + "'");
  return parse_config(text.str());
}

std::string serialize(const RunConfig& c) {
  std::ostringstream out;
  const auto kv = [&out](std::string_view key, const std::string& value) { out << key << " = " << value << '\n'; };
  kv("mode", std::string(to_string(c.mode)));
  kv("n_players", std::to_string(c.n_players));
  kv("n_pulses", std::to_string(c.n_pulses));
  if (c.seed) kv("seed", std::to_string(*c.seed));
  kv("misalignment.e_d_x", format(c.misalignment.x));
  kv("misalignment.e_d_z", format(c.misalignment.z));
  kv("security.epsilon_c", format(c.security.epsilon_c));
  kv("security.epsilon_prime", format(c.security.epsilon_prime));
  kv("security.epsilon_bar", format(c.security.epsilon_bar));
  kv("security.f_e", format(c.security.f_e));
  kv("security.q", format(c.security.q));
  kv("estimation.z_sample_fraction", format(c.z_sample_fraction));
  if (c.sweep.enabled()) {
    kv("sweep.param", c.sweep.param);
    kv("sweep.start", format(c.sweep.start));
    kv("sweep.stop", format(c.sweep.stop));
    kv("sweep.step", format(c.sweep.step));
  }
  if (!c.analyze_logs.empty()) {
    std::string logs;
    for (std::size_t i = 0; i < c.analyze_logs.size(); ++i) logs += (i ? ", " : "") + c.analyze_logs[i];
    kv("analyze.logs", logs);
  }
  if (!c.tomography_counts.empty()) kv("tomography.counts", c.tomography_counts);
  kv("tomography.reference", std::string(qmath::to_string(c.tomography_reference)));
  kv("output.dir", c.output_dir);
  for (std::size_t j = 0; j < c.pairs(); ++j) {
    const auto& s = c.sources[j];
    const std::string src = "source" + std::to_string(j + 1) + ".";
    kv(src + "mu", format(s.mu));
    kv(src + "p", format(s.visibility_param));
    kv(src + "rotation_theta", format(s.rotation_theta));
    kv(src + "base_state", std::string(qmath::to_string(s.base_state)));
    kv(src + "pair_statistics", std::string(source::to_string(s.statistics)));
  }
  for (std::size_t j = 0; j < c.pairs(); ++j) {
    const auto& ch = c.channels[j];
    const std::string pre = "channel" + std::to_string(j + 1) + ".";
    kv(pre + "loss_db_dealer", format(ch.loss_db_dealer));
    kv(pre + "loss_db_player", format(ch.loss_db_player));
    kv(pre + "dealer.eta_d", format_list(ch.dealer.efficiency));
    kv(pre + "dealer.p_d", format_list(ch.dealer.dark_probability));
    kv(pre + "player.eta_d", format_list(ch.player.efficiency));
    kv(pre + "player.p_d", format_list(ch.player.dark_probability));
    kv(pre + "p_x", format(ch.p_x));
    kv(pre + "rep_rate_hz", format(ch.rep_rate_hz));
    kv(pre + "window_ns", format(ch.window_ns));
  }
  return out.str();
}

void set_value(RunConfig& config, std::string_view key, std::string_view value) {
  RunConfig updated = config;
  Applier(updated, trim(key), trim(value), 0).apply();
  updated.validate();
  config = std::move(updated);
}

RunConfig with_sweep_value(const RunConfig& config, std::string_view param, double value) {
  RunConfig c = config;
  if (param == "loss_db") {
    for (auto& ch : c.channels) ch.loss_db_dealer = ch.loss_db_player = value;
  } else if (param == "p_x") {
    for (auto& ch : c.channels) ch.p_x = value;
  } else if (param == "mu") {
    for (auto& s : c.sources) s.mu = value;
  } else if (param == "n_pulses") {
    c.n_pulses = static_cast<std::int64_t>(std::llround(value));
  } else if (param == "e_d") {
    c.misalignment = source::Misalignment::symmetric(value);
  } else if (param == "rotation_theta_deg") {
    for (auto& s : c.sources) s.rotation_theta = value * std::numbers::pi / 180.0;
  } else {
    throw ConfigError("unsupported sweep parameter '" + std::string(param) + "'");
  }
  c.validate();
  return c;
}

}  // namespace qss::config
