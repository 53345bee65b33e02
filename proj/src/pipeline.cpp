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

#include "qss/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

#include "qss/error.hpp"
#include "qss/estimation.hpp"
#include "qss/rng.hpp"

namespace qss::pipeline {
namespace {

constexpr std::uint64_t kSubsampleStream = 0xffffffULL;

// Runs f(i) for i in [0, n) on up to `threads` workers; rethrows the first failure.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          f(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

unsigned resolve_threads(const Options& options) { return options.threads ? options.threads : worker_count(); }

RunOutput finish(const config::RunConfig& config, postmatch::RoundSet rounds, double n_pulses,
                 const Options& options) {
  if (config.z_sample_fraction < 1.0) {
    auto rng = make_rng(config.seed.value_or(0), kSubsampleStream, 0);
    rounds = estimation::subsample_z(std::move(rounds), config.z_sample_fraction, rng);
  }
  RunOutput out;
  out.estimation = estimation::compute_qbers(rounds);
  estimation::bound_phase_errors(out.estimation, config.security.epsilon_bar);
  out.report = keyrate::finalize_report(keyrate::summarize(out.estimation), config.security, n_pulses,
                                        config.channels);
  if (options.keep_rounds) out.rounds = std::move(rounds);
  return out;
}

}  // namespace

unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("QSS_SIM_THREADS"); env && *env) {
    char* end = nullptr;
    const long cap = std::strtol(env, &end, 10);
    if (end && *end == '\0' && cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

keyrate::KeyReport run_analytic(const config::RunConfig& config) {
  config.validate();
  if (config.n_pulses <= 0) throw ConfigError("n_pulses must be positive");
  return keyrate::analytic_model(config.sources, config.channels, config.security,
                                 static_cast<double>(config.n_pulses), config.misalignment);
}

RunOutput run_montecarlo(const config::RunConfig& config, const Options& options) {
  config.validate();
  if (!config.seed) throw ConfigError("seed is required for montecarlo runs");
  if (config.n_pulses <= 0) throw ConfigError("n_pulses must be positive");
  const std::uint64_t root = *config.seed;
  const std::size_t pairs = config.pairs();
  const auto blocks = static_cast<std::size_t>((config.n_pulses + kBlockPulses - 1) / kBlockPulses);

  std::vector<detection::PairModel> models;
  for (std::size_t j = 0; j < pairs; ++j)
    models.emplace_back(source::effective_state(config.sources[j], config.misalignment));

  std::vector<detection::SessionEvents> parts(pairs * blocks);
  parallel_for(parts.size(), resolve_threads(options), [&](std::size_t task) {
    const std::size_t j = task / blocks, b = task % blocks;
    const std::int64_t first = static_cast<std::int64_t>(b) * kBlockPulses;
    const std::int64_t count = std::min(kBlockPulses, config.n_pulses - first);
    auto rng = make_rng(root, j, b);
    parts[task] = detection::simulate_session(config.sources[j], models[j], config.channels[j],
                                              static_cast<int>(j) + 1, first, count, rng);
  });

  RunOutput kept;
  std::vector<postmatch::SessionStreams> streams(pairs);
  for (std::size_t j = 0; j < pairs; ++j) {
    detection::SessionEvents session;
    for (std::size_t b = 0; b < blocks; ++b) {
      auto& part = parts[j * blocks + b];
      session.dealer.insert(session.dealer.end(), part.dealer.begin(), part.dealer.end());
      session.player.insert(session.player.end(), part.player.begin(), part.player.end());
      part = {};
    }
    const int player_id = static_cast<int>(j) + 1;
    const auto coincidences =
        detection::match_coincidences(session.dealer, session.player, config.channels[j].window_ns, player_id);
    auto s = postmatch::sift(coincidences.matched, player_id);
    s.x = postmatch::frame_correct(std::move(s.x), config.sources[j].base_state);
    s.z = postmatch::frame_correct(std::move(s.z), config.sources[j].base_state);
    streams[j] = std::move(s);
    if (options.keep_events) {
      auto& events = kept.session_events.emplace_back(std::move(session.dealer));
      events.insert(events.end(), session.player.begin(), session.player.end());
    }
  }

  auto out = finish(config, postmatch::build_rounds(streams, config.n_players),
                    static_cast<double>(config.n_pulses), options);
  out.session_events = std::move(kept.session_events);
  return out;
}

RunOutput run_analyze(const config::RunConfig& config, std::span<const detection::EventLog> logs,
                      const Options& options) {
  config.validate();
  if (logs.size() != config.pairs())
    throw ConfigError(std::to_string(config.n_players) + " participants need " + std::to_string(config.pairs()) +
                      " session logs, got " + std::to_string(logs.size()));
  double n_pulses = static_cast<double>(config.n_pulses);
  if (n_pulses <= 0) {
    std::int64_t last = -1;
    for (const auto& log : logs)
      for (const auto& e : log.events) last = std::max(last, e.pulse_index);
    if (last < 0) throw ConfigError("cannot infer n_pulses from empty logs; set n_pulses");
    n_pulses = static_cast<double>(last + 1);
  }
  std::vector<qmath::BellKind> states;
  for (const auto& s : config.sources) states.push_back(s.base_state);
  auto rounds = postmatch::dataset_postmatch(logs, config.n_players, config.channels.front().window_ns, states);
  return finish(config, std::move(rounds), n_pulses, options);
}

std::vector<ReportRow> run_sweep(const config::RunConfig& config, const Options& options) {
  config.validate();
  if (!config.sweep.enabled()) throw ConfigError("sweep.param is required for a sweep");
  if (config.mode == config::Mode::analyze) throw ConfigError("sweeps support analytic and montecarlo modes only");

  const std::size_t n = config.sweep.rows();
  std::vector<config::RunConfig> points;
  for (std::size_t i = 0; i < n; ++i)
    points.push_back(config::with_sweep_value(config, config.sweep.param, config.sweep.value(i)));

  std::vector<ReportRow> rows(n);
  const auto fill = [&](std::size_t i, keyrate::KeyReport report) {
    rows[i] = {std::move(report), config.n_players, config.seed, config.sweep.param, config.sweep.value(i)};
  };
  if (config.mode == config::Mode::analytic) {
    parallel_for(n, resolve_threads(options), [&](std::size_t i) { fill(i, run_analytic(points[i])); });
  } else {
    for (std::size_t i = 0; i < n; ++i) fill(i, run_montecarlo(points[i], options).report);
  }
  return rows;
}

}  // namespace qss::pipeline
