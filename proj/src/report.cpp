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

#include "qss/report.hpp"

#include <charconv>
#include <ostream>

namespace qss::report {

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_report_csv(std::ostream& out, std::span<const pipeline::ReportRow> rows) {
  out << kReportHeader << '\n';
  for (const auto& row : rows) {
    const auto& r = row.report;
    out << format_number(r.loss_db) << ',' << format_number(r.p_x) << ',' << format_number(r.n_pulses) << ','
        << format_number(r.estimation.n_x) << ',' << format_number(r.estimation.e_x_total) << ','
        << format_number(r.estimation.max_phi_bar()) << ',' << r.l_bits() << ','
        << format_number(r.rate_per_pulse) << ',' << format_number(r.rate_bps) << ','
        << (r.aborted() ? 1 : 0) << ',' << row.n_players << ',' << (row.seed ? std::to_string(*row.seed) : "")
        << ',' << row.sweep_param << ',' << format_number(row.sweep_value) << '\n';
  }
}

}  // namespace qss::report
