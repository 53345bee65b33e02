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

#include <iosfwd>
#include <span>

#include "qss/pipeline.hpp"

namespace qss::report {

inline constexpr const char* kReportHeader =
    "loss_db,p_x,N,n_x,E_X,max_phi_bar,l_bits,rate_per_pulse,rate_bps,aborted,n_players,seed,sweep_param,"
    "sweep_value";

void write_report_csv(std::ostream& out, std::span<const pipeline::ReportRow> rows);

std::string format_number(double v);

}  // namespace qss::report
