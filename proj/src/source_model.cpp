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

#include "qss/source_model.hpp"

#include <array>
#include <cmath>
#include <string>

#include "qss/error.hpp"

namespace qss::source {

PairStatistics parse_pair_statistics(std::string_view name) {
  if (name == "poisson") return PairStatistics::poisson;
  if (name == "single") return PairStatistics::single;
  throw InvalidArgument("unknown pair statistics '" + std::string(name) + "'");
}

std::string_view to_string(PairStatistics s) {
  return s == PairStatistics::poisson ? "poisson" : "single";
}

void SourceParams::validate() const {
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw InvalidArgument("source mu must be >= 0");
  if (statistics == PairStatistics::single && mu > 1.0)
    throw InvalidArgument("single-pair statistics need mu <= 1");
  if (statistics == PairStatistics::poisson && mu > 500.0)
    throw InvalidArgument("source mu out of range");
  if (!(visibility_param >= 0.0 && visibility_param <= 1.0))
    throw InvalidArgument("source visibility parameter p must lie in [0,1]");
  if (!std::isfinite(rotation_theta)) throw InvalidArgument("rotation angle must be finite");
}

void Misalignment::validate() const {
  if (!(x >= 0.0 && x <= 1.0 && z >= 0.0 && z <= 1.0))
    throw InvalidArgument("misalignment probabilities must lie in [0,1]");
}

double werner_weight_from_fidelity(double fidelity) {
  if (!(fidelity >= 0.25 && fidelity <= 1.0))
    throw InvalidArgument("fidelity must lie in [1/4, 1] for a Werner source");
  return (4.0 * fidelity - 1.0) / 3.0;
}

qmath::DensityMatrix effective_state(const SourceParams& params, const Misalignment& misalignment) {
  params.validate();
  misalignment.validate();
  qmath::Matrix rho = qmath::werner_state(params.base_state, params.visibility_param).matrix();

  const qmath::Matrix flip_x = qmath::embed(qmath::LocalGate::pauli_x(1), 2);
  const qmath::Matrix flip_z = qmath::embed(qmath::LocalGate::pauli_z(1), 2);
  rho = (1.0 - misalignment.x) * rho + misalignment.x * flip_x * rho * flip_x;
  rho = (1.0 - misalignment.z) * rho + misalignment.z * flip_z * rho * flip_z;

  const qmath::Matrix rot = qmath::embed(qmath::LocalGate::rotation(0, params.rotation_theta), 2);
  rho = rot * rho * rot.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return qmath::DensityMatrix(std::move(rho));
}

double emission_probability(const SourceParams& params) {
  return params.statistics == PairStatistics::poisson ? -std::expm1(-params.mu) : params.mu;
}

double pair_number_pgf(const SourceParams& params, double s) {
  return params.statistics == PairStatistics::poisson ? std::exp(params.mu * (s - 1.0))
                                                      : 1.0 - params.mu + params.mu * s;
}

std::uint32_t sample_pair_count(const SourceParams& params, Rng& rng) {
  if (params.mu <= 0.0) return 0;
  if (params.statistics == PairStatistics::single) return bernoulli(rng, params.mu) ? 1U : 0U;
  // Inverse CDF; mu is small in every practical configuration.
  const double u = uniform01(rng);
  double term = std::exp(-params.mu);
  double cdf = term;
  std::uint32_t k = 0;
  while (u >= cdf && term > 0.0) {
    ++k;
    term *= params.mu / k;
    cdf += term;
  }
  return k;
}

std::uint32_t sample_nonzero_pair_count(const SourceParams& params, Rng& rng) {
  if (params.statistics == PairStatistics::single) return 1;
  // Zero-truncated Poisson by inverse CDF.
  const double norm = -std::expm1(-params.mu);
  const double u = uniform01(rng) * norm;
  double term = std::exp(-params.mu) * params.mu;
  double cdf = term;
  std::uint32_t k = 1;
  while (u >= cdf && term > 0.0) {
    ++k;
    term *= params.mu / k;
    cdf += term;
  }
  return k;
}

}  // namespace qss::source
