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

// Two-qubit polarization toolbox: Bell states, local gates, measurement
// statistics, fidelity, visibility and linear-inversion tomography.
//
// Conventions: qubit 0 is the signal (dealer-side) photon and is the most
// significant bit of a basis index, so |HV> is index 1. H, D and R map to bit 0;
// V, A and L map to bit 1. R = (H - iV)/sqrt(2).

#include <array>
#include <complex>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace qss::qmath {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;

inline constexpr double kPureTolerance = 1e-12;
inline constexpr double kMatrixTolerance = 1e-9;

enum class BellKind { psi_minus, psi_plus, phi_minus, phi_plus };

enum class Basis { rectilinear, diagonal, circular };

BellKind parse_bell_kind(std::string_view name);
std::string_view to_string(BellKind kind);
Basis parse_basis(std::string_view name);

class StateVector {
 public:
  // Throws InvalidArgument unless the size is a power of two and the norm is 1.
  explicit StateVector(Vector amplitudes);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(amplitudes_.size()); }
  std::size_t qubits() const noexcept;
  const Vector& amplitudes() const noexcept { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

  // |<this|other>|; equals 1 for states equal up to global phase.
  double overlap_magnitude(const StateVector& other) const;

 private:
  Vector amplitudes_;
};

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace and positivity (min eigenvalue >= -1e-9).
  explicit DensityMatrix(Matrix entries);

  static DensityMatrix pure(const StateVector& state);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  std::size_t qubits() const noexcept;
  const Matrix& matrix() const noexcept { return entries_; }
  Complex operator()(std::size_t r, std::size_t c) const {
    return entries_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }
  double purity() const;

 private:
  Matrix entries_;
};

struct LocalGate {
  std::size_t qubit = 0;
  Matrix2 unitary = Matrix2::Identity();

  static LocalGate identity(std::size_t qubit);
  static LocalGate pauli_x(std::size_t qubit);
  static LocalGate pauli_z(std::size_t qubit);
  static LocalGate hadamard(std::size_t qubit);
  // Real rotation of the linear polarization by theta (H -> cos H + sin V).
  static LocalGate rotation(std::size_t qubit, double theta);
  // Half-wave plate with its fast axis at angle (rotates linear polarization by 2*angle).
  static LocalGate half_wave_plate(std::size_t qubit, double fast_axis);
};

StateVector bell_state(BellKind kind);
DensityMatrix werner_state(BellKind kind, double weight);

// Full operator of a single-qubit gate acting on an n-qubit register.
Matrix embed(const LocalGate& gate, std::size_t qubits);

// Applies gates in sequence order (the first element acts first).
StateVector apply_local(const StateVector& state, std::span<const LocalGate> gates);
DensityMatrix apply_local(const DensityMatrix& state, std::span<const LocalGate> gates);

// Probability of every outcome bit tuple; index bit (n-1-q) holds qubit q.
class OutcomeTable {
 public:
  explicit OutcomeTable(std::vector<double> probabilities) : probabilities_(std::move(probabilities)) {}
  std::size_t size() const noexcept { return probabilities_.size(); }
  double operator[](std::size_t index) const { return probabilities_.at(index); }
  double sum() const;
  const std::vector<double>& probabilities() const noexcept { return probabilities_; }

 private:
  std::vector<double> probabilities_;
};

// Single-qubit projector onto the bit-th eigenstate of the basis.
Vector basis_state(Basis basis, int bit);

OutcomeTable outcome_distribution(const DensityMatrix& state, std::span<const Basis> basis_per_qubit);

// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);

// (n_max - n_min) / (n_max + n_min).
double visibility(double n_max, double n_min);

// Expected coincidence fringe: the idler analyzer is a linear polarizer at
// idler_angle, the signal analyzer sweeps over signal_angles (polarization
// angles, radians). Returns probabilities scaled by total.
std::vector<double> polarization_fringe(const DensityMatrix& state, double idler_angle,
                                        std::span<const double> signal_angles, double total = 1.0);

// --- tomography ------------------------------------------------------------

enum class Projector { H = 0, V = 1, D = 2, R = 3 };

Projector parse_projector(std::string_view name);
Vector projector_state(Projector p);

// Coincidence counts indexed [signal * 4 + idler] over {H, V, D, R}.
using TomographyCounts = std::array<double, 16>;

// Noiseless counts total * tr(rho P_s (x) P_i).
TomographyCounts expected_counts(const DensityMatrix& rho, double total);

// Linear inversion over the 16 projector pairs, then eigenvalue clipping and
// trace renormalization.
DensityMatrix tomographic_reconstruction(const TomographyCounts& counts);

// Reads `projector_signal,projector_idler,count` rows (header required).
TomographyCounts read_tomography_csv(std::istream& in);

}  // namespace qss::qmath
