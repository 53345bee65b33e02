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

#include "qss/qmath.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "qss/error.hpp"

namespace qss::qmath {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t log2_exact(std::size_t n) {
  std::size_t q = 0;
  while ((std::size_t{1} << q) < n) ++q;
  return q;
}

std::string trim(std::string s) {
  const auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

// Hermitian square root with negative eigenvalues clipped to zero.
Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

BellKind parse_bell_kind(std::string_view name) {
  if (name == "psi_minus") return BellKind::psi_minus;
  if (name == "psi_plus") return BellKind::psi_plus;
  if (name == "phi_minus") return BellKind::phi_minus;
  if (name == "phi_plus") return BellKind::phi_plus;
  throw InvalidArgument("unknown bell state '" + std::string(name) + "'");
}

std::string_view to_string(BellKind kind) {
  switch (kind) {
    case BellKind::psi_minus: return "psi_minus";
    case BellKind::psi_plus: return "psi_plus";
    case BellKind::phi_minus: return "phi_minus";
    case BellKind::phi_plus: return "phi_plus";
  }
  return "?";
}

Basis parse_basis(std::string_view name) {
  if (name == "rectilinear") return Basis::rectilinear;
  if (name == "diagonal") return Basis::diagonal;
  if (name == "circular") return Basis::circular;
  throw InvalidArgument("invalid basis tag '" + std::string(name) + "'");
}

// --- StateVector -----------------------------------------------------------

StateVector::StateVector(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
  if (!is_power_of_two(dim())) throw InvalidArgument("state dimension must be a power of 2");
  if (std::abs(amplitudes_.squaredNorm() - 1.0) > kPureTolerance)
    throw InvalidArgument("state vector is not normalized");
}

std::size_t StateVector::qubits() const noexcept { return log2_exact(dim()); }

double StateVector::overlap_magnitude(const StateVector& other) const {
  if (other.dim() != dim()) throw InvalidArgument("dimension mismatch");
  return std::abs(amplitudes_.dot(other.amplitudes_));
}

// --- DensityMatrix ---------------------------------------------------------

DensityMatrix::DensityMatrix(Matrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || !is_power_of_two(dim()))
    throw InvalidArgument("density matrix must be square with power-of-2 dimension");
  if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidArgument("density matrix is not Hermitian");
  if (std::abs(entries_.trace() - Complex(1.0)) > 1e-10)
    throw InvalidArgument("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kMatrixTolerance)
    throw InvalidArgument("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const StateVector& state) {
  return DensityMatrix(state.amplitudes() * state.amplitudes().adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(Matrix::Identity(n, n) / static_cast<double>(dim));
}

std::size_t DensityMatrix::qubits() const noexcept { return log2_exact(dim()); }

double DensityMatrix::purity() const { return (entries_ * entries_).trace().real(); }

// --- gates -----------------------------------------------------------------

LocalGate LocalGate::identity(std::size_t qubit) { return {qubit, Matrix2::Identity()}; }

LocalGate LocalGate::pauli_x(std::size_t qubit) {
  Matrix2 u;
  u << 0, 1, 1, 0;
  return {qubit, u};
}

LocalGate LocalGate::pauli_z(std::size_t qubit) {
  Matrix2 u;
  u << 1, 0, 0, -1;
  return {qubit, u};
}

LocalGate LocalGate::hadamard(std::size_t qubit) {
  Matrix2 u;
  u << kInvSqrt2, kInvSqrt2, kInvSqrt2, -kInvSqrt2;
  return {qubit, u};
}

LocalGate LocalGate::rotation(std::size_t qubit, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Matrix2 u;
  u << c, -s, s, c;
  return {qubit, u};
}

LocalGate LocalGate::half_wave_plate(std::size_t qubit, double fast_axis) {
  const double c = std::cos(2 * fast_axis), s = std::sin(2 * fast_axis);
  Matrix2 u;
  u << c, s, s, -c;
  return {qubit, u};
}

StateVector bell_state(BellKind kind) {
  Vector v = Vector::Zero(4);
  switch (kind) {
    case BellKind::psi_minus: v(1) = kInvSqrt2; v(2) = -kInvSqrt2; break;
    case BellKind::psi_plus: v(1) = kInvSqrt2; v(2) = kInvSqrt2; break;
    case BellKind::phi_minus: v(0) = kInvSqrt2; v(3) = -kInvSqrt2; break;
    case BellKind::phi_plus: v(0) = kInvSqrt2; v(3) = kInvSqrt2; break;
  }
  return StateVector(std::move(v));
}

DensityMatrix werner_state(BellKind kind, double weight) {
  if (!(weight >= 0.0 && weight <= 1.0)) throw InvalidArgument("Werner weight must lie in [0,1]");
  const Matrix bell = DensityMatrix::pure(bell_state(kind)).matrix();
  return DensityMatrix(weight * bell + (1.0 - weight) * Matrix::Identity(4, 4) / 4.0);
}

Matrix embed(const LocalGate& gate, std::size_t qubits) {
  if (gate.qubit >= qubits) throw InvalidArgument("gate qubit index out of range");
  Matrix op = Matrix::Identity(1, 1);
  for (std::size_t q = 0; q < qubits; ++q) {
    const Matrix factor = q == gate.qubit ? Matrix(gate.unitary) : Matrix(Matrix::Identity(2, 2));
    Matrix next(op.rows() * 2, op.cols() * 2);
    for (Eigen::Index r = 0; r < op.rows(); ++r)
      for (Eigen::Index c = 0; c < op.cols(); ++c)
        next.block(2 * r, 2 * c, 2, 2) = op(r, c) * factor;
    op = std::move(next);
  }
  return op;
}

StateVector apply_local(const StateVector& state, std::span<const LocalGate> gates) {
  Vector v = state.amplitudes();
  for (const auto& g : gates) v = embed(g, state.qubits()) * v;
  // Renormalize away the last ulp so the StateVector invariant re-checks cleanly.
  v /= v.norm();
  return StateVector(std::move(v));
}

DensityMatrix apply_local(const DensityMatrix& state, std::span<const LocalGate> gates) {
  Matrix m = state.matrix();
  for (const auto& g : gates) {
    const Matrix u = embed(g, state.qubits());
    m = u * m * u.adjoint();
  }
  m = 0.5 * (m + m.adjoint()).eval();
  return DensityMatrix(std::move(m));
}

// --- measurement -----------------------------------------------------------

double OutcomeTable::sum() const {
  double s = 0.0;
  for (double p : probabilities_) s += p;
  return s;
}

Vector basis_state(Basis basis, int bit) {
  if (bit != 0 && bit != 1) throw InvalidArgument("outcome bit must be 0 or 1");
  Vector v(2);
  const double sign = bit == 0 ? 1.0 : -1.0;
  switch (basis) {
    case Basis::rectilinear: v << (bit == 0 ? 1.0 : 0.0), (bit == 0 ? 0.0 : 1.0); break;
    case Basis::diagonal: v << kInvSqrt2, sign * kInvSqrt2; break;
    case Basis::circular: v << kInvSqrt2, Complex(0.0, -sign * kInvSqrt2); break;
  }
  return v;
}

OutcomeTable outcome_distribution(const DensityMatrix& state, std::span<const Basis> basis_per_qubit) {
  const std::size_t n = state.qubits();
  if (basis_per_qubit.size() != n) throw InvalidArgument("one basis per qubit required");
  const std::size_t outcomes = std::size_t{1} << n;
  std::vector<double> probs(outcomes);
  for (std::size_t idx = 0; idx < outcomes; ++idx) {
    Vector proj = Vector::Ones(1);
    for (std::size_t q = 0; q < n; ++q) {
      const int bit = static_cast<int>((idx >> (n - 1 - q)) & 1U);
      const Vector b = basis_state(basis_per_qubit[q], bit);
      Vector next(proj.size() * 2);
      for (Eigen::Index i = 0; i < proj.size(); ++i) next.segment(2 * i, 2) = proj(i) * b;
      proj = std::move(next);
    }
    probs[idx] = std::max(0.0, (proj.adjoint() * state.matrix() * proj)(0, 0).real());
  }
  return OutcomeTable(std::move(probs));
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (rho.dim() != sigma.dim()) throw InvalidArgument("fidelity: dimension mismatch");
  const Matrix sr = psd_sqrt(rho.matrix());
  Matrix inner = sr * sigma.matrix() * sr;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(inner, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd& ev = es.eigenvalues();
  // Rounding noise on a rank-deficient product would contribute sqrt(1e-16) ~ 1e-8.
  const double cutoff = static_cast<double>(rho.dim()) * 1e-14 * std::max(ev.maxCoeff(), 0.0);
  double tr = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) > cutoff) tr += std::sqrt(ev(i));
  return std::clamp(tr * tr, 0.0, 1.0);
}

double visibility(double n_max, double n_min) {
  if (n_min < 0 || n_max < n_min) throw InvalidArgument("visibility requires n_max >= n_min >= 0");
  if (n_max <= 0) throw InvalidArgument("visibility undefined for zero counts");
  return (n_max - n_min) / (n_max + n_min);
}

std::vector<double> polarization_fringe(const DensityMatrix& state, double idler_angle,
                                        std::span<const double> signal_angles, double total) {
  if (state.dim() != 4) throw InvalidArgument("fringe requires a two-qubit state");
  const auto polarizer = [](double angle) {
    Vector v(2);
    v << std::cos(angle), std::sin(angle);
    return v;
  };
  const Vector idler = polarizer(idler_angle);
  std::vector<double> out;
  out.reserve(signal_angles.size());
  for (double a : signal_angles) {
    const Vector s = polarizer(a);
    Vector joint(4);
    joint << s(0) * idler(0), s(0) * idler(1), s(1) * idler(0), s(1) * idler(1);
    out.push_back(total * std::max(0.0, (joint.adjoint() * state.matrix() * joint)(0, 0).real()));
  }
  return out;
}

// --- tomography ------------------------------------------------------------

Projector parse_projector(std::string_view name) {
  if (name == "H") return Projector::H;
  if (name == "V") return Projector::V;
  if (name == "D") return Projector::D;
  if (name == "R") return Projector::R;
  throw InvalidArgument("unknown projector '" + std::string(name) + "'");
}

Vector projector_state(Projector p) {
  switch (p) {
    case Projector::H: return basis_state(Basis::rectilinear, 0);
    case Projector::V: return basis_state(Basis::rectilinear, 1);
    case Projector::D: return basis_state(Basis::diagonal, 0);
    case Projector::R: return basis_state(Basis::circular, 0);
  }
  throw InvalidArgument("bad projector");
}

TomographyCounts expected_counts(const DensityMatrix& rho, double total) {
  if (rho.dim() != 4) throw InvalidArgument("tomography requires a two-qubit state");
  TomographyCounts counts{};
  for (int s = 0; s < 4; ++s) {
    for (int i = 0; i < 4; ++i) {
      const Vector a = projector_state(static_cast<Projector>(s));
      const Vector b = projector_state(static_cast<Projector>(i));
      Vector joint(4);
      joint << a(0) * b(0), a(0) * b(1), a(1) * b(0), a(1) * b(1);
      counts[static_cast<std::size_t>(s * 4 + i)] =
          total * std::max(0.0, (joint.adjoint() * rho.matrix() * joint)(0, 0).real());
    }
  }
  return counts;
}

DensityMatrix tomographic_reconstruction(const TomographyCounts& counts) {
  double total = 0.0;
  for (double c : counts) {
    if (!(c >= 0.0)) throw InvalidArgument("tomography counts must be non-negative");
    total += c;
  }
  if (total <= 0.0) throw InvalidArgument("tomography counts are all zero");

  // Pauli basis (I, X, Y, Z). Row p of `bloch` is tr(sigma_a |p><p|), so
  // n[s][i] = (scale/4) sum_ab bloch[s][a] bloch[i][b] S[a][b] with S = tr(rho sigma_a (x) sigma_b).
  std::array<Matrix2, 4> pauli;
  pauli[0] = Matrix2::Identity();
  pauli[1] << 0, 1, 1, 0;
  pauli[2] << 0, Complex(0, -1), Complex(0, 1), 0;
  pauli[3] << 1, 0, 0, -1;
  Eigen::Matrix4d bloch;
  for (int p = 0; p < 4; ++p) {
    const Vector v = projector_state(static_cast<Projector>(p));
    for (int a = 0; a < 4; ++a) bloch(p, a) = (v.adjoint() * pauli[a] * v)(0, 0).real();
  }
  Eigen::Matrix4d n;
  for (int s = 0; s < 4; ++s)
    for (int i = 0; i < 4; ++i) n(s, i) = counts[static_cast<std::size_t>(s * 4 + i)];
  const Eigen::Matrix4d inv = bloch.inverse();
  const Eigen::Matrix4d stokes = inv * n * inv.transpose();  // (scale/4) * S

  Matrix rho = Matrix::Zero(4, 4);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      Matrix kron(4, 4);
      for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c) kron.block(2 * r, 2 * c, 2, 2) = pauli[a](r, c) * pauli[b];
      rho += stokes(a, b) * kron;
    }
  }
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw InvalidArgument("tomography counts give a non-positive trace");
  rho /= tr;

  Eigen::SelfAdjointEigenSolver<Matrix> es(rho);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  ev /= ev.sum();
  Matrix clipped = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
  clipped = 0.5 * (clipped + clipped.adjoint()).eval();
  return DensityMatrix(std::move(clipped));
}

TomographyCounts read_tomography_csv(std::istream& in) {
  TomographyCounts counts{};
  std::array<bool, 16> seen{};
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "projector_signal,projector_idler,count")
        throw ConfigError("expected header projector_signal,projector_idler,count", line_no);
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string s, i, c;
    if (!std::getline(ss, s, ',') || !std::getline(ss, i, ',') || !std::getline(ss, c))
      throw ConfigError("expected 3 columns", line_no);
    Projector ps, pi;
    double value;
    try {
      ps = parse_projector(trim(s));
      pi = parse_projector(trim(i));
      std::size_t used = 0;
      const std::string ct = trim(c);
      value = std::stod(ct, &used);
      if (used != ct.size() || value < 0 || value != std::floor(value)) throw InvalidArgument("count");
    } catch (const std::exception&) {
      throw ConfigError("malformed tomography row '" + line + "'", line_no);
    }
    const auto idx = static_cast<std::size_t>(static_cast<int>(ps) * 4 + static_cast<int>(pi));
    if (seen[idx]) throw ConfigError("duplicate projector pair", line_no);
    seen[idx] = true;
    counts[idx] = value;
  }
  if (!header) throw ConfigError("empty tomography file");
  for (bool b : seen)
    if (!b) throw ConfigError("tomography file must list all 16 projector pairs");
  return counts;
}

}  // namespace qss::qmath
