#pragma once

// Exact two-qubit operator algebra for the Heisenberg dimer
//   H = -J S1.S2 - g mu_B B (S1z + S2z)
// in the product basis {|00>, |01>, |10>, |11>}, where 0 is spin up along
// the quantization axis. Energies are carried in kelvin (E / k_B).
//
// This layer is the brute-force reference that the closed forms in
// models.hpp are checked against.

#include <dimerq/constants.hpp>
#include <dimerq/error.hpp>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dimerq {

using Matrix4 = Eigen::Matrix4d;
using Matrix4c = Eigen::Matrix4cd;
using Vector4 = Eigen::Vector4d;

enum class Basis { Sz, Sx };

inline std::string_view to_string(Basis basis) {
  return basis == Basis::Sz ? "Sz" : "Sx";
}

/// Physical parameters of one dimer evaluation. J < 0 is antiferromagnetic.
struct DimerParams {
  double j_over_kb = 0.0;   // K
  double g = 2.0;
  double temperature = 1.0; // K
  double b_field = 0.0;     // T, along z

  void validate() const {
    if (!(temperature > 0.0) || !std::isfinite(temperature))
      throw DataError("temperature must be positive and finite, got " + std::to_string(temperature));
    if (!(g > 0.0) || !std::isfinite(g))
      throw DataError("g factor must be positive and finite, got " + std::to_string(g));
    if (!std::isfinite(j_over_kb) || !std::isfinite(b_field))
      throw DataError("exchange constant and field must be finite");
  }

  double beta() const { return 1.0 / temperature; }
  /// x = beta J / 4
  double x() const { return j_over_kb / (4.0 * temperature); }
  /// Zeeman energy h = g mu_B B / k_B in kelvin.
  double zeeman() const { return g * constants::bohr_over_boltzmann * b_field; }
};

/// Real symmetric 4x4 Hamiltonian in kelvin, S_z product basis.
class Hamiltonian4 {
public:
  explicit Hamiltonian4(const Matrix4& entries) : entries_(entries) {
    if (!entries_.allFinite())
      throw NumericError("Hamiltonian has non-finite entries");
    const double scale = std::max(1.0, entries_.cwiseAbs().maxCoeff());
    if ((entries_ - entries_.transpose()).cwiseAbs().maxCoeff() > 1e-14 * scale)
      throw std::invalid_argument("Hamiltonian4 requires a symmetric matrix");
  }

  const Matrix4& matrix() const { return entries_; }
  double operator()(int i, int j) const { return entries_(i, j); }

private:
  Matrix4 entries_;
};

/// Hermitian, unit-trace, positive semidefinite two-qubit state with the
/// label of the product basis its entries are written in.
class DensityMatrix4 {
public:
  static constexpr double hermiticity_tol = 1e-12;
  static constexpr double trace_tol = 1e-12;
  static constexpr double positivity_tol = 1e-10;

  DensityMatrix4(const Matrix4c& entries, Basis basis) : entries_(entries), basis_(basis) {
    if (!entries_.allFinite())
      throw NumericError("density matrix has non-finite entries");
    if ((entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() > hermiticity_tol)
      throw DataError("density matrix is not Hermitian");
    if (std::abs(entries_.trace() - 1.0) > trace_tol)
      throw DataError("density matrix trace differs from 1");
    Eigen::SelfAdjointEigenSolver<Matrix4c> solver(entries_, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -positivity_tol)
      throw DataError("density matrix is not positive semidefinite");
  }

  DensityMatrix4(const Matrix4& entries, Basis basis)
    : DensityMatrix4(Matrix4c(entries.cast<std::complex<double>>()), basis) {}

  const Matrix4c& matrix() const { return entries_; }
  std::complex<double> operator()(int i, int j) const { return entries_(i, j); }
  Basis basis() const { return basis_; }

  Eigen::Vector4d eigenvalues() const {
    return Eigen::SelfAdjointEigenSolver<Matrix4c>(entries_, Eigen::EigenvaluesOnly).eigenvalues();
  }

private:
  Matrix4c entries_;
  Basis basis_;
};

/// Convex combination lambda*a + (1-lambda)*b; both must share a basis.
inline DensityMatrix4 mix(double lambda, const DensityMatrix4& a, const DensityMatrix4& b) {
  if (a.basis() != b.basis())
    throw std::invalid_argument("cannot mix states written in different bases");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("mixing weight must lie in [0, 1]");
  return DensityMatrix4(Matrix4c(lambda * a.matrix() + (1.0 - lambda) * b.matrix()), a.basis());
}

namespace states {

inline Vector4 singlet() {
  return Vector4(0.0, 1.0, -1.0, 0.0) / std::sqrt(2.0);
}

inline Vector4 basis_vector(int index) {
  return Vector4::Unit(index);
}

inline DensityMatrix4 projector(const Vector4& psi, Basis basis = Basis::Sz) {
  return DensityMatrix4(Matrix4(psi * psi.transpose() / psi.squaredNorm()), basis);
}

inline DensityMatrix4 maximally_mixed(Basis basis = Basis::Sz) {
  return DensityMatrix4(Matrix4(Matrix4::Identity() / 4.0), basis);
}

} // namespace states

inline Hamiltonian4 build_hamiltonian(const DimerParams& params) {
  params.validate();
  const double j = params.j_over_kb;
  const double h = params.zeeman();

  // S1.S2 = S1z S2z + (S1+ S2- + S1- S2+) / 2
  Matrix4 exchange = Matrix4::Zero();
  exchange(0, 0) = 0.25;
  exchange(1, 1) = -0.25;
  exchange(2, 2) = -0.25;
  exchange(3, 3) = 0.25;
  exchange(1, 2) = 0.5;
  exchange(2, 1) = 0.5;

  const Vector4 total_sz(1.0, 0.0, 0.0, -1.0);

  return Hamiltonian4(Matrix4(-j * exchange - h * Matrix4(total_sz.asDiagonal())));
}

struct Eigensystem {
  Vector4 values;  // ascending
  Matrix4 vectors; // columns, orthonormal
};

/// Eigenvalues ascending; each eigenvector is signed so that its
/// largest-magnitude component (first one on ties) is positive.
inline Eigensystem eigensystem(const Hamiltonian4& hamiltonian) {
  Eigen::SelfAdjointEigenSolver<Matrix4> solver(hamiltonian.matrix());
  if (solver.info() != Eigen::Success)
    throw NumericError("eigensolver failed");

  Eigensystem result{solver.eigenvalues(), solver.eigenvectors()};
  for (int k = 0; k < 4; ++k) {
    auto column = result.vectors.col(k);
    int pivot = 0;
    for (int i = 1; i < 4; ++i)
      if (std::abs(column(i)) > std::abs(column(pivot)) + 1e-12)
        pivot = i;
    if (column(pivot) < 0.0)
      column = -column;
  }
  return result;
}

/// rho = exp(-H/T) / Tr exp(-H/T), evaluated in the eigenbasis with the
/// ground energy shifted to zero so the weights never overflow.
inline DensityMatrix4 gibbs_state(const Hamiltonian4& hamiltonian, double temperature) {
  if (!(temperature > 0.0))
    throw DataError("temperature must be positive");
  if (temperature < constants::min_temperature)
    throw NumericError("temperature underflow");

  const Eigensystem es = eigensystem(hamiltonian);
  const double ground = es.values(0);
  Vector4 weights;
  for (int k = 0; k < 4; ++k)
    weights(k) = std::exp(-(es.values(k) - ground) / temperature);
  weights /= weights.sum();

  Matrix4 rho = es.vectors * weights.asDiagonal() * es.vectors.transpose();
  rho = 0.5 * (rho + rho.transpose()).eval();
  return DensityMatrix4(rho, Basis::Sz);
}

inline DensityMatrix4 gibbs_state(const DimerParams& params) {
  return gibbs_state(build_hamiltonian(params), params.temperature);
}

/// Tr exp(-H/T) summed over the numerically obtained spectrum.
inline double partition_function_oracle(const Hamiltonian4& hamiltonian, double temperature) {
  if (!(temperature > 0.0))
    throw DataError("temperature must be positive");
  const Eigensystem es = eigensystem(hamiltonian);
  double z = 0.0;
  for (int k = 0; k < 4; ++k)
    z += std::exp(-es.values(k) / temperature);
  if (!std::isfinite(z))
    throw NumericError("temperature underflow: partition function overflows");
  return z;
}

/// Single-qubit map |0> -> |+>, |1> -> |->, with |+-> = (|0> +- |1>)/sqrt2.
/// Symmetric and its own inverse.
inline Matrix4 sx_rotation() {
  Eigen::Matrix2d r;
  r << 1.0, 1.0,
       1.0, -1.0;
  r /= std::sqrt(2.0);
  Matrix4 rr;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      rr.block<2, 2>(2 * a, 2 * b) = r(a, b) * r;
  return rr;
}

inline DensityMatrix4 rotate_to_sx(const DensityMatrix4& rho) {
  if (rho.basis() != Basis::Sz)
    throw std::invalid_argument("rotate_to_sx expects a state in the Sz basis");
  const Matrix4c rr = sx_rotation().cast<std::complex<double>>();
  return DensityMatrix4(Matrix4c(rr * rho.matrix() * rr.adjoint()), Basis::Sx);
}

inline DensityMatrix4 rotate_to_sz(const DensityMatrix4& rho) {
  if (rho.basis() != Basis::Sx)
    throw std::invalid_argument("rotate_to_sz expects a state in the Sx basis");
  const Matrix4c rr = sx_rotation().cast<std::complex<double>>();
  return DensityMatrix4(Matrix4c(rr.adjoint() * rho.matrix() * rr), Basis::Sz);
}

enum class GroundState { singlet, up_up, down_down, triplet_zero, degenerate };

inline std::string_view to_string(GroundState state) {
  switch (state) {
    case GroundState::singlet: return "singlet";
    case GroundState::up_up: return "up-up";
    case GroundState::down_down: return "down-down";
    case GroundState::triplet_zero: return "triplet-0";
    case GroundState::degenerate: return "degenerate";
  }
  return "unknown";
}

/// Identifies the ground eigenvector of a dimer Hamiltonian. Levels closer
/// than `degeneracy_tol` kelvin are reported as degenerate.
inline GroundState ground_state(const Hamiltonian4& hamiltonian, double degeneracy_tol = 1e-9) {
  const Eigensystem es = eigensystem(hamiltonian);
  if (es.values(1) - es.values(0) < degeneracy_tol)
    return GroundState::degenerate;

  const Vector4 ground = es.vectors.col(0);
  const std::array<std::pair<GroundState, Vector4>, 4> candidates{{
    {GroundState::singlet, states::singlet()},
    {GroundState::up_up, states::basis_vector(0)},
    {GroundState::down_down, states::basis_vector(3)},
    {GroundState::triplet_zero, Vector4(0.0, 1.0, 1.0, 0.0) / std::sqrt(2.0)},
  }};
  GroundState best = GroundState::degenerate;
  double best_overlap = 0.5;
  for (const auto& [label, psi] : candidates) {
    const double overlap = std::pow(ground.dot(psi), 2);
    if (overlap > best_overlap) {
      best_overlap = overlap;
      best = label;
    }
  }
  return best;
}

} // namespace dimerq
