#pragma once

// Test-only reference constructions, deliberately independent of the
// library's code paths: Hamiltonians from Kronecker products of spin
// matrices, thermal states from a Pade matrix exponential, and random
// states from Ginibre matrices.

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <complex>
#include <random>

namespace oracle {

using cd = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using M4 = Eigen::Matrix4cd;

inline constexpr double kB = 1.380649e-23;
inline constexpr double muB = 9.2740100783e-24;

inline M2 sx() { M2 m; m << 0, 0.5, 0.5, 0; return m; }
inline M2 sy() { M2 m; m << 0, cd(0, -0.5), cd(0, 0.5), 0; return m; }
inline M2 sz() { M2 m; m << 0.5, 0, 0, -0.5; return m; }

inline M4 kron(const M2& a, const M2& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

/// -J S1.S2 - g mu_B B (S1z + S2z), in kelvin.
inline M4 hamiltonian(double j, double g, double b) {
  const M2 id = M2::Identity();
  const double h = g * muB * b / kB;
  return -j * (kron(sx(), sx()) + kron(sy(), sy()) + kron(sz(), sz()))
         - h * (kron(sz(), id) + kron(id, sz()));
}

/// exp(-H/T) by Pade approximation; no eigendecomposition.
inline M4 boltzmann(const M4& h, double t) {
  const Eigen::Matrix4d real = (-h.real() / t).eval();
  return Eigen::Matrix4d(real.exp()).cast<cd>();
}

inline M4 thermal_state(double j, double g, double b, double t) {
  const M4 w = boltzmann(hamiltonian(j, g, b), t);
  return w / w.trace();
}

/// |+-> = (|0> +- |1>)/sqrt2 per qubit.
inline M4 to_sx(const M4& rho) {
  M2 r;
  r << 1, 1, 1, -1;
  r /= std::sqrt(2.0);
  const M4 rr = kron(r, r);
  return rr * rho * rr.adjoint();
}

inline double l1(const M4& rho) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j)
        s += std::abs(rho(i, j));
  return s;
}

/// Random full-rank state rho = A A^dagger / Tr.
inline M4 random_state(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  M4 a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      a(i, j) = cd(n(rng), n(rng));
  M4 rho = a * a.adjoint();
  rho /= rho.trace();
  return 0.5 * (rho + rho.adjoint());
}

} // namespace oracle
