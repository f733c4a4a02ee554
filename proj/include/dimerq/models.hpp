#pragma once

// Closed-form thermodynamics of the isotropic spin-1/2 dimer: Bleaney-Bowers
// susceptibility, the susceptibility -> correlation -> coherence pipeline,
// and the Gibbs state with a field along z written in the Sz and Sx bases.

#include <dimerq/constants.hpp>
#include <dimerq/core.hpp>
#include <dimerq/error.hpp>
#include <dimerq/quantifiers.hpp>

#include <algorithm>
#include <cmath>
#include <string>

namespace dimerq {

enum class SusceptibilityUnit { emu_per_mol, si_m3_per_mol };

inline std::string_view to_string(SusceptibilityUnit unit) {
  return unit == SusceptibilityUnit::emu_per_mol ? "emu/mol" : "m3/mol";
}

/// One molar susceptibility sample.
struct SusceptibilityPoint {
  double temperature = 0.0; // K
  double chi = 0.0;
  SusceptibilityUnit unit = SusceptibilityUnit::emu_per_mol;

  double chi_cgs() const {
    return unit == SusceptibilityUnit::emu_per_mol
      ? chi : chi / constants::si_per_cgs_molar_susceptibility;
  }
};

inline double convert_susceptibility(double chi, SusceptibilityUnit from, SusceptibilityUnit to) {
  if (from == to)
    return chi;
  return from == SusceptibilityUnit::emu_per_mol
    ? chi * constants::si_per_cgs_molar_susceptibility
    : chi / constants::si_per_cgs_molar_susceptibility;
}

/// Spin-spin correlation c; physical range [-1, 1/3].
struct CorrelationValue {
  double c = 0.0;
};

namespace detail {

/// 1 / (3 + exp(-J/T)) without overflowing for |J|/T large.
inline double bleaney_bowers_factor(double j_over_kb, double temperature) {
  const double y = -j_over_kb / temperature;
  if (y > 0.0) {
    const double u = std::exp(-y);
    return u / (3.0 * u + 1.0);
  }
  return 1.0 / (3.0 + std::exp(y));
}

/// Boltzmann weights of the dimer levels relative to exp(x), each scaled by
/// exp(-m) with m the largest exponent, so nothing overflows:
///   one   ~ 1           (triplet |T0>, and the x-normalization)
///   gap   ~ e^{-4x}     (singlet)
///   up    ~ e^{+beta h} (|00>)
///   down  ~ e^{-beta h} (|11>)
struct ScaledWeights {
  double one, gap, up, down, shift;
  double denominator() const { return one + gap + up + down; }
  double cosh() const { return 0.5 * (up + down); }
  double sinh() const { return 0.5 * (up - down); }
};

inline ScaledWeights scaled_weights(const DimerParams& p) {
  const double e_gap = -4.0 * p.x();
  const double e_field = p.zeeman() / p.temperature;
  const double m = std::max({0.0, e_gap, std::abs(e_field)});
  return {std::exp(-m), std::exp(e_gap - m), std::exp(e_field - m), std::exp(-e_field - m), m};
}

} // namespace detail

/// Bleaney-Bowers susceptibility of `n_moles` moles of dimers:
///   chi = 2 N (g mu_B)^2 / (k_B T) * 1 / (3 + exp(-J / k_B T)),  N = n_moles N_A.
inline SusceptibilityPoint bleaney_bowers_chi(double j_over_kb, double g, double temperature,
                                              double n_moles = 1.0,
                                              SusceptibilityUnit unit = SusceptibilityUnit::emu_per_mol) {
  if (!(temperature > 0.0))
    throw DataError("temperature must be positive");
  const double chi_cgs = n_moles * 2.0 * constants::curie_cgs * g * g / temperature *
                         detail::bleaney_bowers_factor(j_over_kb, temperature);
  return {temperature, convert_susceptibility(chi_cgs, SusceptibilityUnit::emu_per_mol, unit), unit};
}

/// c = 2 k_B T chi / (N_A g^2 mu_B^2) - 1 per mole of dimers. Points more than
/// 0.02 outside [-1, 1/3] are rejected as unphysical; no clamping is applied.
inline CorrelationValue correlation_from_chi(const SusceptibilityPoint& point, double g,
                                             double n_moles = 1.0) {
  constexpr double tol = 0.02;
  if (!(point.temperature > 0.0) || !std::isfinite(point.temperature))
    throw DataError("temperature must be positive and finite");
  if (!std::isfinite(point.chi))
    throw DataError("susceptibility must be finite");
  if (!(g > 0.0) || !(n_moles > 0.0))
    throw DataError("g and n_moles must be positive");

  const double chi_molar = point.chi_cgs() / n_moles;
  const double c = 2.0 * point.temperature * chi_molar / (constants::curie_cgs * g * g) - 1.0;
  if (c < -1.0 - tol || c > 1.0 / 3.0 + tol)
    throw DataError("unphysical data point at T = " + std::to_string(point.temperature) +
                    " K: correlation " + std::to_string(c) + " outside [-1, 1/3]");
  return {c};
}

/// Bell-diagonal zero-field state parametrized by the spin correlation c.
inline DensityMatrix4 rho_zero_field(CorrelationValue correlation) {
  constexpr double tol = 1e-12;
  const double c = correlation.c;
  if (!(c >= -1.0 - tol && c <= 1.0 / 3.0 + tol))
    throw DataError("nonpositive state: correlation " + std::to_string(c) + " outside [-1, 1/3]");
  Matrix4 rho = Matrix4::Zero();
  rho(0, 0) = (1.0 + c) / 4.0;
  rho(1, 1) = (1.0 - c) / 4.0;
  rho(2, 2) = (1.0 - c) / 4.0;
  rho(3, 3) = (1.0 + c) / 4.0;
  rho(1, 2) = c / 2.0;
  rho(2, 1) = c / 2.0;
  return DensityMatrix4(rho, Basis::Sz);
}

/// C = |c|, the l1 coherence read off a susceptibility measurement.
inline CoherenceValue coherence_from_chi(const SusceptibilityPoint& point, double g,
                                         double n_moles = 1.0) {
  return {std::abs(correlation_from_chi(point, g, n_moles).c), Basis::Sz};
}

/// log Z with Z = e^x + e^{-3x} + 2 e^x cosh(beta h).
inline double log_partition_function(const DimerParams& params) {
  params.validate();
  const auto w = detail::scaled_weights(params);
  return params.x() + w.shift + std::log(w.denominator());
}

inline double partition_function(const DimerParams& params) {
  const double z = std::exp(log_partition_function(params));
  if (!std::isfinite(z))
    throw NumericError("temperature underflow: partition function overflows");
  return z;
}

/// Gibbs state of the dimer in a longitudinal field, Sz basis (X-shaped).
inline DensityMatrix4 rho_longitudinal(const DimerParams& params) {
  params.validate();
  const auto w = detail::scaled_weights(params);
  const double d = w.denominator();
  Matrix4 rho = Matrix4::Zero();
  rho(0, 0) = w.up / d;
  rho(1, 1) = (w.one + w.gap) / (2.0 * d);
  rho(2, 2) = rho(1, 1);
  rho(1, 2) = (w.one - w.gap) / (2.0 * d);
  rho(2, 1) = rho(1, 2);
  rho(3, 3) = w.down / d;
  return DensityMatrix4(rho, Basis::Sz);
}

/// Same state written in the perpendicular (Sx) product basis.
inline DensityMatrix4 rho_transverse(const DimerParams& params) {
  params.validate();
  const auto w = detail::scaled_weights(params);
  const double d2 = 2.0 * w.denominator();
  const double ch = w.cosh();
  const double sh = w.sinh();
  Matrix4 m;
  m << ch + w.one, sh,          sh,          ch - w.one,
       sh,         ch + w.gap,  ch - w.gap,  sh,
       sh,         ch - w.gap,  ch + w.gap,  sh,
       ch - w.one, sh,          sh,          ch + w.one;
  return DensityMatrix4(Matrix4(m / d2), Basis::Sx);
}

/// C_z = |1 - e^{-4x}| / (1 + e^{-4x} + 2 cosh(beta h))
inline CoherenceValue coherence_longitudinal(const DimerParams& params) {
  params.validate();
  const auto w = detail::scaled_weights(params);
  return {std::abs(w.one - w.gap) / w.denominator(), Basis::Sz};
}

/// C_x = (e^x / Z) (|cosh - 1| + 4 |sinh| + |cosh - e^{-4x}|), arguments beta h.
inline CoherenceValue coherence_transverse(const DimerParams& params) {
  params.validate();
  const auto w = detail::scaled_weights(params);
  const double ch = w.cosh();
  const double numerator = std::abs(ch - w.one) + 4.0 * std::abs(w.sinh()) + std::abs(ch - w.gap);
  return {numerator / w.denominator(), Basis::Sx};
}

inline CoherenceValue coherence(const DimerParams& params, Basis basis) {
  return basis == Basis::Sz ? coherence_longitudinal(params) : coherence_transverse(params);
}

/// Coherence of the numerically diagonalized Gibbs state in the given basis.
inline CoherenceValue coherence_oracle(const DimerParams& params, Basis basis) {
  const DensityMatrix4 rho = gibbs_state(params);
  return l1_coherence(basis == Basis::Sz ? rho : rotate_to_sx(rho));
}

struct CriticalField {
  double tesla = 0.0;           // closed form
  double tesla_bisection = 0.0; // from the diagonalized ground state
  double oersted() const { return tesla * constants::oersted_per_tesla; }
};

/// Field at which |00> crosses below the singlet: g mu_B B_c = |J|.
/// Cross-checked by bisecting on the identity of the numerical ground state
/// over [0, 100] T; the two must agree to 1e-9 T.
inline CriticalField critical_field(double j_over_kb, double g) {
  if (!(j_over_kb < 0.0))
    throw DataError("no level crossing: J/k_B = " + std::to_string(j_over_kb) +
                    " K is not antiferromagnetic");
  if (!(g > 0.0))
    throw DataError("g factor must be positive");

  CriticalField result;
  result.tesla = -j_over_kb / (g * constants::bohr_over_boltzmann);

  auto polarized = [&](double b) {
    const Eigensystem es = eigensystem(build_hamiltonian({j_over_kb, g, 1.0, b}));
    return es.vectors(0, 0) * es.vectors(0, 0) > 0.5;
  };

  double lo = 0.0;
  double hi = 100.0;
  if (polarized(lo) || !polarized(hi))
    throw NumericError("critical field not bracketed by [0, 100] T");
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    (polarized(mid) ? hi : lo) = mid;
  }
  result.tesla_bisection = 0.5 * (lo + hi);

  if (std::abs(result.tesla - result.tesla_bisection) > 1e-9)
    throw NumericError("critical field closed form and bisection disagree");
  return result;
}

} // namespace dimerq
