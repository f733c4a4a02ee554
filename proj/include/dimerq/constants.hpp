#pragma once

#include <numbers>

namespace dimerq::constants {

// SI, CODATA 2018. k_B and N_A are exact by definition.
inline constexpr double boltzmann = 1.380649e-23;        // J/K
inline constexpr double bohr_magneton = 9.2740100783e-24; // J/T
inline constexpr double avogadro = 6.02214076e23;        // 1/mol

// CGS counterparts used for molar susceptibility in emu/mol.
inline constexpr double boltzmann_cgs = 1.380649e-16;        // erg/K
inline constexpr double bohr_magneton_cgs = 9.2740100783e-21; // erg/G

/// mu_B / k_B in K/T: Zeeman energy of a g = 1 spin in one tesla, in kelvin.
inline constexpr double bohr_over_boltzmann = bohr_magneton / boltzmann;

/// N_A mu_B^2 / k_B in emu K / mol (~0.375).
inline constexpr double curie_cgs =
  avogadro * bohr_magneton_cgs * bohr_magneton_cgs / boltzmann_cgs;

inline constexpr double oersted_per_tesla = 1.0e4;

/// emu/mol -> m^3/mol.
inline constexpr double si_per_cgs_molar_susceptibility = 4.0 * std::numbers::pi * 1.0e-6;

/// Temperatures below this are refused by the numeric Gibbs-state path.
inline constexpr double min_temperature = 1.0e-6;

} // namespace dimerq::constants
