#pragma once

#include <dimerq/core.hpp>

namespace dimerq {

struct CoherenceValue {
  double value = 0.0;
  Basis basis = Basis::Sz;
};

struct DiscordValue {
  double value = 0.0;
};

/// l1-norm coherence: sum of |rho_ij| over i != j, in whatever basis the
/// state is written in. No implicit change of basis.
inline CoherenceValue l1_coherence(const DensityMatrix4& rho) {
  double sum = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j)
        sum += std::abs(rho(i, j));
  return {sum, rho.basis()};
}

/// Schatten-1 geometric discord of the zero-field Bell-diagonal dimer state,
/// which is exactly half its l1 coherence. Only valid on that family, whose
/// coherence never exceeds 1.
inline DiscordValue geometric_discord_zero_field(const CoherenceValue& coherence) {
  constexpr double tol = 1e-12;
  if (coherence.value < 0.0 || coherence.value > 1.0 + tol)
    throw DataError("state outside Bell-diagonal family: coherence " +
                    std::to_string(coherence.value) + " not in [0, 1]");
  return {coherence.value / 2.0};
}

} // namespace dimerq
