#pragma once

#include <vector>

#include "tempering/measure.hpp"

namespace tempering::testing {

// `atoms_per_mode` equal weights in each of `m` modes.
inline TemperedFamily uniform_family(int m, int L, int atoms_per_mode = 1) {
  const Index n = static_cast<Index>(m) * atoms_per_mode;
  std::vector<int> modes;
  for (int k = 0; k < m; ++k) modes.insert(modes.end(), static_cast<size_t>(atoms_per_mode), k);
  std::vector<double> betas;
  for (int i = 0; i <= L; ++i) betas.push_back(static_cast<double>(i + 1) / (L + 1));
  return temper(FiniteTarget::from_weights(VectorXd::Ones(n), modes, m), TemperatureLadder(betas));
}

// One atom per mode with the given weights.
inline TemperedFamily single_atom_family(const VectorXd& weights, std::vector<double> betas) {
  std::vector<int> modes(static_cast<size_t>(weights.size()));
  for (size_t k = 0; k < modes.size(); ++k) modes[k] = static_cast<int>(k);
  return temper(FiniteTarget::from_weights(weights, modes, static_cast<int>(weights.size())),
                TemperatureLadder(std::move(betas)));
}

inline TemperedFamily small_random_family(int m, int L, std::uint64_t seed, int atoms = 2) {
  RandomFamilySpec spec;
  spec.num_modes = m;
  spec.L = L;
  spec.atoms_per_mode = atoms;
  return random_family(spec, seed);
}

}  // namespace tempering::testing
