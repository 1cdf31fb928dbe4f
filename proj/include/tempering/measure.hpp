#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tempering/error.hpp"
#include "tempering/state_codec.hpp"

namespace tempering {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Level-to-mode assignment lambda in [m]^{L+1}. Modes are 0-based.
using ProductAssignment = std::vector<int>;

inline constexpr Index kDefaultEnumerationBudget = 10'000'000;

// Unnormalized multimodal target on a finite atom set (counting measure).
// Weights are held as natural logarithms so extreme magnitudes survive.
class FiniteTarget {
 public:
  FiniteTarget(VectorXd log_weights, std::vector<int> modes, int num_modes);

  static FiniteTarget from_weights(const VectorXd& weights,
                                   std::vector<int> modes, int num_modes);

  Index num_atoms() const { return log_weights_.size(); }
  int num_modes() const { return num_modes_; }
  const VectorXd& log_weights() const { return log_weights_; }
  const std::vector<int>& modes() const { return modes_; }
  int mode_of(Index atom) const { return modes_[static_cast<size_t>(atom)]; }
  // Atom indices of each mode, in increasing order.
  const std::vector<std::vector<Index>>& blocks() const { return blocks_; }

 private:
  VectorXd log_weights_;
  std::vector<int> modes_;
  int num_modes_;
  std::vector<std::vector<Index>> blocks_;
};

class TemperatureLadder {
 public:
  explicit TemperatureLadder(std::vector<double> betas);

  const std::vector<double>& betas() const { return betas_; }
  int L() const { return static_cast<int>(betas_.size()) - 1; }
  int num_levels() const { return static_cast<int>(betas_.size()); }

 private:
  std::vector<double> betas_;
};

// Normalized levels pi_0 ... pi_L. Rows of `levels()` are levels, columns atoms.
class TemperedFamily {
 public:
  TemperedFamily(FiniteTarget target, TemperatureLadder ladder,
                 MatrixXd log_levels);

  const FiniteTarget& target() const { return target_; }
  const TemperatureLadder& ladder() const { return ladder_; }
  int L() const { return ladder_.L(); }
  int num_levels() const { return ladder_.num_levels(); }
  int num_modes() const { return target_.num_modes(); }
  Index num_atoms() const { return target_.num_atoms(); }

  const MatrixXd& levels() const { return levels_; }
  // Normalized log densities, same layout as levels().
  const MatrixXd& log_levels() const { return log_levels_; }
  // (L+1) x m matrix of block masses pi_i(A_k).
  const MatrixXd& block_masses() const { return block_masses_; }

 private:
  FiniteTarget target_;
  TemperatureLadder ladder_;
  MatrixXd log_levels_;
  MatrixXd levels_;
  MatrixXd block_masses_;
};

// pi_i proportional to pi^{beta_i}, computed in the log domain.
TemperedFamily temper(const FiniteTarget& target,
                      const TemperatureLadder& ladder);

// A family whose levels are given directly rather than by powering a target
// (used for instances defined by their mode masses). Rows must be positive;
// they are renormalized.
TemperedFamily family_from_levels(const FiniteTarget& target,
                                  const TemperatureLadder& ladder,
                                  const MatrixXd& levels);

// min over |i-j| = 1 and k of sum_{x in A_k} min{pi_i(x), pi_j(x)} / pi_i(A_k).
double overlap_phi(const TemperedFamily& family);

// The same minimum with the overlap summed over every atom instead of A_k.
double overlap_phi_unrestricted(const TemperedFamily& family);

// B = min_k prod_{i=1}^{L} min{1, pi_{i-1}(A_k) / pi_i(A_k)} over a
// (L+1) x m matrix of block masses. Works for any ordered field scalar.
template <typename Derived>
typename Derived::Scalar bottleneck_ratio(const Eigen::MatrixBase<Derived>& masses) {
  using Scalar = typename Derived::Scalar;
  Scalar best(1);
  for (Index k = 0; k < masses.cols(); ++k) {
    Scalar product(1);
    for (Index i = 1; i < masses.rows(); ++i) {
      const Scalar ratio = masses(i - 1, k) / masses(i, k);
      if (ratio < Scalar(1)) product *= ratio;
    }
    if (k == 0 || product < best) best = product;
  }
  return best;
}

double bottleneck_ratio(const TemperedFamily& family);

// pi_bar(lambda) = prod_i masses(i, lambda_i), lambda indexed mixed-radix.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> assignment_masses(
    const Eigen::MatrixBase<Derived>& masses, Index budget = kDefaultEnumerationBudget) {
  using Scalar = typename Derived::Scalar;
  const int levels = static_cast<int>(masses.rows());
  const int m = static_cast<int>(masses.cols());
  const Index size = checked_power(m, levels, budget);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(size);
  std::vector<int> digits(static_cast<size_t>(levels));
  for (Index s = 0; s < size; ++s) {
    decode_mixed_radix(s, m, digits);
    Scalar p(1);
    for (int i = 0; i < levels; ++i) p *= masses(i, digits[static_cast<size_t>(i)]);
    out(s) = p;
  }
  return out;
}

VectorXd pi_bar(const TemperedFamily& family,
                Index budget = kDefaultEnumerationBudget);

double pi_bar_at(const TemperedFamily& family, std::span<const int> lambda);

// Stationary probability of accepting a swap between theta_{i-1} in A_{k1}
// and theta_i in A_{k2}, for level i in [1, L].
double swap_acceptance_marginal(const TemperedFamily& family, int i, int k1,
                                int k2);

StateCodec assignment_codec(const TemperedFamily& family,
                            Index budget = kDefaultEnumerationBudget);

struct RandomFamilySpec {
  int num_modes = 2;
  int L = 1;
  int atoms_per_mode = 2;
  double log_weight_spread = 3.0;
};

// Random target with log-uniform weights and a random ladder
// 0 < beta_0 < ... < beta_L = 1. Deterministic in `seed`.
TemperedFamily random_family(const RandomFamilySpec& spec, std::uint64_t seed);

}  // namespace tempering
