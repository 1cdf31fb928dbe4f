#pragma once

#include <cstdint>
#include <span>
#include <string>

#include <Eigen/Core>

#include "tempering/stochastic_matrix.hpp"

namespace tempering {

enum class SpectrumMethod {
  kDenseSymmetrized,
  kDeflatedPowerIteration,
  kDeflatedInverseIteration
};

std::string to_string(SpectrumMethod method);

struct SpectrumReport {
  double gap = 0.0;
  double second_eigenvalue = 1.0;
  SpectrumMethod method = SpectrumMethod::kDenseSymmetrized;
  // ||S v - lambda_2 v|| for the reported eigenvector of the symmetrization.
  double residual = 0.0;
  Index iterations = 0;
  // Smallest eigenvalue (dense only; the sparse path reports NaN).
  double min_eigenvalue = 0.0;
  // All eigenvalues >= -1e-10 (dense) or every diagonal entry >= 1/2 (sparse).
  bool nonnegative_definite = true;
};

struct SpectralOptions {
  Index dense_limit = 2000;
  double residual_target = 1e-8;
  Index max_iterations = 1'000'000;
  double reversibility_tolerance = kStochasticTolerance;
  std::uint64_t seed = 0x5eedULL;
  // Iteration used above dense_limit. Power iteration contracts by
  // (1 - gap_3)/(1 - gap_2) per sweep, inverse iteration by gap_2/gap_3 per
  // (iterative) linear solve.
  SpectrumMethod sparse_method = SpectrumMethod::kDeflatedInverseIteration;
};

// Gap(P) = 1 - lambda_2 of D^{1/2} P D^{-1/2}, D = diag(pi). Dense
// self-adjoint eigensolve up to `dense_limit` states, a deflated sparse
// iteration above. Throws ContractError when P is not reversible with respect to its
// stationary distribution or that distribution has a zero entry. A one-state
// chain has no nonconstant functions; its gap is reported as 1.
SpectrumReport spectral_gap(const StochasticMatrix& kernel, const SpectralOptions& options = {});

// 1 - max |lambda| over the eigenvalues of P other than the leading 1, for
// kernels that need not be reversible (dense only).
double absolute_spectral_gap(const StochasticMatrix& kernel);

// E(f, f) = 1/2 sum_{x,y} pi(x) P(x,y) (f(x) - f(y))^2.
double dirichlet_form(const StochasticMatrix& kernel, const Eigen::Ref<const Eigen::VectorXd>& f);

// Var_pi(f) = sum pi f^2 - (sum pi f)^2, evaluated after centering.
double variance(const Eigen::Ref<const Eigen::VectorXd>& pi,
                const Eigen::Ref<const Eigen::VectorXd>& f);

// Boundary flow of X divided by min{pi(X), pi(X^c)}.
double cheeger_ratio(const StochasticMatrix& kernel, std::span<const Index> subset);

// sum_{x in X, y notin X} pi(x) P(x, y)
double boundary_flow(const StochasticMatrix& kernel, std::span<const Index> subset);

// sqrt(chi_sq) * exp(-n * gap)
double tv_bound(double chi_sq, double gap, double steps);

}  // namespace tempering
