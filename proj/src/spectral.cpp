#include "tempering/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/IterativeLinearSolvers>

#include "tempering/error.hpp"
#include "tempering/random.hpp"

namespace tempering {

std::string to_string(SpectrumMethod method) {
  switch (method) {
    case SpectrumMethod::kDenseSymmetrized:
      return "dense-symmetrized";
    case SpectrumMethod::kDeflatedPowerIteration:
      return "deflated-power-iteration";
    case SpectrumMethod::kDeflatedInverseIteration:
      return "deflated-inverse-iteration";
  }
  return "unknown";
}

namespace {

void check_reversible(const StochasticMatrix& kernel, double tol) {
  if ((kernel.stationary().array() <= 0.0).any()) {
    throw ContractError("stationary distribution must be strictly positive");
  }
  const double residual = kernel.detailed_balance_residual();
  if (residual > tol) {
    throw ContractError("kernel is not reversible: detailed-balance residual " +
                        std::to_string(residual));
  }
}

// S(x,y) = sqrt(pi(x)/pi(y)) P(x,y)
SparseMatrix symmetrize(const StochasticMatrix& kernel) {
  const Eigen::VectorXd root = kernel.stationary().cwiseSqrt();
  SparseMatrix s = root.asDiagonal() * kernel.entries() * root.cwiseInverse().asDiagonal();
  const SparseMatrix st = s.transpose();
  SparseMatrix sym = 0.5 * (s + st);
  return sym;
}

SpectrumReport dense_gap(const StochasticMatrix& kernel) {
  const Eigen::MatrixXd s = Eigen::MatrixXd(symmetrize(kernel));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success) throw ContractError("eigensolver failed to converge");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Index n = values.size();
  SpectrumReport report;
  report.method = SpectrumMethod::kDenseSymmetrized;
  report.min_eigenvalue = values(0);
  report.nonnegative_definite = values(0) >= -1e-10;
  report.second_eigenvalue = values(n - 2);
  report.gap = 1.0 - report.second_eigenvalue;
  const Eigen::VectorXd v = solver.eigenvectors().col(n - 2);
  report.residual = (s * v - report.second_eigenvalue * v).norm();
  return report;
}

Eigen::VectorXd deflated_start(const Eigen::VectorXd& top, std::uint64_t seed) {
  RandomStream rng(seed, 0);
  Eigen::VectorXd v(top.size());
  for (Index x = 0; x < v.size(); ++x) v(x) = rng.uniform() - 0.5;
  v -= top.dot(v) * top;
  return v.normalized();
}

SpectrumReport power_gap(const StochasticMatrix& kernel, const SpectralOptions& options) {
  const SparseMatrix s = symmetrize(kernel);
  const Index n = s.rows();
  const Eigen::VectorXd top = kernel.stationary().cwiseSqrt().normalized();
  const bool lazy = (kernel.diagonal().array() >= 0.5).all();

  Eigen::VectorXd v = deflated_start(top, options.seed);

  SpectrumReport report;
  report.method = SpectrumMethod::kDeflatedPowerIteration;
  report.nonnegative_definite = lazy;
  report.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd sv(n);
  double rayleigh = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  Index iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    sv.noalias() = s * v;
    sv -= top.dot(sv) * top;
    rayleigh = v.dot(sv);
    residual = (sv - rayleigh * v).norm();
    if (residual <= options.residual_target) break;
    // (S + I)/2 has the same eigenvectors and a spectrum in [0, 1], so the
    // dominant direction is the second-largest eigenvalue of S.
    if (lazy) {
      v = sv;
    } else {
      v = 0.5 * (sv + v);
    }
    v -= top.dot(v) * top;
    v.normalize();
  }
  if (residual > options.residual_target) {
    throw BudgetError("power iteration did not reach residual " +
                      std::to_string(options.residual_target) + " within " +
                      std::to_string(options.max_iterations) + " iterations (residual " +
                      std::to_string(residual) + ")");
  }
  report.second_eigenvalue = rayleigh;
  report.gap = 1.0 - rayleigh;
  report.residual = residual;
  report.iterations = iter + 1;
  return report;
}

// Inverse iteration with the pseudo-inverse of I - S on the complement of
// sqrt(pi). I - S is singular only along sqrt(pi), so pinning the coordinate
// of the heaviest state gives a positive definite system whose solution is
// one preimage; projecting out sqrt(pi) picks the pseudo-inverse image.
// The system is solved by Jacobi-preconditioned conjugate gradients: direct
// factorizations of swap graphs over permutations fill in badly.
SpectrumReport inverse_gap(const StochasticMatrix& kernel, const SpectralOptions& options) {
  const SparseMatrix s = symmetrize(kernel);
  const Index n = s.rows();
  const Eigen::VectorXd top = kernel.stationary().cwiseSqrt().normalized();
  Index ground = 0;
  kernel.stationary().maxCoeff(&ground);

  auto reduced = [ground](Index x) { return x < ground ? x : x - 1; };
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<size_t>(s.nonZeros() + n));
  for (Index x = 0; x < n; ++x) {
    if (x == ground) continue;
    triplets.emplace_back(reduced(x), reduced(x), 1.0);
    for (SparseMatrix::InnerIterator it(s, x); it; ++it) {
      if (it.col() == ground) continue;
      triplets.emplace_back(reduced(x), reduced(it.col()), -it.value());
    }
  }
  Eigen::SparseMatrix<double> laplacian(n - 1, n - 1);
  laplacian.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> solver;
  solver.setTolerance(1e-13);
  solver.setMaxIterations(std::max<Index>(1000, 10 * n));
  solver.compute(laplacian);

  SpectrumReport report;
  report.method = SpectrumMethod::kDeflatedInverseIteration;
  report.nonnegative_definite = (kernel.diagonal().array() >= 0.5).all();
  report.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();

  Eigen::VectorXd v = deflated_start(top, options.seed);
  Eigen::VectorXd rhs(n - 1);
  Eigen::VectorXd sv(n);
  double rayleigh = 0.0;
  double residual = std::numeric_limits<double>::infinity();
  Index iter = 0;
  for (; iter < options.max_iterations; ++iter) {
    sv.noalias() = s * v;
    sv -= top.dot(sv) * top;
    rayleigh = v.dot(sv);
    residual = (sv - rayleigh * v).norm();
    if (residual <= options.residual_target) break;
    for (Index x = 0; x < n; ++x) {
      if (x != ground) rhs(reduced(x)) = v(x);
    }
    const Eigen::VectorXd sol = solver.solve(rhs);
    for (Index x = 0; x < n; ++x) v(x) = x == ground ? 0.0 : sol(reduced(x));
    v -= top.dot(v) * top;
    v.normalize();
  }
  if (residual > options.residual_target) {
    throw BudgetError("inverse iteration did not reach residual " +
                      std::to_string(options.residual_target) + " (residual " +
                      std::to_string(residual) + ")");
  }
  report.second_eigenvalue = rayleigh;
  report.gap = 1.0 - rayleigh;
  report.residual = residual;
  report.iterations = iter + 1;
  return report;
}

}  // namespace

SpectrumReport spectral_gap(const StochasticMatrix& kernel, const SpectralOptions& options) {
  check_reversible(kernel, options.reversibility_tolerance);
  if (kernel.size() == 1) {
    SpectrumReport report;
    report.gap = 1.0;
    report.second_eigenvalue = 0.0;
    report.min_eigenvalue = 1.0;
    return report;
  }
  if (kernel.size() <= options.dense_limit) return dense_gap(kernel);
  if (options.sparse_method == SpectrumMethod::kDeflatedPowerIteration) {
    return power_gap(kernel, options);
  }
  return inverse_gap(kernel, options);
}

double absolute_spectral_gap(const StochasticMatrix& kernel) {
  if (kernel.size() == 1) return 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(kernel.dense(), false);
  if (solver.info() != Eigen::Success) throw ContractError("eigensolver failed to converge");
  std::vector<double> moduli;
  for (Index j = 0; j < solver.eigenvalues().size(); ++j) {
    moduli.push_back(std::abs(solver.eigenvalues()(j)));
  }
  std::sort(moduli.begin(), moduli.end(), std::greater<>());
  return 1.0 - moduli[1];
}

double dirichlet_form(const StochasticMatrix& kernel, const Eigen::Ref<const Eigen::VectorXd>& f) {
  require(f.size() == kernel.size(), "function dimension does not match the state space");
  const SparseMatrix& p = kernel.entries();
  const Eigen::VectorXd& pi = kernel.stationary();
  double sum = 0.0;
  for (Index x = 0; x < p.outerSize(); ++x) {
    for (SparseMatrix::InnerIterator it(p, x); it; ++it) {
      const double d = f(x) - f(it.col());
      sum += pi(x) * it.value() * d * d;
    }
  }
  return 0.5 * sum;
}

double variance(const Eigen::Ref<const Eigen::VectorXd>& pi,
                const Eigen::Ref<const Eigen::VectorXd>& f) {
  require(f.size() == pi.size(), "function dimension does not match the distribution");
  const double mean = pi.dot(f);
  return pi.dot((f.array() - mean).square().matrix());
}

double boundary_flow(const StochasticMatrix& kernel, std::span<const Index> subset) {
  std::vector<char> inside(static_cast<size_t>(kernel.size()), 0);
  for (Index x : subset) {
    require(x >= 0 && x < kernel.size(), "subset state out of range");
    inside[static_cast<size_t>(x)] = 1;
  }
  const SparseMatrix& p = kernel.entries();
  double flow = 0.0;
  for (Index x : subset) {
    for (SparseMatrix::InnerIterator it(p, x); it; ++it) {
      if (!inside[static_cast<size_t>(it.col())]) flow += kernel.stationary()(x) * it.value();
    }
  }
  return flow;
}

double cheeger_ratio(const StochasticMatrix& kernel, std::span<const Index> subset) {
  std::vector<char> inside(static_cast<size_t>(kernel.size()), 0);
  double mass = 0.0;
  for (Index x : subset) {
    require(x >= 0 && x < kernel.size(), "subset state out of range");
    if (!inside[static_cast<size_t>(x)]) mass += kernel.stationary()(x);
    inside[static_cast<size_t>(x)] = 1;
  }
  const double complement = kernel.stationary().sum() - mass;
  require(mass > 0.0 && complement > 0.0, "Cheeger ratio needs a nontrivial subset");
  return boundary_flow(kernel, subset) / std::min(mass, complement);
}

double tv_bound(double chi_sq, double gap, double steps) {
  require(chi_sq >= 0.0, "chi-square divergence must be nonnegative");
  require(gap >= 0.0 && gap <= 2.0, "gap must lie in [0, 2]");
  require(steps >= 0.0, "step count must be nonnegative");
  return std::sqrt(chi_sq) * std::exp(-steps * gap);
}

}  // namespace tempering
