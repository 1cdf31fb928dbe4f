#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "tempering/error.hpp"
#include "tempering/hardness.hpp"
#include "tempering/random.hpp"
#include "tempering/spectral.hpp"

using namespace tempering;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

StochasticMatrix two_state(double p, double q) {
  MatrixXd m(2, 2);
  m << 1 - p, p, q, 1 - q;
  VectorXd pi(2);
  pi << q / (p + q), p / (p + q);
  return StochasticMatrix::from_dense(m, pi, StateCodec::plain(2));
}

StochasticMatrix random_reversible(Index n, std::uint64_t seed, double sparsity = 0.0) {
  RandomStream rng(seed, 0);
  VectorXd pi(n);
  for (Index x = 0; x < n; ++x) pi(x) = 0.2 + rng.uniform();
  pi /= pi.sum();
  MatrixXd sym = MatrixXd::Zero(n, n);
  for (Index x = 0; x < n; ++x) {
    for (Index y = x + 1; y < n; ++y) {
      if (rng.uniform() >= sparsity || y == x + 1) sym(x, y) = sym(y, x) = rng.uniform();
    }
  }
  MatrixXd p(n, n);
  for (Index x = 0; x < n; ++x) p.row(x) = sym.row(x) / pi(x);
  p /= 2.0 * p.rowwise().sum().maxCoeff();
  for (Index x = 0; x < n; ++x) p(x, x) = 1.0 - p.row(x).sum();
  return StochasticMatrix::from_dense(p, pi, StateCodec::plain(n));
}

// Second largest eigenvalue of P from the general (non-symmetric) eigensolver.
double second_eigenvalue_oracle(const MatrixXd& p) {
  Eigen::EigenSolver<MatrixXd> solver(p, false);
  std::vector<double> ev;
  for (Index i = 0; i < p.rows(); ++i) ev.push_back(solver.eigenvalues()(i).real());
  std::sort(ev.rbegin(), ev.rend());
  return ev[1];
}

}  // namespace

TEST(SpectralGap, IdentityHasZeroGap) {
  const auto id =
      StochasticMatrix::from_dense(MatrixXd::Identity(4, 4), VectorXd::Constant(4, 0.25), StateCodec::plain(4));
  EXPECT_NEAR(spectral_gap(id).gap, 0.0, 1e-14);
}

TEST(SpectralGap, TwoStateIsPPlusQ) {
  EXPECT_NEAR(spectral_gap(two_state(0.3, 0.1)).gap, 0.4, 1e-14);
  EXPECT_NEAR(spectral_gap(two_state(0.05, 0.45)).gap, 0.5, 1e-14);
}

TEST(SpectralGap, OneStateReportsOne) {
  const auto one = StochasticMatrix::from_dense(MatrixXd::Ones(1, 1), VectorXd::Ones(1), StateCodec::plain(1));
  EXPECT_DOUBLE_EQ(spectral_gap(one).gap, 1.0);
}

TEST(SpectralGap, MatchesGeneralEigensolver) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = random_reversible(6, seed);
    const auto report = spectral_gap(p);
    EXPECT_NEAR(report.gap, 1.0 - second_eigenvalue_oracle(p.dense()), 1e-9);
    EXPECT_TRUE(report.nonnegative_definite);
  }
}

TEST(SpectralGap, RejectsNonReversible) {
  MatrixXd cycle(3, 3);
  cycle << 0.5, 0.5, 0.0, 0.0, 0.5, 0.5, 0.5, 0.0, 0.5;
  const auto p = StochasticMatrix::from_dense(cycle, VectorXd::Constant(3, 1.0 / 3), StateCodec::plain(3));
  EXPECT_THROW(spectral_gap(p), ContractError);
}

TEST(SpectralGap, SparseIterationsAgreeWithDense) {
  const auto p = random_reversible(60, 7, 0.9);
  const double dense = spectral_gap(p).gap;
  SpectralOptions inverse;
  inverse.dense_limit = 10;
  const auto inv = spectral_gap(p, inverse);
  EXPECT_EQ(inv.method, SpectrumMethod::kDeflatedInverseIteration);
  EXPECT_NEAR(inv.gap, dense, 1e-8);
  SpectralOptions power = inverse;
  power.sparse_method = SpectrumMethod::kDeflatedPowerIteration;
  const auto pow = spectral_gap(p, power);
  EXPECT_EQ(pow.method, SpectrumMethod::kDeflatedPowerIteration);
  EXPECT_NEAR(pow.gap, dense, 1e-6);
}

TEST(SpectralGap, SparseOnConstrainedChain) {
  const auto chain = constrained_projected_chain(build_hard_instance(4));
  const double dense = spectral_gap(chain.kernel).gap;
  SpectralOptions opts;
  opts.dense_limit = 10;
  EXPECT_NEAR(spectral_gap(chain.kernel, opts).gap, dense, 1e-10);
}

TEST(Dirichlet, ConstantAndIdentity) {
  const auto p = random_reversible(5, 2);
  EXPECT_NEAR(dirichlet_form(p, VectorXd::Constant(5, 3.0)), 0.0, 1e-15);
  const auto id =
      StochasticMatrix::from_dense(MatrixXd::Identity(5, 5), p.stationary(), StateCodec::plain(5));
  EXPECT_NEAR(dirichlet_form(id, VectorXd::LinSpaced(5, 0, 4)), 0.0, 1e-15);
}

TEST(Dirichlet, EdgeSumOracle) {
  const auto p = random_reversible(3, 9);
  VectorXd f(3);
  f << 1.0, 0.0, 1.0;
  const MatrixXd d = p.dense();
  double expect = 0.0;
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) expect += 0.5 * p.stationary()(x) * d(x, y) * std::pow(f(x) - f(y), 2);
  }
  EXPECT_NEAR(dirichlet_form(p, f), expect, 1e-12);
}

TEST(Variance, Cases) {
  VectorXd pi(4);
  pi << 0.25, 0.25, 0.4, 0.1;
  EXPECT_NEAR(variance(pi, VectorXd::Constant(4, 2.0)), 0.0, 1e-15);
  VectorXd ind(4);
  ind << 1, 1, 0, 0;
  EXPECT_NEAR(variance(pi, ind), 0.25, 1e-15);
  VectorXd f(4);
  f << 0.3, -1.2, 4.0, 2.5;
  const double mean = pi.dot(f);
  double expect = 0.0;
  for (int x = 0; x < 4; ++x) expect += pi(x) * (f(x) - mean) * (f(x) - mean);
  EXPECT_NEAR(variance(pi, f), expect, 1e-12);
}

TEST(Dirichlet, GapIsMinimalRatio) {
  const auto p = random_reversible(8, 3);
  const double gap = spectral_gap(p).gap;
  RandomStream rng(5, 1);
  for (int t = 0; t < 100; ++t) {
    VectorXd f(8);
    for (Index x = 0; x < 8; ++x) f(x) = rng.uniform() - 0.5;
    EXPECT_GE(dirichlet_form(p, f), gap * variance(p.stationary(), f) - 1e-12);
  }
}

TEST(Cheeger, DisconnectedAndComplete) {
  MatrixXd block = MatrixXd::Zero(4, 4);
  block.topLeftCorner(2, 2).setConstant(0.5);
  block.bottomRightCorner(2, 2).setConstant(0.5);
  const auto p = StochasticMatrix::from_dense(block, VectorXd::Constant(4, 0.25), StateCodec::plain(4));
  std::vector<Index> left = {0, 1};
  EXPECT_NEAR(cheeger_ratio(p, left), 0.0, 1e-15);
  // flow 1/4 over min mass 1/2
  EXPECT_NEAR(cheeger_ratio(two_state(0.5, 0.5), std::vector<Index>{0}), 0.5, 1e-15);
  EXPECT_THROW(cheeger_ratio(p, std::vector<Index>{}), ArgumentError);
  EXPECT_THROW(cheeger_ratio(p, std::vector<Index>{0, 1, 2, 3}), ArgumentError);
}

TEST(Cheeger, GapBelowTwiceConductance) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = random_reversible(7, seed);
    const double gap = spectral_gap(p).gap;
    RandomStream rng(seed, 3);
    for (int t = 0; t < 20; ++t) {
      std::vector<Index> subset;
      for (Index x = 0; x < 7; ++x) {
        if (rng.uniform() < 0.5) subset.push_back(x);
      }
      if (subset.empty() || subset.size() == 7) continue;
      EXPECT_LE(gap, 2.0 * cheeger_ratio(p, subset) + 1e-12);
    }
  }
}

TEST(TvBound, ClosedForms) {
  EXPECT_DOUBLE_EQ(tv_bound(4.0, 0.3, 0.0), 2.0);
  EXPECT_DOUBLE_EQ(tv_bound(9.0, 0.0, 50.0), 3.0);
  EXPECT_NEAR(tv_bound(4.0, 0.5, 2.0), 2.0 * std::exp(-1.0), 1e-15);
}
