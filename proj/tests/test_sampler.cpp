#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>

#include "fixtures.hpp"
#include "tempering/error.hpp"
#include "tempering/hardness.hpp"
#include "tempering/kernels.hpp"
#include "tempering/sampler.hpp"

using namespace tempering;
using tempering::testing::uniform_family;

namespace {

TemperedFamily bimodal_fixture() {
  VectorXd w(4);
  w << 1.0, 2.0, 3.0, 1.5;
  return temper(FiniteTarget::from_weights(w, {0, 0, 1, 1}, 2), TemperatureLadder({0.5, 1.0}));
}

// sigma^2 in sqrt(N) (mean_N f - pi f) -> N(0, sigma^2) for the chain K:
// 2 <f, g>_pi - <f, f>_pi with (I - K) g = f - pi f, pi g = 0.
double asymptotic_variance(const MatrixXd& K, const VectorXd& pi, const VectorXd& f) {
  const Index n = K.rows();
  const VectorXd centered = f.array() - pi.dot(f);
  MatrixXd A = MatrixXd::Identity(n, n) - K;
  A += VectorXd::Ones(n) * pi.transpose();
  const VectorXd g = A.fullPivLu().solve(centered);
  return 2.0 * pi.dot(centered.cwiseProduct(g)) - pi.dot(centered.cwiseProduct(centered));
}

// Indicator over product states that the level-L atom satisfies `pred`.
template <typename Pred>
VectorXd level_indicator(const StochasticMatrix& K, int L, Pred pred) {
  VectorXd f(K.size());
  for (Index x = 0; x < K.size(); ++x) f(x) = pred(K.codec().decode(x)[static_cast<size_t>(L)]) ? 1.0 : 0.0;
  return f;
}

}  // namespace

TEST(Sampler, DeterministicPerSeed) {
  const auto family = bimodal_fixture();
  const SparseMatrix q = uniform_proposal(4);
  const auto a = run_parallel_tempering(family, std::span(&q, 1), 2000, 42);
  const auto b = run_parallel_tempering(family, std::span(&q, 1), 2000, 42);
  const auto c = run_parallel_tempering(family, std::span(&q, 1), 2000, 43);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.swap_accepts, b.swap_accepts);
  EXPECT_NE(a.samples, c.samples);
}

TEST(Sampler, ShapesAndCounters) {
  const auto family = tempering::testing::small_random_family(3, 2, 4);
  const SparseMatrix q = uniform_proposal(family.num_atoms());
  const auto trace = run_parallel_tempering(family, std::span(&q, 1), 500, 1);
  EXPECT_EQ(trace.samples.rows(), 500);
  EXPECT_EQ(trace.samples.cols(), 3);
  ASSERT_EQ(trace.swap_attempts.size(), 2u);
  for (int i = 0; i < 2; ++i) {
    EXPECT_EQ(trace.swap_attempts[static_cast<size_t>(i)], 500);
    EXPECT_LE(trace.swap_accepts[static_cast<size_t>(i)], 500);
  }
}

TEST(Sampler, UniformFamilyAcceptsEverySwap) {
  const auto family = uniform_family(2, 3, 2);
  const SparseMatrix q = uniform_proposal(4);
  const auto trace = run_parallel_tempering(family, std::span(&q, 1), 300, 7);
  for (const auto& rate : swap_stats(trace)) {
    ASSERT_TRUE(rate.has_value());
    EXPECT_EQ(*rate, 1.0);
  }
}

TEST(Sampler, IdentityProposalNeverMoves) {
  const auto family = tempering::testing::small_random_family(2, 0, 3);
  const SparseMatrix q = identity_proposal(family.num_atoms());
  const auto trace = run_parallel_tempering(family, std::span(&q, 1), 200, 5, std::vector<Index>{2});
  EXPECT_TRUE((trace.samples.array() == 2).all());
}

TEST(Sampler, RejectsAsymmetricProposal) {
  const auto family = bimodal_fixture();
  MatrixXd dense = MatrixXd::Zero(4, 4);
  dense(0, 1) = dense(1, 2) = dense(2, 3) = dense(3, 0) = 1.0;
  const SparseMatrix q = dense.sparseView();
  EXPECT_THROW(run_parallel_tempering(family, std::span(&q, 1), 10, 1), ArgumentError);
}

TEST(SwapStats, AbsentWithoutAttempts) {
  PTTrace trace;
  trace.L = 2;
  trace.swap_attempts = {0, 4};
  trace.swap_accepts = {0, 3};
  const auto rates = swap_stats(trace);
  ASSERT_EQ(rates.size(), 2u);
  EXPECT_FALSE(rates[0].has_value());
  EXPECT_DOUBLE_EQ(*rates[1], 0.75);
}

TEST(SwapStats, HardInstanceMatchesExactAcceptance) {
  const auto family = hard_instance_family(build_hard_instance(3));
  const MatrixXd& p = family.levels();
  const SparseMatrix q = uniform_proposal(family.num_atoms());
  const int replicas = 20;
  std::vector<double> sum(3, 0.0), sum_sq(3, 0.0);
  for (int r = 0; r < replicas; ++r) {
    const auto trace = run_parallel_tempering(family, std::span(&q, 1), 5000, 100 + r);
    const auto rates = swap_stats(trace);
    for (size_t i = 0; i < 3; ++i) {
      sum[i] += *rates[i];
      sum_sq[i] += *rates[i] * *rates[i];
    }
  }
  for (int i = 1; i <= 3; ++i) {
    double exact = 0.0;
    for (Index x = 0; x < 4; ++x) {
      for (Index y = 0; y < 4; ++y) {
        exact += std::min(p(i - 1, x) * p(i, y), p(i - 1, y) * p(i, x));
      }
    }
    const double mean = sum[static_cast<size_t>(i - 1)] / replicas;
    const double var = (sum_sq[static_cast<size_t>(i - 1)] - replicas * mean * mean) / (replicas - 1);
    EXPECT_LE(std::abs(mean - exact), 3.0 * std::sqrt(var / replicas) + 2e-3) << "pair " << i;
  }
}

TEST(Sampler, OccupancyMatchesExactMasses) {
  const auto family = bimodal_fixture();
  const SparseMatrix q = uniform_proposal(4);
  const auto K = algorithm1_kernel(family, q);
  const VectorXd pi = K.stationary();
  const VectorXd f = level_indicator(K, 1, [&](int atom) { return family.target().mode_of(atom) == 1; });
  const double sigma2 = asymptotic_variance(K.dense(), pi, f);
  const double exact = family.block_masses()(1, 1);
  const Index N = 100000;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto trace = run_parallel_tempering(family, std::span(&q, 1), N, seed);
    const VectorXd occ = mode_occupancy(trace, family.target(), 1);
    EXPECT_LE(std::abs(occ(1) - exact), 3.0 * std::sqrt(sigma2 / N)) << "seed " << seed;
    EXPECT_NEAR(occ.sum(), 1.0, 1e-12);
  }
}

TEST(Sampler, OneSweepPreservesProductLaw) {
  const auto family = bimodal_fixture();
  const SparseMatrix q = uniform_proposal(4);
  PTSweep sweep(family, std::span(&q, 1));
  PTStreams streams(2024, family.L());
  const int replicas = 100000;
  MatrixXd counts = MatrixXd::Zero(2, 4);
  std::vector<Index> state(2);
  for (int r = 0; r < replicas; ++r) {
    for (int i = 0; i < 2; ++i) state[static_cast<size_t>(i)] = sample_atom(family.levels().row(i).transpose(), streams.init);
    sweep.step(state, streams.levels, streams.swaps);
    for (int i = 0; i < 2; ++i) counts(i, state[static_cast<size_t>(i)]) += 1.0;
  }
  for (int i = 0; i < 2; ++i) {
    for (int x = 0; x < 4; ++x) {
      const double p = family.levels()(i, x);
      EXPECT_LE(std::abs(counts(i, x) / replicas - p), 3.0 * std::sqrt(p * (1 - p) / replicas) + 1e-3)
          << "level " << i << " atom " << x;
    }
  }
}

TEST(EmpiricalTv, SelfReferenceAndDisjointSupport) {
  const auto family = bimodal_fixture();
  const SparseMatrix q = uniform_proposal(4);
  const auto trace = run_parallel_tempering(family, std::span(&q, 1), 1000, 9);
  VectorXd freq = VectorXd::Zero(4);
  for (Index n = 100; n < 1000; ++n) freq(trace.samples(n, 1)) += 1.0;
  freq /= 900.0;
  EXPECT_NEAR(empirical_tv(trace, freq, 100), 0.0, 1e-15);

  const SparseMatrix id = identity_proposal(4);
  const auto frozen = run_parallel_tempering(family, std::span(&id, 1), 50, 1, std::vector<Index>{0, 0});
  VectorXd elsewhere = VectorXd::Zero(4);
  elsewhere(3) = 1.0;
  EXPECT_DOUBLE_EQ(empirical_tv(frozen, elsewhere, 0), 1.0);
  EXPECT_THROW(empirical_tv(frozen, elsewhere, 50), ArgumentError);
}

TEST(EmpiricalTv, ConvergedRunWithinCltMargin) {
  const auto family = bimodal_fixture();
  const SparseMatrix q = uniform_proposal(4);
  const auto K = algorithm1_kernel(family, q);
  const VectorXd target = family.levels().row(1).transpose();
  const Index N = 50000;
  const Index burn = 1000;
  double margin = 0.0;
  for (int atom = 0; atom < 4; ++atom) {
    const VectorXd f = level_indicator(K, 1, [&](int a) { return a == atom; });
    margin += 0.5 * 4.0 * std::sqrt(asymptotic_variance(K.dense(), K.stationary(), f) / (N - burn));
  }
  const auto trace = run_parallel_tempering(family, std::span(&q, 1), N, 11);
  EXPECT_LE(empirical_tv(trace, target, burn), margin);
}
