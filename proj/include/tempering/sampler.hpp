#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tempering/measure.hpp"
#include "tempering/random.hpp"
#include "tempering/stochastic_matrix.hpp"

namespace tempering {

struct PTTrace {
  int L = 0;
  Index N = 0;
  std::uint64_t seed = 0;
  // Row n holds (theta_0^n, ..., theta_L^n) after iteration n+1: N x (L+1).
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> samples;
  // Entry i-1 counts swaps proposed / accepted between levels i-1 and i.
  std::vector<Index> swap_attempts;
  std::vector<Index> swap_accepts;
};

// Random streams used by the sampler for seed s: level i draws its proposals
// and acceptances from stream i, the swap sweep from stream L+1 and the
// initial state from stream L+2.
struct PTStreams {
  PTStreams(std::uint64_t seed, int L);
  std::vector<RandomStream> levels;
  RandomStream swaps;
  RandomStream init;
};

// One iteration of the sampler loop, kept separate so replicas can be driven
// from chosen states.
class PTSweep {
 public:
  // One symmetric proposal per level, or a single one shared by all levels.
  PTSweep(const TemperedFamily& family, std::span<const SparseMatrix> proposals);

  int L() const { return family_.L(); }

  // Updates every level by a Metropolis move, then attempts swaps i = 1..L in
  // order. `attempts`/`accepts` (size L) are incremented when given.
  void step(std::span<Index> state, std::vector<RandomStream>& level_streams,
            RandomStream& swap_stream, std::vector<Index>* attempts = nullptr,
            std::vector<Index>* accepts = nullptr) const;

 private:
  Index propose(int level, Index from, RandomStream& rng) const;

  const TemperedFamily& family_;
  std::vector<SparseMatrix> proposals_;
};

// Runs N iterations. Without `init` every level starts at an atom drawn
// uniformly. Deterministic in (family, proposals, N, seed, init).
PTTrace run_parallel_tempering(const TemperedFamily& family,
                               std::span<const SparseMatrix> proposals, Index N,
                               std::uint64_t seed,
                               const std::optional<std::vector<Index>>& init = std::nullopt);

// 1/2 sum |empirical - reference| over atoms, using iterations after
// `burn_in`. With all_levels, the frequencies pool every level and the
// reference must then be the mean of the levels.
double empirical_tv(const PTTrace& trace, const VectorXd& reference, Index burn_in,
                    bool all_levels = false);

// Occupancy of each mode at `level` after burn_in.
VectorXd mode_occupancy(const PTTrace& trace, const FiniteTarget& target, int level,
                        Index burn_in = 0);

// accepts / attempts per adjacent pair; empty when no swap was attempted.
std::vector<std::optional<double>> swap_stats(const PTTrace& trace);

// Draws an atom from `dist` by inverse CDF.
Index sample_atom(const VectorXd& dist, RandomStream& rng);

}  // namespace tempering
