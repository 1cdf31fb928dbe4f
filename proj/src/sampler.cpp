#include "tempering/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "tempering/error.hpp"

namespace tempering {

PTStreams::PTStreams(std::uint64_t seed, int L)
    : swaps(seed, static_cast<std::uint64_t>(L) + 1), init(seed, static_cast<std::uint64_t>(L) + 2) {
  for (int i = 0; i <= L; ++i) levels.emplace_back(seed, static_cast<std::uint64_t>(i));
}

PTSweep::PTSweep(const TemperedFamily& family, std::span<const SparseMatrix> proposals)
    : family_(family) {
  require(proposals.size() == 1 || static_cast<int>(proposals.size()) == family.num_levels(),
          "need one proposal or one per level");
  for (int i = 0; i < family.num_levels(); ++i) {
    const SparseMatrix& q = proposals[proposals.size() == 1 ? 0 : static_cast<size_t>(i)];
    require(q.rows() == family.num_atoms() && q.cols() == family.num_atoms(),
            "proposal size does not match the atom count");
    const SparseMatrix qt = q.transpose();
    require((SparseMatrix(q - qt)).norm() <= 1e-12, "proposal must be symmetric");
    proposals_.push_back(q);
  }
}

Index PTSweep::propose(int level, Index from, RandomStream& rng) const {
  const SparseMatrix& q = proposals_[static_cast<size_t>(level)];
  const double u = rng.uniform();
  double cum = 0.0;
  Index last = from;
  for (SparseMatrix::InnerIterator it(q, from); it; ++it) {
    cum += it.value();
    last = it.col();
    if (u < cum) return it.col();
  }
  return last;
}

void PTSweep::step(std::span<Index> state, std::vector<RandomStream>& level_streams,
                   RandomStream& swap_stream, std::vector<Index>* attempts,
                   std::vector<Index>* accepts) const {
  const MatrixXd& logp = family_.log_levels();
  const int L = family_.L();
  for (int i = 0; i <= L; ++i) {
    RandomStream& rng = level_streams[static_cast<size_t>(i)];
    const Index cur = state[static_cast<size_t>(i)];
    const Index prop = propose(i, cur, rng);
    const double log_ratio = logp(i, prop) - logp(i, cur);
    // The uniform is drawn even when the move is certain, keeping the
    // stream position independent of the outcome.
    const double u = rng.uniform();
    if (log_ratio >= 0.0 || u < std::exp(log_ratio)) state[static_cast<size_t>(i)] = prop;
  }
  for (int i = 1; i <= L; ++i) {
    const Index a = state[static_cast<size_t>(i) - 1];
    const Index b = state[static_cast<size_t>(i)];
    const double log_ratio = logp(i - 1, b) + logp(i, a) - logp(i, b) - logp(i - 1, a);
    const double u = swap_stream.uniform();
    if (attempts) ++(*attempts)[static_cast<size_t>(i) - 1];
    if (log_ratio >= 0.0 || u < std::exp(log_ratio)) {
      std::swap(state[static_cast<size_t>(i) - 1], state[static_cast<size_t>(i)]);
      if (accepts) ++(*accepts)[static_cast<size_t>(i) - 1];
    }
  }
}

PTTrace run_parallel_tempering(const TemperedFamily& family,
                               std::span<const SparseMatrix> proposals, Index N,
                               std::uint64_t seed, const std::optional<std::vector<Index>>& init) {
  require(N >= 1, "need at least one iteration");
  const PTSweep sweep(family, proposals);
  const int L = family.L();
  PTStreams streams(seed, L);

  std::vector<Index> state(static_cast<size_t>(L) + 1);
  if (init) {
    require(static_cast<int>(init->size()) == L + 1, "initial state needs L+1 atoms");
    for (Index x : *init) require(x >= 0 && x < family.num_atoms(), "initial atom out of range");
    state = *init;
  } else {
    for (auto& x : state) {
      x = static_cast<Index>(streams.init.below(static_cast<std::uint64_t>(family.num_atoms())));
    }
  }

  PTTrace trace;
  trace.L = L;
  trace.N = N;
  trace.seed = seed;
  trace.samples.resize(N, L + 1);
  trace.swap_attempts.assign(static_cast<size_t>(L), 0);
  trace.swap_accepts.assign(static_cast<size_t>(L), 0);
  for (Index n = 0; n < N; ++n) {
    sweep.step(state, streams.levels, streams.swaps, &trace.swap_attempts, &trace.swap_accepts);
    for (int i = 0; i <= L; ++i) trace.samples(n, i) = state[static_cast<size_t>(i)];
  }
  return trace;
}

double empirical_tv(const PTTrace& trace, const VectorXd& reference, Index burn_in,
                    bool all_levels) {
  require(burn_in >= 0 && burn_in < trace.N, "burn-in must be below the iteration count");
  VectorXd freq = VectorXd::Zero(reference.size());
  const int first = all_levels ? 0 : trace.L;
  Index count = 0;
  for (Index n = burn_in; n < trace.N; ++n) {
    for (int i = first; i <= trace.L; ++i) {
      const Index x = trace.samples(n, i);
      require(x < reference.size(), "trace atom outside the reference support");
      freq(x) += 1.0;
      ++count;
    }
  }
  freq /= static_cast<double>(count);
  return 0.5 * (freq - reference).cwiseAbs().sum();
}

VectorXd mode_occupancy(const PTTrace& trace, const FiniteTarget& target, int level,
                        Index burn_in) {
  require(level >= 0 && level <= trace.L, "level out of range");
  require(burn_in >= 0 && burn_in < trace.N, "burn-in must be below the iteration count");
  VectorXd occ = VectorXd::Zero(target.num_modes());
  for (Index n = burn_in; n < trace.N; ++n) occ(target.mode_of(trace.samples(n, level))) += 1.0;
  return occ / static_cast<double>(trace.N - burn_in);
}

std::vector<std::optional<double>> swap_stats(const PTTrace& trace) {
  std::vector<std::optional<double>> rates;
  for (size_t i = 0; i < trace.swap_attempts.size(); ++i) {
    if (trace.swap_attempts[i] == 0) {
      rates.emplace_back();
    } else {
      rates.emplace_back(static_cast<double>(trace.swap_accepts[i]) /
                         static_cast<double>(trace.swap_attempts[i]));
    }
  }
  return rates;
}

Index sample_atom(const VectorXd& dist, RandomStream& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (Index x = 0; x < dist.size(); ++x) {
    cum += dist(x);
    if (u < cum) return x;
  }
  return dist.size() - 1;
}

}  // namespace tempering
