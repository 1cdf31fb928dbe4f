#include "tempering/lower_bound.hpp"

#include <algorithm>
#include <limits>

namespace tempering {

namespace {

InequalityCheck at_least(double lhs, double rhs, double tol) { return {lhs, rhs, lhs >= rhs - tol}; }

}  // namespace

LowerBoundReport verify_lower_bound(const TemperedFamily& family, const SparseMatrix& proposal,
                                    const LowerBoundOptions& options) {
  LowerBoundReport r;
  r.L = family.L();
  r.m = family.num_modes();
  r.phi = r.L >= 1 ? overlap_phi(family) : 1.0;
  r.B = bottleneck_ratio(family);

  const StochasticMatrix p1 = aux_chain_P1(family, options.budget);
  const StochasticMatrix p2 = aux_chain_P2(family, options.budget);
  r.congestion = congestion(p1, p2, canonical_paths(family, options.budget));
  r.gap_P1 = spectral_gap(p1, options.spectral).gap;
  r.gap_P2 = spectral_gap(p2, options.spectral).gap;
  r.comparison = at_least(r.congestion.c * r.gap_P1, r.gap_P2, options.tolerance);

  const auto levels = level_kernels(family, proposal);
  const StochasticMatrix update = product_update_kernel(family, levels, options.budget);
  const StochasticMatrix pt = r.L >= 1 ? pt_kernel(update, swap_kernel(family, options.budget))
                                       : update;
  r.gap_pt = spectral_gap(pt, options.spectral).gap;

  const auto labels = assignment_labels(family, options.budget);
  const auto num_assignments = static_cast<int>(p1.size());
  const StochasticMatrix projected = project(pt, labels, num_assignments, p1.codec());
  r.gap_pt_projected = spectral_gap(projected, options.spectral).gap;

  std::vector<std::vector<Index>> fibers(static_cast<size_t>(num_assignments));
  for (Index x = 0; x < static_cast<Index>(labels.size()); ++x) {
    fibers[static_cast<size_t>(labels[static_cast<size_t>(x)])].push_back(x);
  }
  r.min_restricted_gap = std::numeric_limits<double>::infinity();
  for (const auto& fiber : fibers) {
    r.min_restricted_gap =
        std::min(r.min_restricted_gap, spectral_gap(restrict_to(pt, fiber), options.spectral).gap);
  }

  r.min_block_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= r.L; ++i) {
    const StochasticMatrix& ti = levels[static_cast<size_t>(i)];
    for (const auto& block : family.target().blocks()) {
      r.min_block_gap =
          std::min(r.min_block_gap, spectral_gap(restrict_to(ti, block), options.spectral).gap);
    }
    r.projected_update_gaps.push_back(
        spectral_gap(projected_update_kernel(family, ti, i), options.spectral).gap);
  }

  r.product_decomposition =
      at_least(r.gap_pt, 0.5 * r.gap_pt_projected * r.min_restricted_gap, options.tolerance);
  r.restricted_chain =
      at_least(r.min_restricted_gap, r.min_block_gap / (8.0 * (r.L + 1)), options.tolerance);
  r.projected_chain =
      at_least(r.gap_pt_projected, r.gap_P1 * r.projected_update_gaps[0] / 4.0, options.tolerance);
  r.passed = r.comparison.passed && r.product_decomposition.passed &&
             r.restricted_chain.passed && r.projected_chain.passed;
  return r;
}

}  // namespace tempering
