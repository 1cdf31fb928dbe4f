#pragma once

#include <vector>

#include "tempering/kernels.hpp"
#include "tempering/paths.hpp"
#include "tempering/spectral.hpp"

namespace tempering {

struct LowerBoundOptions {
  Index budget = kDefaultEnumerationBudget;
  // Slack allowed in every inequality.
  double tolerance = 1e-8;
  SpectralOptions spectral;
};

struct InequalityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool passed = false;  // lhs >= rhs - tolerance
};

// The comparison pipeline for one family: P1 against P2 through the
// level-0 paths, and the borrowed gap inequalities on the full chain.
struct LowerBoundReport {
  int L = 0;
  int m = 0;
  double phi = 0.0;
  double B = 0.0;

  CongestionReport congestion;
  double gap_P1 = 0.0;
  double gap_P2 = 0.0;
  // c Gap(P1) >= Gap(P2)
  InequalityCheck comparison;

  double gap_pt = 0.0;
  double gap_pt_projected = 0.0;
  double min_restricted_gap = 0.0;  // min over lambda of Gap(P_pt|X_lambda)
  double min_block_gap = 0.0;  // min over i, k of Gap(T_i|A_k)
  // Gap of the projected level kernel T_i-bar, one entry per level.
  std::vector<double> projected_update_gaps;

  // Gap(P_pt) >= Gap(P_pt-bar) min_lambda Gap(P_pt|X_lambda) / 2
  InequalityCheck product_decomposition;
  // min_lambda Gap(P_pt|X_lambda) >= min_{i,k} Gap(T_i|A_k) / (8(L+1))
  InequalityCheck restricted_chain;
  // Gap(P_pt-bar) >= Gap(P1) Gap(T_0-bar) / 4
  InequalityCheck projected_chain;

  bool passed = false;
};

// T_i are Metropolis kernels with 1/2 holding for `proposal`, P_pt = T/2 + Q/2.
LowerBoundReport verify_lower_bound(const TemperedFamily& family, const SparseMatrix& proposal,
                                    const LowerBoundOptions& options = {});

}  // namespace tempering
