#pragma once

#include <optional>
#include <vector>

#include "tempering/measure.hpp"
#include "tempering/rational.hpp"
#include "tempering/spectral.hpp"
#include "tempering/stochastic_matrix.hpp"

namespace tempering {

// m = L+1 modes, beta_i = (i+1)/(L+1), gamma = (L+1)^3 and, with cross terms
// between modes dropped,
//   pi_i(A_k) proportional to gamma^{2(i+1)k - k^2 + 1}
//                              + sum_{r=0}^{L} gamma^{(2r+1)(i+1) - r^2 - r},
// k = 1..m. Modes are stored 0-based: column k-1 holds A_k.
struct HardInstance {
  int L = 0;
  int m = 0;
  mpz_class gamma;
  // (L+1) x m, rows sum to exactly 1.
  RationalMatrix mode_masses;
  // w_k = gamma^{2k}, V_k = gamma^{-k^2+1}, index k-1.
  std::vector<Rational> w, V;
  // w_{kr} = gamma^{2r+1}, V_{kr} = gamma^{-r^2-r}, index r (same for all k).
  std::vector<Rational> w_r, V_r;
};

HardInstance build_hard_instance(int L);

struct MassCellCheck {
  int level = 0;
  int mode = 0;  // 0-based
  bool dominant = false;  // mode == level
  Rational value;
  // value - lower bound, and for non-dominant cells upper bound - value.
  Rational lower_margin;
  std::optional<Rational> upper_margin;
  bool passed = false;
};

struct ModeMassReport {
  std::vector<MassCellCheck> cells;
  Rational min_margin;
  bool passed = false;
};

// pi_i(A_{i+1}) > 1 - 1/(L+1) and 1/(2(L+1)^3) < pi_i(A_k) < 1/(L+1)^2 for
// k != i+1, compared exactly.
ModeMassReport verify_mode_mass_bounds(const HardInstance& inst);

struct BottleneckReport {
  Rational B;
  Rational bound;  // 1/(L+1)^7
  Rational margin;  // B - bound
  double ratio = 0.0;  // B / bound
  bool passed = false;
};

BottleneckReport verify_bottleneck_bound(const HardInstance& inst);

// The mode-level swap chain started at lambda = identity (lambda_i = A_{i+1}).
struct ConstrainedChain {
  std::vector<ProductAssignment> states;  // states[0] is lambda
  StochasticMatrix kernel;
  // Exact pi_bar restricted to the reachable set and renormalized.
  RationalVector stationary;
  // Exact transition probabilities: one row per state, (target, probability).
  std::vector<std::vector<std::pair<Index, Rational>>> exact_rows;
};

inline constexpr int kMaxConstrainedL = 8;

// States reachable from lambda by adjacent swaps; swap i proposed w.p.
// 1/(2L), accepted w.p. min{1, pi_bar(xi')/pi_bar(xi)}, remainder holds.
// Throws BudgetError above L = max_L.
ConstrainedChain constrained_projected_chain(const HardInstance& inst,
                                             int max_L = kMaxConstrainedL);

// floor(log2 L) - 1.
int divergence_cap(int L);

// Adjacent-swap BFS from lambda keeping every state within divergence_cap(L)
// of lambda. S = {lambda} when the cap is below 2.
std::vector<ProductAssignment> enumerate_S(const HardInstance& inst);

struct BoundCheck {
  double value = 0.0;
  double bound = 0.0;
  bool passed = false;
};

struct CertificateReport {
  int L = 0;
  Index S_size = 0;
  Index Sc_size = 0;
  Rational mass_S, mass_Sc, boundary_flow;
  double cheeger_2phiS = 0.0;
  // cheeger_ratio of the floating kernel, as an independent cross-check.
  double cheeger_2phiS_float = 0.0;
  std::optional<SpectrumReport> spectrum;
  std::optional<double> measured_gap;
  double bound_rhs = 0.0;  // 32 e^2 (1/(L+1))^{floor(log2 L) - 8}
  BoundCheck flow_check;  // flow <= 4e (1/(L+1))^{floor(log2 L) - 2}
  BoundCheck mass_S_check;  // mass_S > 1/(2e)
  BoundCheck mass_Sc_check;  // mass_Sc > 1/(4e (L+1)^6)
  bool gap_check = true;  // measured_gap <= 2 phi(S) + gap_tolerance
  bool final_bound_check = false;  // 2 phi(S) < bound_rhs
  // States with lambda_0 at level L and lambda_L at level 0 all avoid S.
  bool s_tilde_disjoint = false;
  bool passed = false;
};

struct CertificateOptions {
  bool compute_gap = true;
  double gap_tolerance = 1e-8;
  int max_L = kMaxConstrainedL;
  SpectralOptions spectral;
};

CertificateReport certificate(const HardInstance& inst, const CertificateOptions& options = {});

// One atom per mode carrying the instance's level masses, ladder
// beta_i = (i+1)/(L+1).
TemperedFamily hard_instance_family(const HardInstance& inst);

struct FOracleResult {
  int L = 0;
  int f = 0;
  int pad = 0;
  Index states_explored = 0;
};

inline constexpr Index kDefaultFOracleBudget = 20'000'000;

// f(L): the least h such that the sample at level 0 can be carried to level L
// by adjacent swaps while no intermediate state has more than h displaced
// levels among 1..L. Levels -pad .. L+pad are available; -1 picks the largest
// padding that fits the 16-level encoding.
FOracleResult min_divergence_f(int L, int pad = -1, Index budget = kDefaultFOracleBudget);

}  // namespace tempering
