#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "tempering/measure.hpp"
#include "tempering/stochastic_matrix.hpp"

namespace tempering {

// One edge of P1: an adjacent swap of levels (i-1, i), i in [1, L], or a
// replacement of the level-0 mode by k.
struct Move {
  enum class Kind { kAdjSwap, kSetLevel0 };
  Kind kind = Kind::kAdjSwap;
  int index = 1;

  static Move adj_swap(int level) { return {Kind::kAdjSwap, level}; }
  static Move set_level0(int mode) { return {Kind::kSetLevel0, mode}; }
  bool operator==(const Move&) const = default;
};

struct MoveSequence {
  ProductAssignment start;
  std::vector<Move> moves;
};

// Recursive swap of the contents of levels i < j through adjacent swaps:
// Swap(i, mid), Swap(mid, j), Swap(i, mid) with mid = floor((i+j)/2).
std::vector<Move> swap_sequence(int i, int j);

// F(1) = 1, F(l) = 2 F(floor(l/2)) + F(ceil(l/2)); the length of
// swap_sequence over distance l.
std::int64_t path_length_F(std::int64_t ell);

// Applies one move in place. Throws ArgumentError for an out-of-range move.
void apply_move(ProductAssignment& lambda, const Move& move, int num_modes);

ProductAssignment apply_moves(const ProductAssignment& lambda, std::span<const Move> moves,
                              int num_modes);

// Every state visited, starting with lambda: moves.size() + 1 entries.
std::vector<ProductAssignment> path_states(const ProductAssignment& lambda,
                                           std::span<const Move> moves, int num_modes);

// Largest Hamming distance from lambda over all visited states.
int max_divergence(const ProductAssignment& lambda, std::span<const Move> moves, int num_modes);

// max_divergence of swap_sequence(0, ell) applied to distinct labels: the
// worst-case divergence over distance ell (D in the length/divergence pair).
int divergence_D(int ell);

// Smallest mode attaining max_k pi_L(A_k).
int k_star(const TemperedFamily& family);

// SetLevel0(k*), Swap(0, i), SetLevel0(k), Swap(0, i), SetLevel0(lambda_0):
// a path from lambda to lambda_[i,k] of length 3 + 2 F(i). For i = 0 it is
// the single move SetLevel0(k).
MoveSequence level0_path(const ProductAssignment& lambda, int level, int mode, int kstar);

// A path through state indices; |gamma| = states.size() - 1.
struct StatePath {
  std::vector<Index> states;
};

using PathVisitor = std::function<void(const StatePath&)>;
using PathGenerator = std::function<void(const PathVisitor&)>;

struct CongestionReport {
  double c = 0.0;
  // Directed P1 edge (tau, tau~) attaining c.
  std::pair<Index, Index> argmax_edge{-1, -1};
  // sum over paths through the edge of |gamma| * pi(x) P2(x, y).
  std::map<std::pair<Index, Index>, double> per_edge_loads;
  Index num_paths = 0;
};

// Congestion of a path family for comparing P2 against P1. Every P2 edge
// x != y needs exactly one path; steps that stay put count towards |gamma|
// but carry no load. Throws ContractError on a step that is not a P1 edge
// or a path whose endpoints are not a P2 edge.
CongestionReport congestion(const StochasticMatrix& p1, const StochasticMatrix& p2,
                            const PathGenerator& paths);
CongestionReport congestion(const StochasticMatrix& p1, const StochasticMatrix& p2,
                            std::span<const StatePath> paths);

// Lazy generator of the level-0 paths for every (lambda, i, k), k != lambda_i,
// over the mixed-radix assignment space.
PathGenerator canonical_paths(const TemperedFamily& family,
                              Index budget = kDefaultEnumerationBudget);

struct MultiplicityReport {
  // max over (i, k, step s, edge) of the number of starting assignments
  // whose s-th edge is that edge.
  int max_multiplicity = 0;
  int bound = 0;  // m
  Index paths = 0;
  bool passed = false;
};

struct MultiplicityLimits {
  int max_modes = 3;
  int max_L = 3;
};

MultiplicityReport edge_multiplicity_check(int num_modes, int L, int kstar,
                                           const MultiplicityLimits& limits = {});

struct MassRatioReport {
  // min over paths and visited states of pi_bar(tau) / ((B^d / m) min{...}).
  double worst_ratio = 0.0;
  Index states_checked = 0;
  bool passed = false;
};

// Checks pi_bar(tau) >= (B^d / m) min{pi_bar(lambda), pi_bar(lambda_[i,k])}
// on every visited state of every level-0 path, d = divergence from lambda.
MassRatioReport path_mass_ratio_check(const TemperedFamily& family, double tol = 1e-10,
                                      Index budget = kDefaultEnumerationBudget);

}  // namespace tempering
