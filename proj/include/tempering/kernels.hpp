#pragma once

#include <span>
#include <vector>

#include "tempering/measure.hpp"
#include "tempering/stochastic_matrix.hpp"

namespace tempering {

// Symmetric proposal matrices over the atoms of a target.
SparseMatrix uniform_proposal(Index num_atoms);
SparseMatrix identity_proposal(Index num_atoms);
// Nearest-neighbour walk on a cycle (reflecting to a self-loop when n < 3).
SparseMatrix ring_proposal(Index num_atoms);
// Uniform over the atoms of the current mode: no movement between modes.
SparseMatrix within_mode_proposal(const FiniteTarget& target);

// Metropolis kernel for a symmetric proposal. Off-diagonal entries are
// (1 - holding) * proposal(x,y) * min{1, pi(y)/pi(x)}; the rest of each row
// sits on the diagonal. Throws ArgumentError for an asymmetric proposal.
StochasticMatrix metropolis_level_kernel(const VectorXd& level_dist,
                                         const SparseMatrix& proposal,
                                         double holding = 0.5);

// One Metropolis kernel per level of the family, all sharing `proposal`.
std::vector<StochasticMatrix> level_kernels(const TemperedFamily& family,
                                            const SparseMatrix& proposal,
                                            double holding = 0.5);

// Product law (x)_i pi_i over (theta_0, ..., theta_L), mixed-radix indexed.
VectorXd product_distribution(const TemperedFamily& family,
                              Index budget = kDefaultEnumerationBudget);
StateCodec product_codec(const TemperedFamily& family,
                         Index budget = kDefaultEnumerationBudget);

// T: pick level i w.p. 1/(2(L+1)), move it by T_i, hold everything else;
// the remaining 1/2 holds.
StochasticMatrix product_update_kernel(const TemperedFamily& family,
                                       std::span<const StochasticMatrix> level_kernels,
                                       Index budget = kDefaultEnumerationBudget);

// Q: for each i in [1, L], mass alpha/(2L) on the transposed state
// (i-1, i)theta; remainder holds.
StochasticMatrix swap_kernel(const TemperedFamily& family,
                             Index budget = kDefaultEnumerationBudget);

// P_pt = T/2 + Q/2.
StochasticMatrix pt_kernel(const StochasticMatrix& update, const StochasticMatrix& swap);

// Apply `first`, then `second`: the matrix product first * second.
// Leaves a shared stationary law invariant but is not reversible in general.
StochasticMatrix sequential_composition(const StochasticMatrix& first,
                                        const StochasticMatrix& second);

// One iteration of the literal sampler loop: every level makes a Metropolis
// move (no holding), then swaps i = 1..L are attempted in order.
StochasticMatrix algorithm1_kernel(const TemperedFamily& family,
                                   const SparseMatrix& proposal,
                                   Index budget = kDefaultEnumerationBudget);

// P_bar(k1,k2) = (1/pi(A_k1)) sum_{x in A_k1, y in A_k2} pi(x) P(x,y).
// `labels[x]` is the block of state x; blocks must have positive mass.
StochasticMatrix project(const StochasticMatrix& kernel, std::span<const int> labels,
                         int num_blocks, StateCodec block_codec);
StochasticMatrix project(const StochasticMatrix& kernel, std::span<const int> labels,
                         int num_blocks);

// P|_A(x,y) = P(x,y) + [x = y] P(x, A^c) on the states listed in `subset`.
StochasticMatrix restrict_to(const StochasticMatrix& kernel, std::span<const Index> subset);

// Block label (assignment index) of every product state.
std::vector<int> assignment_labels(const TemperedFamily& family,
                                   Index budget = kDefaultEnumerationBudget);

// Product states theta with proj(theta) = lambda.
std::vector<Index> assignment_fiber(const TemperedFamily& family, std::span<const int> lambda,
                                    Index budget = kDefaultEnumerationBudget);

// Q_bar in closed form: Q_bar(lambda, (i-1,i)lambda) equals
// swap_acceptance_marginal(i, lambda_{i-1}, lambda_i) / (2L).
StochasticMatrix projected_swap_kernel(const TemperedFamily& family,
                                       Index budget = kDefaultEnumerationBudget);

// T_i projected onto the mode partition: an m x m chain at level i.
StochasticMatrix projected_update_kernel(const TemperedFamily& family,
                                         const StochasticMatrix& level_kernel, int level);

// P1 = Q_bar/2 + refresh of lambda_0 from pi_0(A_.) w.p. 1/(2(L+1)) + hold.
StochasticMatrix aux_chain_P1(const TemperedFamily& family,
                              Index budget = kDefaultEnumerationBudget);

// P2: pick i uniformly from {0..L}, redraw lambda_i from pi_i(A_.).
StochasticMatrix aux_chain_P2(const TemperedFamily& family,
                              Index budget = kDefaultEnumerationBudget);

}  // namespace tempering
