#include "tempering/kernels.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>

#include "tempering/error.hpp"

namespace tempering {

namespace {

// radix^(length-1-position): the stride of one coordinate in mixed radix.
std::vector<Index> strides(int radix, int length) {
  std::vector<Index> out(static_cast<size_t>(length), 1);
  for (int j = length - 2; j >= 0; --j) {
    out[static_cast<size_t>(j)] = out[static_cast<size_t>(j) + 1] * radix;
  }
  return out;
}

bool is_symmetric(const SparseMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  const SparseMatrix t = m.transpose();
  const SparseMatrix d = m - t;
  for (Index k = 0; k < d.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(d, k); it; ++it) {
      if (std::abs(it.value()) > tol) return false;
    }
  }
  return true;
}

void check_same_space(const StochasticMatrix& a, const StochasticMatrix& b) {
  require(a.size() == b.size() && a.codec() == b.codec(),
          "kernels act on different state spaces");
  require((a.stationary() - b.stationary()).cwiseAbs().maxCoeff() <= kStochasticTolerance,
          "kernels have different stationary distributions");
}

}  // namespace

SparseMatrix uniform_proposal(Index num_atoms) {
  require(num_atoms >= 1, "proposal needs at least one atom");
  SparseMatrix m = Eigen::MatrixXd::Constant(num_atoms, num_atoms, 1.0 / num_atoms).sparseView();
  return m;
}

SparseMatrix identity_proposal(Index num_atoms) {
  require(num_atoms >= 1, "proposal needs at least one atom");
  SparseMatrix m(num_atoms, num_atoms);
  m.setIdentity();
  return m;
}

SparseMatrix ring_proposal(Index num_atoms) {
  require(num_atoms >= 1, "proposal needs at least one atom");
  std::vector<Triplet> t;
  for (Index x = 0; x < num_atoms; ++x) {
    t.emplace_back(x, (x + 1) % num_atoms, 0.5);
    t.emplace_back(x, (x + num_atoms - 1) % num_atoms, 0.5);
  }
  SparseMatrix m(num_atoms, num_atoms);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix within_mode_proposal(const FiniteTarget& target) {
  std::vector<Triplet> t;
  for (const auto& block : target.blocks()) {
    const double w = 1.0 / static_cast<double>(block.size());
    for (Index x : block) {
      for (Index y : block) t.emplace_back(x, y, w);
    }
  }
  SparseMatrix m(target.num_atoms(), target.num_atoms());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

StochasticMatrix metropolis_level_kernel(const VectorXd& level_dist, const SparseMatrix& proposal,
                                         double holding) {
  const Index n = level_dist.size();
  require(proposal.rows() == n && proposal.cols() == n, "proposal has the wrong size");
  require(holding >= 0.0 && holding < 1.0, "holding probability must lie in [0, 1)");
  require(is_symmetric(proposal, 1e-12),
          "proposal must be symmetric (Hastings correction is not supported)");
  std::vector<Triplet> t;
  for (Index x = 0; x < n; ++x) {
    double moved = 0.0;
    for (SparseMatrix::InnerIterator it(proposal, x); it; ++it) {
      const Index y = it.col();
      if (y == x) continue;
      const double accept =
          level_dist(x) > 0.0 ? std::min(1.0, level_dist(y) / level_dist(x)) : 1.0;
      const double p = (1.0 - holding) * it.value() * accept;
      if (p > 0.0) {
        t.emplace_back(x, y, p);
        moved += p;
      }
    }
    t.emplace_back(x, x, 1.0 - moved);
  }
  return StochasticMatrix::from_triplets(n, t, level_dist / level_dist.sum(),
                                         StateCodec::plain(n, "atom"));
}

std::vector<StochasticMatrix> level_kernels(const TemperedFamily& family,
                                            const SparseMatrix& proposal, double holding) {
  std::vector<StochasticMatrix> out;
  for (int i = 0; i < family.num_levels(); ++i) {
    out.push_back(metropolis_level_kernel(family.levels().row(i).transpose(), proposal, holding));
  }
  return out;
}

VectorXd product_distribution(const TemperedFamily& family, Index budget) {
  const Index size = checked_power(static_cast<int>(family.num_atoms()), family.num_levels(), budget);
  VectorXd out(size);
  const int n = static_cast<int>(family.num_atoms());
  std::vector<int> theta(static_cast<size_t>(family.num_levels()));
  for (Index s = 0; s < size; ++s) {
    decode_mixed_radix(s, n, theta);
    double p = 1.0;
    for (int i = 0; i < family.num_levels(); ++i) p *= family.levels()(i, theta[static_cast<size_t>(i)]);
    out(s) = p;
  }
  return out;
}

StateCodec product_codec(const TemperedFamily& family, Index budget) {
  checked_power(static_cast<int>(family.num_atoms()), family.num_levels(), budget);
  return StateCodec::mixed_radix(static_cast<int>(family.num_atoms()), family.num_levels(),
                                 "product");
}

StochasticMatrix product_update_kernel(const TemperedFamily& family,
                                       std::span<const StochasticMatrix> kernels, Index budget) {
  const int levels = family.num_levels();
  const int n = static_cast<int>(family.num_atoms());
  require(static_cast<int>(kernels.size()) == levels, "one level kernel per level is required");
  for (int i = 0; i < levels; ++i) {
    const auto& k = kernels[static_cast<size_t>(i)];
    require(k.size() == n, "level kernel has the wrong size");
    require((k.stationary() - family.levels().row(i).transpose()).cwiseAbs().maxCoeff() <=
                kStochasticTolerance,
            "level kernel does not target its level");
  }
  const Index size = checked_power(n, levels, budget);
  const auto stride = strides(n, levels);
  const double pick = 1.0 / (2.0 * levels);
  std::vector<Triplet> t;
  std::vector<int> theta(static_cast<size_t>(levels));
  for (Index s = 0; s < size; ++s) {
    decode_mixed_radix(s, n, theta);
    t.emplace_back(s, s, 0.5);
    for (int i = 0; i < levels; ++i) {
      const int x = theta[static_cast<size_t>(i)];
      const SparseMatrix& ki = kernels[static_cast<size_t>(i)].entries();
      for (SparseMatrix::InnerIterator it(ki, x); it; ++it) {
        t.emplace_back(s, s + (it.col() - x) * stride[static_cast<size_t>(i)], pick * it.value());
      }
    }
  }
  return StochasticMatrix::from_triplets(size, t, product_distribution(family, budget),
                                         product_codec(family, budget));
}

StochasticMatrix swap_kernel(const TemperedFamily& family, Index budget) {
  const int L = family.L();
  require(L >= 1, "the swap kernel needs at least two levels");
  const int n = static_cast<int>(family.num_atoms());
  const Index size = checked_power(n, L + 1, budget);
  const auto stride = strides(n, L + 1);
  const MatrixXd& lp = family.log_levels();
  const double propose = 1.0 / (2.0 * L);
  std::vector<Triplet> t;
  std::vector<int> theta(static_cast<size_t>(L) + 1);
  for (Index s = 0; s < size; ++s) {
    decode_mixed_radix(s, n, theta);
    double stay = 0.5;
    for (int i = 1; i <= L; ++i) {
      const int x = theta[static_cast<size_t>(i) - 1];
      const int y = theta[static_cast<size_t>(i)];
      if (x == y) {
        stay += propose;
        continue;
      }
      const double log_ratio = lp(i - 1, y) + lp(i, x) - lp(i, y) - lp(i - 1, x);
      const double alpha = std::exp(std::min(0.0, log_ratio));
      const Index target = s + static_cast<Index>(y - x) * stride[static_cast<size_t>(i) - 1] +
                           static_cast<Index>(x - y) * stride[static_cast<size_t>(i)];
      t.emplace_back(s, target, propose * alpha);
      stay += propose * (1.0 - alpha);
    }
    t.emplace_back(s, s, stay);
  }
  return StochasticMatrix::from_triplets(size, t, product_distribution(family, budget),
                                         product_codec(family, budget));
}

StochasticMatrix pt_kernel(const StochasticMatrix& update, const StochasticMatrix& swap) {
  check_same_space(update, swap);
  SparseMatrix mix = 0.5 * update.entries() + 0.5 * swap.entries();
  return StochasticMatrix(std::move(mix), update.stationary(), update.codec());
}

StochasticMatrix sequential_composition(const StochasticMatrix& first,
                                        const StochasticMatrix& second) {
  check_same_space(first, second);
  SparseMatrix product = first.entries() * second.entries();
  return StochasticMatrix(std::move(product), first.stationary(), first.codec());
}

StochasticMatrix algorithm1_kernel(const TemperedFamily& family, const SparseMatrix& proposal,
                                   Index budget) {
  const int L = family.L();
  const int n = static_cast<int>(family.num_atoms());
  const Index size = checked_power(n, L + 1, budget);
  const auto moves = level_kernels(family, proposal, 0.0);
  SparseMatrix update = moves.front().entries();
  for (int i = 1; i <= L; ++i) {
    SparseMatrix next = Eigen::kroneckerProduct(update, moves[static_cast<size_t>(i)].entries());
    update = std::move(next);
  }
  const auto stride = strides(n, L + 1);
  const MatrixXd& lp = family.log_levels();
  std::vector<int> theta(static_cast<size_t>(L) + 1);
  SparseMatrix kernel = update;
  for (int i = 1; i <= L; ++i) {
    std::vector<Triplet> t;
    for (Index s = 0; s < size; ++s) {
      decode_mixed_radix(s, n, theta);
      const int x = theta[static_cast<size_t>(i) - 1];
      const int y = theta[static_cast<size_t>(i)];
      if (x == y) {
        t.emplace_back(s, s, 1.0);
        continue;
      }
      const double alpha = std::exp(std::min(0.0, lp(i - 1, y) + lp(i, x) - lp(i, y) - lp(i - 1, x)));
      const Index target = s + static_cast<Index>(y - x) * stride[static_cast<size_t>(i) - 1] +
                           static_cast<Index>(x - y) * stride[static_cast<size_t>(i)];
      t.emplace_back(s, target, alpha);
      t.emplace_back(s, s, 1.0 - alpha);
    }
    SparseMatrix sweep(size, size);
    sweep.setFromTriplets(t.begin(), t.end());
    SparseMatrix next = kernel * sweep;
    kernel = std::move(next);
  }
  return StochasticMatrix(std::move(kernel), product_distribution(family, budget),
                          product_codec(family, budget));
}

StochasticMatrix project(const StochasticMatrix& kernel, std::span<const int> labels,
                         int num_blocks, StateCodec block_codec) {
  require(static_cast<Index>(labels.size()) == kernel.size(), "one block label per state");
  require(num_blocks >= 1, "projection needs at least one block");
  require(block_codec.size() == num_blocks, "block codec has the wrong size");
  const VectorXd& pi = kernel.stationary();
  VectorXd mass = VectorXd::Zero(num_blocks);
  for (Index x = 0; x < kernel.size(); ++x) {
    const int b = labels[static_cast<size_t>(x)];
    require(b >= 0 && b < num_blocks, "block label out of range");
    mass(b) += pi(x);
  }
  for (int b = 0; b < num_blocks; ++b) {
    require(mass(b) > 0.0, "block " + std::to_string(b) + " has no stationary mass");
  }
  Eigen::MatrixXd flow = Eigen::MatrixXd::Zero(num_blocks, num_blocks);
  const SparseMatrix& p = kernel.entries();
  for (Index x = 0; x < p.outerSize(); ++x) {
    const int bx = labels[static_cast<size_t>(x)];
    for (SparseMatrix::InnerIterator it(p, x); it; ++it) {
      flow(bx, labels[static_cast<size_t>(it.col())]) += pi(x) * it.value();
    }
  }
  Eigen::MatrixXd projected = mass.cwiseInverse().asDiagonal() * flow;
  // Renormalize rows against accumulated rounding.
  for (Index b = 0; b < projected.rows(); ++b) projected.row(b) /= projected.row(b).sum();
  return StochasticMatrix::from_dense(projected, mass / mass.sum(), std::move(block_codec));
}

StochasticMatrix project(const StochasticMatrix& kernel, std::span<const int> labels,
                         int num_blocks) {
  return project(kernel, labels, num_blocks, StateCodec::plain(num_blocks, "block"));
}

StochasticMatrix restrict_to(const StochasticMatrix& kernel, std::span<const Index> subset) {
  require(!subset.empty(), "restriction needs a nonempty set");
  std::vector<Index> position(static_cast<size_t>(kernel.size()), -1);
  std::vector<std::vector<int>> states;
  VectorXd pi(static_cast<Index>(subset.size()));
  for (size_t a = 0; a < subset.size(); ++a) {
    const Index x = subset[a];
    require(x >= 0 && x < kernel.size(), "subset state out of range");
    require(position[static_cast<size_t>(x)] < 0, "subset lists a state twice");
    position[static_cast<size_t>(x)] = static_cast<Index>(a);
    states.push_back(kernel.codec().decode(x));
    pi(static_cast<Index>(a)) = kernel.stationary()(x);
  }
  require(pi.sum() > 0.0, "restriction set has no stationary mass");
  std::vector<Triplet> t;
  const SparseMatrix& p = kernel.entries();
  for (size_t a = 0; a < subset.size(); ++a) {
    double escaped = 0.0;
    for (SparseMatrix::InnerIterator it(p, subset[a]); it; ++it) {
      const Index b = position[static_cast<size_t>(it.col())];
      if (b < 0) {
        escaped += it.value();
      } else {
        t.emplace_back(static_cast<Index>(a), b, it.value());
      }
    }
    t.emplace_back(static_cast<Index>(a), static_cast<Index>(a), escaped);
  }
  return StochasticMatrix::from_triplets(static_cast<Index>(subset.size()), t, pi / pi.sum(),
                                         StateCodec::explicit_states(std::move(states),
                                                                     kernel.codec().label()));
}

std::vector<int> assignment_labels(const TemperedFamily& family, Index budget) {
  const int levels = family.num_levels();
  const int n = static_cast<int>(family.num_atoms());
  const Index size = checked_power(n, levels, budget);
  std::vector<int> labels(static_cast<size_t>(size));
  std::vector<int> theta(static_cast<size_t>(levels));
  for (Index s = 0; s < size; ++s) {
    decode_mixed_radix(s, n, theta);
    for (int& x : theta) x = family.target().mode_of(x);
    labels[static_cast<size_t>(s)] = static_cast<int>(encode_mixed_radix(theta, family.num_modes()));
  }
  return labels;
}

std::vector<Index> assignment_fiber(const TemperedFamily& family, std::span<const int> lambda,
                                    Index budget) {
  const auto codec = assignment_codec(family, budget);
  const int target = static_cast<int>(codec.encode(lambda));
  const auto labels = assignment_labels(family, budget);
  std::vector<Index> out;
  for (size_t s = 0; s < labels.size(); ++s) {
    if (labels[s] == target) out.push_back(static_cast<Index>(s));
  }
  return out;
}

namespace {

// marginal(i, k1, k2) for every level pair, indexed [i-1](k1, k2).
std::vector<Eigen::MatrixXd> marginal_table(const TemperedFamily& family) {
  std::vector<Eigen::MatrixXd> table;
  const int m = family.num_modes();
  for (int i = 1; i <= family.L(); ++i) {
    Eigen::MatrixXd t(m, m);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) t(a, b) = swap_acceptance_marginal(family, i, a, b);
    }
    table.push_back(std::move(t));
  }
  return table;
}

// Adds weight * Q_bar(lambda, .) off-diagonal moves to `t`; returns their total.
double add_projected_swaps(const std::vector<Eigen::MatrixXd>& table, Index s,
                           std::span<const int> lambda, const std::vector<Index>& stride,
                           double weight, std::vector<Triplet>& t) {
  const int L = static_cast<int>(lambda.size()) - 1;
  double moved = 0.0;
  for (int i = 1; i <= L; ++i) {
    const int a = lambda[static_cast<size_t>(i) - 1];
    const int b = lambda[static_cast<size_t>(i)];
    if (a == b) continue;
    const double p = weight * table[static_cast<size_t>(i) - 1](a, b) / (2.0 * L);
    const Index target = s + static_cast<Index>(b - a) * stride[static_cast<size_t>(i) - 1] +
                         static_cast<Index>(a - b) * stride[static_cast<size_t>(i)];
    t.emplace_back(s, target, p);
    moved += p;
  }
  return moved;
}

}  // namespace

StochasticMatrix projected_swap_kernel(const TemperedFamily& family, Index budget) {
  require(family.L() >= 1, "the swap kernel needs at least two levels");
  const auto codec = assignment_codec(family, budget);
  const int m = family.num_modes();
  const auto stride = strides(m, family.num_levels());
  const auto table = marginal_table(family);
  std::vector<Triplet> t;
  std::vector<int> lambda(static_cast<size_t>(family.num_levels()));
  for (Index s = 0; s < codec.size(); ++s) {
    decode_mixed_radix(s, m, lambda);
    const double moved = add_projected_swaps(table, s, lambda, stride, 1.0, t);
    t.emplace_back(s, s, 1.0 - moved);
  }
  return StochasticMatrix::from_triplets(codec.size(), t, pi_bar(family, budget), codec);
}

StochasticMatrix projected_update_kernel(const TemperedFamily& family,
                                         const StochasticMatrix& level_kernel, int level) {
  require(level >= 0 && level <= family.L(), "level out of range");
  require(level_kernel.size() == family.num_atoms(), "level kernel has the wrong size");
  return project(level_kernel, family.target().modes(), family.num_modes(),
                 StateCodec::plain(family.num_modes(), "mode"));
}

StochasticMatrix aux_chain_P1(const TemperedFamily& family, Index budget) {
  const auto codec = assignment_codec(family, budget);
  const int m = family.num_modes();
  const int levels = family.num_levels();
  const auto stride = strides(m, levels);
  const auto table = marginal_table(family);
  const double refresh = 1.0 / (2.0 * levels);
  std::vector<Triplet> t;
  std::vector<int> lambda(static_cast<size_t>(levels));
  for (Index s = 0; s < codec.size(); ++s) {
    decode_mixed_radix(s, m, lambda);
    double moved = family.L() >= 1 ? add_projected_swaps(table, s, lambda, stride, 0.5, t) : 0.0;
    for (int k = 0; k < m; ++k) {
      if (k == lambda[0]) continue;
      const double p = refresh * family.block_masses()(0, k);
      t.emplace_back(s, s + static_cast<Index>(k - lambda[0]) * stride[0], p);
      moved += p;
    }
    t.emplace_back(s, s, 1.0 - moved);
  }
  return StochasticMatrix::from_triplets(codec.size(), t, pi_bar(family, budget), codec);
}

StochasticMatrix aux_chain_P2(const TemperedFamily& family, Index budget) {
  const auto codec = assignment_codec(family, budget);
  const int m = family.num_modes();
  const int levels = family.num_levels();
  const auto stride = strides(m, levels);
  std::vector<Triplet> t;
  std::vector<int> lambda(static_cast<size_t>(levels));
  for (Index s = 0; s < codec.size(); ++s) {
    decode_mixed_radix(s, m, lambda);
    double moved = 0.0;
    for (int i = 0; i < levels; ++i) {
      const int current = lambda[static_cast<size_t>(i)];
      for (int k = 0; k < m; ++k) {
        if (k == current) continue;
        const double p = family.block_masses()(i, k) / levels;
        t.emplace_back(s, s + static_cast<Index>(k - current) * stride[static_cast<size_t>(i)], p);
        moved += p;
      }
    }
    t.emplace_back(s, s, 1.0 - moved);
  }
  return StochasticMatrix::from_triplets(codec.size(), t, pi_bar(family, budget), codec);
}

}  // namespace tempering
