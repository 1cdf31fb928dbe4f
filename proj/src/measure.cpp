#include "tempering/measure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tempering/random.hpp"

namespace tempering {

namespace {

double log_sum_exp(const Eigen::Ref<const VectorXd>& x) {
  const double top = x.maxCoeff();
  return top + std::log((x.array() - top).exp().sum());
}

MatrixXd compute_block_masses(const FiniteTarget& target, const MatrixXd& levels) {
  MatrixXd masses = MatrixXd::Zero(levels.rows(), target.num_modes());
  for (Index i = 0; i < levels.rows(); ++i) {
    for (Index x = 0; x < levels.cols(); ++x) masses(i, target.mode_of(x)) += levels(i, x);
  }
  return masses;
}

void check_level_index(const TemperedFamily& family, int i, int k1, int k2) {
  require(family.L() >= 1, "swap acceptance needs at least two levels");
  require(i >= 1 && i <= family.L(), "level must lie in [1, L]");
  require(k1 >= 0 && k1 < family.num_modes() && k2 >= 0 && k2 < family.num_modes(),
          "mode index out of range");
}

}  // namespace

FiniteTarget::FiniteTarget(VectorXd log_weights, std::vector<int> modes, int num_modes)
    : log_weights_(std::move(log_weights)), modes_(std::move(modes)), num_modes_(num_modes) {
  require(log_weights_.size() >= 1, "target needs at least one atom");
  require(static_cast<Index>(modes_.size()) == log_weights_.size(),
          "one mode label per atom is required");
  require(num_modes_ >= 1, "target needs at least one mode");
  for (Index x = 0; x < log_weights_.size(); ++x) {
    require(std::isfinite(log_weights_(x)), "atom weights must be positive and finite");
  }
  blocks_.assign(static_cast<size_t>(num_modes_), {});
  for (size_t x = 0; x < modes_.size(); ++x) {
    require(modes_[x] >= 0 && modes_[x] < num_modes_, "mode label out of range");
    blocks_[static_cast<size_t>(modes_[x])].push_back(static_cast<Index>(x));
  }
  for (const auto& block : blocks_) require(!block.empty(), "every mode needs an atom");
}

FiniteTarget FiniteTarget::from_weights(const VectorXd& weights, std::vector<int> modes,
                                        int num_modes) {
  for (Index x = 0; x < weights.size(); ++x) {
    require(weights(x) > 0.0 && std::isfinite(weights(x)), "atom weights must be positive");
  }
  return FiniteTarget(weights.array().log().matrix(), std::move(modes), num_modes);
}

TemperatureLadder::TemperatureLadder(std::vector<double> betas) : betas_(std::move(betas)) {
  require(!betas_.empty(), "ladder needs at least one inverse temperature");
  require(betas_.back() == 1.0, "last inverse temperature must be exactly 1");
  for (size_t i = 0; i < betas_.size(); ++i) {
    require(std::isfinite(betas_[i]), "inverse temperatures must be finite");
    if (i > 0) require(betas_[i - 1] < betas_[i], "inverse temperatures must increase");
  }
}

TemperedFamily::TemperedFamily(FiniteTarget target, TemperatureLadder ladder,
                               MatrixXd log_levels)
    : target_(std::move(target)), ladder_(std::move(ladder)), log_levels_(std::move(log_levels)) {
  require(log_levels_.rows() == ladder_.num_levels() &&
              log_levels_.cols() == target_.num_atoms(),
          "level matrix has the wrong shape");
  levels_ = log_levels_.array().exp().matrix();
  for (Index i = 0; i < levels_.rows(); ++i) {
    require(std::abs(levels_.row(i).sum() - 1.0) <= 1e-12, "levels must be normalized");
  }
  block_masses_ = compute_block_masses(target_, levels_);
  require((block_masses_.array() > 0.0).all(), "every level must give every mode positive mass");
}

TemperedFamily temper(const FiniteTarget& target, const TemperatureLadder& ladder) {
  MatrixXd log_levels(ladder.num_levels(), target.num_atoms());
  for (int i = 0; i < ladder.num_levels(); ++i) {
    VectorXd row = ladder.betas()[static_cast<size_t>(i)] * target.log_weights();
    row.array() -= log_sum_exp(row);
    log_levels.row(i) = row.transpose();
  }
  return TemperedFamily(target, ladder, std::move(log_levels));
}

TemperedFamily family_from_levels(const FiniteTarget& target, const TemperatureLadder& ladder,
                                  const MatrixXd& levels) {
  require(levels.rows() == ladder.num_levels() && levels.cols() == target.num_atoms(),
          "level matrix has the wrong shape");
  require((levels.array() > 0.0).all(), "level densities must be positive");
  MatrixXd log_levels = levels.array().log().matrix();
  for (Index i = 0; i < log_levels.rows(); ++i) {
    log_levels.row(i).array() -= log_sum_exp(log_levels.row(i).transpose());
  }
  return TemperedFamily(target, ladder, std::move(log_levels));
}

namespace {

double overlap_min(const TemperedFamily& family, bool restrict_to_block) {
  require(family.L() >= 1, "overlap needs at least two levels");
  const MatrixXd& p = family.levels();
  const MatrixXd& masses = family.block_masses();
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < family.L(); ++a) {
    const VectorXd overlap = p.row(a).cwiseMin(p.row(a + 1)).transpose();
    for (int k = 0; k < family.num_modes(); ++k) {
      double sum = 0.0;
      if (restrict_to_block) {
        for (Index x : family.target().blocks()[static_cast<size_t>(k)]) sum += overlap(x);
      } else {
        sum = overlap.sum();
      }
      // both orderings (i, j) = (a, a+1) and (a+1, a)
      best = std::min({best, sum / masses(a, k), sum / masses(a + 1, k)});
    }
  }
  return best;
}

}  // namespace

double overlap_phi(const TemperedFamily& family) { return overlap_min(family, true); }

double overlap_phi_unrestricted(const TemperedFamily& family) {
  return overlap_min(family, false);
}

double bottleneck_ratio(const TemperedFamily& family) {
  return bottleneck_ratio(family.block_masses());
}

VectorXd pi_bar(const TemperedFamily& family, Index budget) {
  return assignment_masses(family.block_masses(), budget);
}

double pi_bar_at(const TemperedFamily& family, std::span<const int> lambda) {
  require(static_cast<int>(lambda.size()) == family.num_levels(),
          "assignment must have L+1 entries");
  double p = 1.0;
  for (int i = 0; i < family.num_levels(); ++i) {
    const int k = lambda[static_cast<size_t>(i)];
    require(k >= 0 && k < family.num_modes(), "assignment entry out of range");
    p *= family.block_masses()(i, k);
  }
  return p;
}

double swap_acceptance_marginal(const TemperedFamily& family, int i, int k1, int k2) {
  check_level_index(family, i, k1, k2);
  const auto& blocks = family.target().blocks();
  const MatrixXd& p = family.levels();
  double sum = 0.0;
  for (Index x : blocks[static_cast<size_t>(k1)]) {
    for (Index y : blocks[static_cast<size_t>(k2)]) {
      sum += std::min(p(i - 1, x) * p(i, y), p(i - 1, y) * p(i, x));
    }
  }
  return sum / (family.block_masses()(i - 1, k1) * family.block_masses()(i, k2));
}

StateCodec assignment_codec(const TemperedFamily& family, Index budget) {
  checked_power(family.num_modes(), family.num_levels(), budget);
  return StateCodec::mixed_radix(family.num_modes(), family.num_levels(), "assignment");
}

TemperedFamily random_family(const RandomFamilySpec& spec, std::uint64_t seed) {
  require(spec.num_modes >= 1 && spec.L >= 0 && spec.atoms_per_mode >= 1,
          "random family needs m >= 1, L >= 0 and at least one atom per mode");
  RandomStream rng(seed, 0);
  const Index n = static_cast<Index>(spec.num_modes) * spec.atoms_per_mode;
  VectorXd log_weights(n);
  std::vector<int> modes(static_cast<size_t>(n));
  for (Index x = 0; x < n; ++x) {
    modes[static_cast<size_t>(x)] = static_cast<int>(x / spec.atoms_per_mode);
    log_weights(x) = spec.log_weight_spread * (2.0 * rng.uniform() - 1.0);
  }
  std::vector<double> betas(static_cast<size_t>(spec.L) + 1, 1.0);
  for (int i = 0; i < spec.L; ++i) betas[static_cast<size_t>(i)] = 0.05 + 0.9 * rng.uniform();
  std::sort(betas.begin(), betas.end() - 1);
  for (int i = 1; i < spec.L; ++i) {
    auto& b = betas[static_cast<size_t>(i)];
    b = std::max(b, betas[static_cast<size_t>(i) - 1] + 1e-3);
  }
  return temper(FiniteTarget(std::move(log_weights), std::move(modes), spec.num_modes),
                TemperatureLadder(std::move(betas)));
}

}  // namespace tempering
