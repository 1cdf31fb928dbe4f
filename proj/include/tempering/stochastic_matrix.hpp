#pragma once

#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "tempering/state_codec.hpp"

namespace tempering {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

inline constexpr double kStochasticTolerance = 1e-10;

// Row-stochastic kernel on a finite indexed state space paired with the
// distribution it is meant to leave invariant. Construction checks shape,
// nonnegativity and row sums; reversibility is reported, not enforced, so
// that contract violations surface where they matter (e.g. spectral_gap).
class StochasticMatrix {
 public:
  StochasticMatrix(SparseMatrix entries, Eigen::VectorXd stationary, StateCodec codec);

  static StochasticMatrix from_dense(const Eigen::MatrixXd& entries,
                                     Eigen::VectorXd stationary, StateCodec codec);
  static StochasticMatrix from_triplets(Index size, const std::vector<Triplet>& triplets,
                                        Eigen::VectorXd stationary, StateCodec codec);

  Index size() const { return entries_.rows(); }
  const SparseMatrix& entries() const { return entries_; }
  const Eigen::VectorXd& stationary() const { return stationary_; }
  const StateCodec& codec() const { return codec_; }

  double operator()(Index x, Index y) const { return entries_.coeff(x, y); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(entries_); }
  Eigen::VectorXd diagonal() const { return entries_.diagonal(); }

  // max_{x,y} |pi(x) P(x,y) - pi(y) P(y,x)|
  double detailed_balance_residual() const;
  // max_y |(pi P)(y) - pi(y)|
  double stationarity_residual() const;
  bool is_reversible(double tol = kStochasticTolerance) const {
    return detailed_balance_residual() <= tol;
  }

 private:
  SparseMatrix entries_;
  Eigen::VectorXd stationary_;
  StateCodec codec_;
};

}  // namespace tempering
