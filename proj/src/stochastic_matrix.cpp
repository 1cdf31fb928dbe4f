#include "tempering/stochastic_matrix.hpp"

#include <cmath>

#include "tempering/error.hpp"

namespace tempering {

StochasticMatrix::StochasticMatrix(SparseMatrix entries, Eigen::VectorXd stationary,
                                   StateCodec codec)
    : entries_(std::move(entries)), stationary_(std::move(stationary)), codec_(std::move(codec)) {
  require(entries_.rows() == entries_.cols() && entries_.rows() >= 1,
          "kernel must be a nonempty square matrix");
  require(stationary_.size() == entries_.rows(), "stationary vector has the wrong size");
  require(codec_.size() == entries_.rows(), "state codec has the wrong size");
  require((stationary_.array() >= 0.0).all() &&
              std::abs(stationary_.sum() - 1.0) <= kStochasticTolerance,
          "stationary vector must be a probability distribution");
  entries_.prune(0.0);
  entries_.makeCompressed();
  for (Index x = 0; x < entries_.outerSize(); ++x) {
    double row = 0.0;
    for (SparseMatrix::InnerIterator it(entries_, x); it; ++it) {
      require(it.value() >= 0.0, "kernel entries must be nonnegative");
      row += it.value();
    }
    if (std::abs(row - 1.0) > kStochasticTolerance) {
      throw ArgumentError("row " + std::to_string(x) + " sums to " + std::to_string(row));
    }
  }
}

StochasticMatrix StochasticMatrix::from_dense(const Eigen::MatrixXd& entries,
                                              Eigen::VectorXd stationary, StateCodec codec) {
  return StochasticMatrix(entries.sparseView(), std::move(stationary), std::move(codec));
}

StochasticMatrix StochasticMatrix::from_triplets(Index size, const std::vector<Triplet>& triplets,
                                                 Eigen::VectorXd stationary, StateCodec codec) {
  SparseMatrix m(size, size);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return StochasticMatrix(std::move(m), std::move(stationary), std::move(codec));
}

double StochasticMatrix::detailed_balance_residual() const {
  const SparseMatrix flow = stationary_.asDiagonal() * entries_;
  const SparseMatrix transposed = flow.transpose();
  const SparseMatrix diff = flow - transposed;
  double worst = 0.0;
  for (Index k = 0; k < diff.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(diff, k); it; ++it) {
      worst = std::max(worst, std::abs(it.value()));
    }
  }
  return worst;
}

double StochasticMatrix::stationarity_residual() const {
  const Eigen::VectorXd pushed = entries_.transpose() * stationary_;
  return (pushed - stationary_).cwiseAbs().maxCoeff();
}

}  // namespace tempering
