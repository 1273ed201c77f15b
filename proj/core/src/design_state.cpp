#include "banditlab/design_state.hpp"

#include <cmath>

namespace banditlab {

DesignState::DesignState(int dim) : dim_(dim) {
  if (dim < 1) throw DimensionError("DesignState: dimension must be >= 1");
  lambda_ = Eigen::MatrixXd::Identity(dim, dim);
  lam_ = Eigen::VectorXd::Zero(dim);
  inv_ = Eigen::MatrixXd::Identity(dim, dim);
}

void DesignState::check_dim(const Eigen::VectorXd& x) const {
  if (x.size() != dim_)
    throw DimensionError("DesignState: vector length does not match dimension");
}

void DesignState::rank_one_update(const Eigen::VectorXd& x, double r) {
  check_dim(x);
  lambda_.noalias() += x * x.transpose();
  lam_.noalias() += r * x;
  ++count_;

  // Sherman-Morrison: (A + xx^T)^{-1} = A^{-1} - A^{-1}x x^T A^{-1} / (1 + x^T A^{-1} x)
  Eigen::VectorXd ax = inv_ * x;
  double denom = 1.0 + x.dot(ax);
  inv_.noalias() -= (ax * ax.transpose()) / denom;

  // Keep both matrices exactly symmetric.
  lambda_ = ((lambda_ + lambda_.transpose()) * 0.5).eval();
  inv_ = ((inv_ + inv_.transpose()) * 0.5).eval();

  if (++since_refactor_ >= kRefactorPeriod ||
      consistency_residual() > kConsistencyTol) {
    refactor();
  }
}

void DesignState::refactor() {
  inv_ = lambda_.llt().solve(Eigen::MatrixXd::Identity(dim_, dim_));
  inv_ = ((inv_ + inv_.transpose()) * 0.5).eval();
  since_refactor_ = 0;
}

double DesignState::quadratic_form(const Eigen::VectorXd& x) const {
  check_dim(x);
  double q = x.dot(inv_ * x);
  return q < 0.0 ? 0.0 : q;
}

Eigen::VectorXd DesignState::solve_theta() const { return inv_ * lam_; }

double DesignState::log_det() const {
  Eigen::LLT<Eigen::MatrixXd> llt(lambda_);
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += std::log(llt.matrixL()(i, i));
  return 2.0 * s;
}

double DesignState::consistency_residual() const {
  return (lambda_ * inv_ - Eigen::MatrixXd::Identity(dim_, dim_))
      .cwiseAbs()
      .maxCoeff();
}

}  // namespace banditlab
