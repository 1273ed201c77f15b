#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <stdexcept>

namespace banditlab {

// Ridge-regularized design matrix with maintained inverse.
//
// Holds Lambda = I + sum x x^T, the response accumulator lam = sum r x, and
// a cached Lambda^{-1}. The inverse is advanced by Sherman-Morrison rank-one
// steps and re-factorized whenever drift exceeds the consistency budget or
// every kRefactorPeriod updates.
class DesignState {
 public:
  static constexpr int kRefactorPeriod = 256;
  static constexpr double kConsistencyTol = 1e-8;

  explicit DesignState(int dim);

  int dim() const { return dim_; }
  std::size_t count() const { return count_; }

  const Eigen::MatrixXd& lambda_mat() const { return lambda_; }
  const Eigen::VectorXd& lambda_vec() const { return lam_; }
  const Eigen::MatrixXd& inv_mat() const { return inv_; }

  // Lambda += x x^T, lam += r * x.
  void rank_one_update(const Eigen::VectorXd& x, double r);

  // x^T Lambda^{-1} x (this is omega^2; callers take the square root).
  double quadratic_form(const Eigen::VectorXd& x) const;

  // Lambda^{-1} lam.
  Eigen::VectorXd solve_theta() const;

  // ln det(Lambda), >= 0 since Lambda >= I.
  double log_det() const;

  // max-norm of Lambda * inv - I.
  double consistency_residual() const;

 private:
  void refactor();
  void check_dim(const Eigen::VectorXd& x) const;

  int dim_;
  Eigen::MatrixXd lambda_;
  Eigen::VectorXd lam_;
  Eigen::MatrixXd inv_;
  std::size_t count_ = 0;
  int since_refactor_ = 0;
};

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace banditlab
