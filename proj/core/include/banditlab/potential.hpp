#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "banditlab/adversarial.hpp"

namespace banditlab {

// Per-sequence accounting for the elliptical potential inequality
// sum_t y_t^T U_{t-1}^{-1} y_t <= 2 ln det(U_T), plus the tight-schedule
// target sqrt(T ln T / 2).
struct PotentialReport {
  int T = 0;
  std::vector<double> per_term;  // y_t^T U_{t-1}^{-1} y_t
  double sum_quadratic = 0.0;
  double sum_sqrt = 0.0;
  double two_logdet = 0.0;
  double tight_target = 0.0;  // sqrt(T ln T / 2); 0 unless eps = 2

  std::string to_text() const;
  // Rows (t, z_t, S_t, per_term); z and S columns are zero when the report
  // did not come from a schedule.
  std::string to_csv(const ZtSchedule* schedule = nullptr) const;
};

// Folds the vectors through a DesignState, recording each quadratic form
// before the corresponding update. Throws std::invalid_argument on a vector
// with norm > 1.
PotentialReport elliptical_report(const std::vector<Eigen::VectorXd>& vectors);

// Runs the dimension-1 tight schedule; for eps = 2 verifies the per-term
// constancy ln(T)/(2T) and the sum equality against sqrt(T ln T / 2).
// Throws std::runtime_error if the eps = 2 equality check fails.
PotentialReport tightness_report(int T, double eps);

}  // namespace banditlab
