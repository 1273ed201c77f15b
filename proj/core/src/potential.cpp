#include "banditlab/potential.hpp"

#include <cmath>
#include <sstream>

#include "banditlab/design_state.hpp"

namespace banditlab {

PotentialReport elliptical_report(const std::vector<Eigen::VectorXd>& vectors) {
  PotentialReport rep;
  rep.T = static_cast<int>(vectors.size());
  if (vectors.empty()) return rep;

  DesignState state(static_cast<int>(vectors.front().size()));
  rep.per_term.reserve(vectors.size());
  for (const auto& y : vectors) {
    if (y.norm() > 1.0 + 1e-12)
      throw std::invalid_argument("elliptical_report: vector norm exceeds 1");
    double q = state.quadratic_form(y);
    rep.per_term.push_back(q);
    rep.sum_quadratic += q;
    rep.sum_sqrt += std::sqrt(q);
    state.rank_one_update(y, 0.0);
  }
  rep.two_logdet = 2.0 * state.log_det();
  return rep;
}

PotentialReport tightness_report(int T, double eps) {
  ZtSchedule sched = zt_schedule(T, eps);
  std::vector<Eigen::VectorXd> ys(T);
  for (int t = 1; t <= T; ++t) {
    ys[t - 1] = Eigen::VectorXd::Constant(1, sched.z[t]);
  }
  PotentialReport rep = elliptical_report(ys);

  if (eps == 2.0) {
    rep.tight_target = std::sqrt(T * std::log(static_cast<double>(T)) / 2.0);
    const double per = std::log(static_cast<double>(T)) / (2.0 * T);
    for (int t = 0; t < T; ++t) {
      double ref = std::max(per, 1e-300);
      if (std::abs(rep.per_term[t] - per) > 1e-9 * ref)
        throw std::runtime_error(
            "tightness_report: per-term value deviates from ln(T)/(2T)");
    }
    double ref = std::max(rep.tight_target, 1e-300);
    if (std::abs(rep.sum_sqrt - rep.tight_target) > 1e-9 * ref)
      throw std::runtime_error(
          "tightness_report: sum deviates from sqrt(T ln T / 2)");
  }
  return rep;
}

std::string PotentialReport::to_text() const {
  std::ostringstream os;
  os.precision(12);
  os << "T              " << T << "\n"
     << "sum_quadratic  " << sum_quadratic << "\n"
     << "sum_sqrt       " << sum_sqrt << "\n"
     << "two_logdet     " << two_logdet << "\n";
  if (tight_target > 0.0) os << "tight_target   " << tight_target << "\n";
  os << "bound_holds    " << (sum_quadratic <= two_logdet + 1e-9 ? "yes" : "NO")
     << "\n";
  return os.str();
}

std::string PotentialReport::to_csv(const ZtSchedule* schedule) const {
  std::ostringstream os;
  os.precision(17);
  os << "t,z_t,S_t,per_term\n";
  for (int t = 1; t <= T; ++t) {
    double z = schedule ? schedule->z[t] : 0.0;
    double S = schedule ? schedule->S[t] : 0.0;
    os << t << "," << z << "," << S << "," << per_term[t - 1] << "\n";
  }
  return os.str();
}

}  // namespace banditlab
