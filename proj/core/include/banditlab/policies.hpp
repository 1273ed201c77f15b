#pragma once

#include <cstdint>
#include <vector>

#include "banditlab/bandit.hpp"
#include "banditlab/design_state.hpp"

namespace banditlab {

// One data layer of a SupLinUCB-style policy: its design state plus the
// set of round indices it has absorbed (the X_zeta bookkeeping).
struct Layer {
  explicit Layer(int d) : design(d) {}
  DesignState design;
  std::vector<int> rounds;
};

// Full record of one VCL selection, kept when tracing is enabled.
struct VclSelectTrace {
  int t = 0;
  int zeta_t = 0;
  int chosen = -1;
  double omega = 0.0, alpha = 0.0, varpi = 0.0;  // chosen arm, stopping layer
  // Per visited layer zeta = 0..last: surviving arms and their varpi values.
  std::vector<std::vector<int>> survivors;
  std::vector<std::vector<double>> varpis;
  // For layers that advanced (clause 2): the empirical argmax arm.
  std::vector<int> emp_argmax;
};

// Variable-confidence-level SupLinUCB.
class VclPolicy : public Policy {
 public:
  void reset(int d, int n, int T, std::uint64_t seed) override;
  int select(const ContextSet& contexts) override;
  void update(int chosen, double reward) override;
  std::string name() const override { return "vcl"; }
  std::map<std::string, double> last_diagnostics() const override;

  void set_tracing(bool on) { tracing_ = on; }

  int zeta0() const { return zeta0_; }
  const std::vector<Layer>& layers() const { return layers_; }
  const std::vector<VclSelectTrace>& traces() const { return traces_; }
  // Context/reward history of played arms (recorded only while tracing).
  const std::vector<Eigen::VectorXd>& played_contexts() const {
    return played_x_;
  }
  const std::vector<double>& played_rewards() const { return played_r_; }

  static int compute_zeta0(int T, int d);

 private:
  int d_ = 0, n_ = 0, T_ = 0, zeta0_ = 0;
  int round_ = 0;  // completed rounds
  std::vector<Layer> layers_;
  bool pending_ = false;
  int pending_zeta_ = 0;
  Eigen::VectorXd pending_x_;
  bool tracing_ = false;
  std::vector<VclSelectTrace> traces_;
  std::vector<Eigen::VectorXd> played_x_;
  std::vector<double> played_r_;
  double last_zeta_ = 0.0, last_varpi_ = 0.0;
};

// Classical SupLinUCB with a constant confidence multiplier (delta = 1/T).
class SupLinUcbPolicy : public Policy {
 public:
  void reset(int d, int n, int T, std::uint64_t seed) override;
  int select(const ContextSet& contexts) override;
  void update(int chosen, double reward) override;
  std::string name() const override { return "suplinucb"; }
  std::map<std::string, double> last_diagnostics() const override;

  static double confidence_multiplier(int T, int n);

 private:
  int d_ = 0, n_ = 0, T_ = 0, zeta0_ = 0;
  double alpha_ = 0.0;
  std::vector<Layer> layers_;
  bool pending_ = false;
  int pending_zeta_ = 0;
  Eigen::VectorXd pending_x_;
  double last_zeta_ = 0.0;
};

// Single-design-matrix ridge UCB (OFUL-style) baseline.
class LinUcbPolicy : public Policy {
 public:
  void reset(int d, int n, int T, std::uint64_t seed) override;
  int select(const ContextSet& contexts) override;
  void update(int chosen, double reward) override;
  std::string name() const override { return "linucb"; }

 private:
  int d_ = 0, T_ = 0, round_ = 0;
  std::unique_ptr<DesignState> design_;
  bool pending_ = false;
  Eigen::VectorXd pending_x_;
};

int random_select(Rng& rng, int n);

class RandomPolicy : public Policy {
 public:
  void reset(int d, int n, int T, std::uint64_t seed) override;
  int select(const ContextSet& contexts) override;
  void update(int chosen, double reward) override;
  std::string name() const override { return "random"; }

 private:
  int n_ = 0;
  Rng rng_{0};
  bool pending_ = false;
};

}  // namespace banditlab
