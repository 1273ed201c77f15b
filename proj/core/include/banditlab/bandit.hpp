#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "banditlab/rng.hpp"

namespace banditlab {

struct ContextSet {
  int t = 0;  // 1-based round index
  std::vector<Eigen::VectorXd> vectors;

  int n() const { return static_cast<int>(vectors.size()); }
};

struct NoiseSpec {
  enum class Kind { kNone, kGaussian };
  Kind kind = Kind::kGaussian;
  double sigma = 1.0;

  static NoiseSpec none() { return {Kind::kNone, 0.0}; }
  static NoiseSpec gaussian(double sigma = 1.0) {
    return {Kind::kGaussian, sigma};
  }
};

// A bandit environment: hidden model, a pure per-round context provider
// (the adversary commits to the action sets up front), and a noise spec.
struct Instance {
  int d = 0;
  int n = 0;
  int T = 0;
  Eigen::VectorXd theta;
  std::function<ContextSet(int)> context_provider;  // t in [1, T]
  NoiseSpec noise;
};

// select/update must strictly alternate; simulate() enforces this.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual void reset(int d, int n, int T, std::uint64_t seed) = 0;
  virtual int select(const ContextSet& contexts) = 0;
  virtual void update(int chosen, double reward) = 0;
  virtual std::string name() const = 0;
  // Per-round annotations published after each select (e.g. stopping layer).
  virtual std::map<std::string, double> last_diagnostics() const { return {}; }
};

struct RegretTrace {
  int T = 0;
  std::vector<double> cum_regret;            // length T
  std::vector<int> chosen;                   // length T
  std::vector<std::map<std::string, double>> diagnostics;  // optional, per round
};

class ProtocolViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// max_i x_i^T theta - x_chosen^T theta.
double instantaneous_regret(const ContextSet& contexts,
                            const Eigen::VectorXd& theta, int chosen);

double sample_reward(const Instance& instance, const Eigen::VectorXd& x,
                     Rng& rng);

// Runs T rounds of select / sample_reward / update and records pseudo-regret.
// Deterministic given (policy, instance, seed). `collect_diagnostics` keeps
// the per-round key-value annotations policies publish (stopping layer etc.).
RegretTrace simulate(Policy& policy, const Instance& instance,
                     std::uint64_t seed, bool collect_diagnostics = false);

}  // namespace banditlab
