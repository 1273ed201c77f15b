#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "banditlab/adversarial.hpp"
#include "banditlab/bandit.hpp"
#include "banditlab/policies.hpp"

namespace banditlab {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InstanceSpec {
  enum class Type { kRandom, kAdversarialD2, kAdversarialGeneral, kPhased };
  Type type = Type::kRandom;
  int d = 0;
  int n = 0;
  int T = 0;
  double eps = 2.0;
  std::uint64_t theta_seed = 0;  // random instances
  std::uint64_t seed = 0;        // phased instances
  bool sample_params = false;    // adversarial: draw U per replication
  std::vector<std::uint64_t> u;  // adversarial: fixed U when not sampling
};

struct ExperimentConfig {
  std::string policy;  // vcl | suplinucb | linucb | random
  InstanceSpec instance;
  int replications = 1;
  std::uint64_t base_seed = 0;
  std::string output_path;
  std::vector<int> checkpoints;  // default: powers of 2 and T
  int jobs = 0;                  // 0 = hardware concurrency
};

// Parses the JSON config text. Unknown keys are a hard error.
ExperimentConfig parse_config(const std::string& json_text);

struct ResultRow {
  int replication = 0;
  std::uint64_t seed = 0;
  int checkpoint = 0;
  double cum_regret = 0.0;
  std::optional<long long> subopt_pulls;  // adversarial instances only
  std::string zeta_hist;                  // vcl only, e.g. "0:12|1:30"
};

std::unique_ptr<Policy> make_policy(const std::string& name);

// Random environment: unit-norm theta and per-round unit-norm contexts,
// all derived deterministically from theta_seed.
Instance make_random_instance(int d, int n, int T, std::uint64_t theta_seed);

// Runs all replications (replication r uses seed mix(base_seed, r)) and, if
// output_path is set, writes the CSV byte-deterministically.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

std::string rows_to_csv(const std::vector<ResultRow>& rows);

struct ScalingPoint {
  int T = 0;
  double mean_regret = 0.0;
  double std_error = 0.0;
};

struct ScalingFit {
  bool defined = false;
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // sum of squared log-residuals
};

ScalingFit fit_scaling_exponent(const std::vector<std::pair<int, double>>& points);

struct SweepResult {
  std::vector<ScalingPoint> points;
  ScalingFit fit;
};

// Runs run_experiment once per horizon and fits log(mean regret) ~ log T.
SweepResult sweep(const ExperimentConfig& base, const std::vector<int>& horizons);

struct LowerBoundSummary {
  int samples = 0;
  double mean_subopt_pulls = 0.0;  // per sample, summed over groups
  double mean_regret = 0.0;
  double per_pull_floor = 0.0;  // sqrt(ln T)/(36 sqrt(T)) for eps = 2
  double pull_floor_fraction = 0.0;  // mean pulls / (T * groups)
  bool floor_respected = true;  // regret >= pulls * floor in every sample
};

LowerBoundSummary lowerbound_eval(const std::string& policy, int d, int T,
                                  double eps, int samples,
                                  std::uint64_t base_seed, int jobs = 0);

double mean_of(const std::vector<double>& xs);
double std_error_of(const std::vector<double>& xs);

}  // namespace banditlab
