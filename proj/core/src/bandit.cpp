#include "banditlab/bandit.hpp"

namespace banditlab {

double instantaneous_regret(const ContextSet& contexts,
                            const Eigen::VectorXd& theta, int chosen) {
  if (chosen < 0 || chosen >= contexts.n())
    throw ProtocolViolation("instantaneous_regret: arm index out of range");
  double best = contexts.vectors[0].dot(theta);
  for (int i = 1; i < contexts.n(); ++i)
    best = std::max(best, contexts.vectors[i].dot(theta));
  return best - contexts.vectors[chosen].dot(theta);
}

double sample_reward(const Instance& instance, const Eigen::VectorXd& x,
                     Rng& rng) {
  double mean = x.dot(instance.theta);
  switch (instance.noise.kind) {
    case NoiseSpec::Kind::kNone:
      return mean;
    case NoiseSpec::Kind::kGaussian:
      return mean + instance.noise.sigma * rng.next_gaussian();
  }
  return mean;
}

RegretTrace simulate(Policy& policy, const Instance& instance,
                     std::uint64_t seed, bool collect_diagnostics) {
  policy.reset(instance.d, instance.n, instance.T, mix(seed, 0));
  Rng noise_rng(mix(seed, 1));

  RegretTrace trace;
  trace.T = instance.T;
  trace.cum_regret.reserve(instance.T);
  trace.chosen.reserve(instance.T);
  if (collect_diagnostics) trace.diagnostics.reserve(instance.T);

  double cum = 0.0;
  for (int t = 1; t <= instance.T; ++t) {
    ContextSet contexts = instance.context_provider(t);
    int chosen = policy.select(contexts);
    if (chosen < 0 || chosen >= contexts.n())
      throw ProtocolViolation("simulate: policy returned out-of-range arm");
    double reward = sample_reward(instance, contexts.vectors[chosen], noise_rng);
    policy.update(chosen, reward);
    cum += instantaneous_regret(contexts, instance.theta, chosen);
    trace.cum_regret.push_back(cum);
    trace.chosen.push_back(chosen);
    if (collect_diagnostics) trace.diagnostics.push_back(policy.last_diagnostics());
  }
  return trace;
}

}  // namespace banditlab
