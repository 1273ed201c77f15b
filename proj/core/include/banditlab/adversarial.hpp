#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "banditlab/bandit.hpp"

namespace banditlab {

class ConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The tight-schedule sequence: S[t] = (1 + c)^t with c = (eps/2) ln(T)/(2T),
// z[t] = sqrt(S[t-1] * c). eps = 2 is the equality-achieving schedule; smaller
// eps trades the constant for validity at smaller horizons.
struct ZtSchedule {
  int T = 0;
  double eps = 2.0;
  std::vector<double> S;  // indices 0..T, S[0] = 1
  std::vector<double> z;  // indices 0..T, z[0] unused (= 0)
};

ZtSchedule zt_schedule(int T, double eps);

// Stage boundaries t_j = max{t <= T : S_t <= 9^j}, with t_k forced to T.
// Stage j (1-based) is the round range (t_bounds[j-1], t_bounds[j]].
struct StagePartition {
  ZtSchedule schedule;
  std::vector<int> t_bounds;  // t_bounds[0] = 0, ..., t_bounds[k] = T
  int k = 0;

  int stage_of(int t) const;  // t in [1, T]
};

StagePartition stage_partition(const ZtSchedule& schedule);

struct RealInterval {
  double a = 0.0, b = 0.0;
  double mid() const { return 0.5 * (a + b); }
  double width() const { return b - a; }
};

// Cantor-style nesting: root [1/3, 2/3], children keep the outer thirds.
RealInterval interval(int j, std::uint64_t xi);

// Index of the stage-j ancestor interval of leaf xi (depth k).
std::uint64_t ancestor_index(int k, std::uint64_t xi, int j);

// Hidden parameter for leaf xi: midpoint of its depth-k interval.
double leaf_gamma(int k, std::uint64_t xi);

// Parameter vector indexing an adversarial instance: one leaf per group.
struct LowerBoundParams {
  int d = 0;  // even
  int k = 0;  // interval-tree depth = stage count
  std::vector<std::uint64_t> u;  // length d/2, each < 2^k

  int groups() const { return d / 2; }
};

LowerBoundParams sample_params(int d, int k, Rng& rng);

// One lower-bound bandit instance. Arms are indexed by the bit pattern of
// their per-group choices: bit s of arm i selects the group-s context branch.
class AdversarialInstance {
 public:
  const Instance& instance() const { return instance_; }
  const LowerBoundParams& params() const { return data_->params; }
  const StagePartition& partition() const { return data_->partition; }
  double context_scale() const { return data_->ctx_scale; }
  int groups() const { return data_->params.groups(); }

  double gamma(int s) const { return data_->gammas[s]; }

  // Expected group-s reward contribution of playing branch `bit` at round t.
  double group_value(int t, int s, int bit) const;

  // True iff arm i's group-s branch is the lesser of the two contributions.
  bool is_s_suboptimal(int t, int arm, int s) const;

  // Group-s share of the instantaneous regret of arm i at round t.
  double s_segment_regret(int t, int arm, int s) const;

  int optimal_arm(int t) const;

  // Pinsker-side KL budget against the instance for `other`, valid while the
  // two parameter vectors still share ancestors:
  // 0.5 * scale^2 * (sum_s |theta_odd - theta_odd'|)^2 * S_t.
  double kl_upper_bound(const LowerBoundParams& other, int t) const;

  // Largest stage j such that all groups share their stage-(j-1) ancestor
  // with `other`; kl_upper_bound is valid for t <= t_bounds[j].
  int shared_stage(const LowerBoundParams& other) const;

  // |x_arm . (theta - theta')| at round t, for exact-KL accumulation along a
  // pull history (contexts agree while ancestors are shared).
  double mean_gap(const LowerBoundParams& other, int t, int arm) const;

 private:
  friend AdversarialInstance make_adversarial(LowerBoundParams params,
                                              const ZtSchedule& schedule,
                                              double ctx_scale);
  struct Data {
    LowerBoundParams params;
    StagePartition partition;
    double ctx_scale = 1.0;
    std::vector<double> gammas;  // per group
    Eigen::VectorXd theta;
  };
  std::shared_ptr<const Data> data_;
  Instance instance_;
};

// Shared builder; throws ConstructionError if any context or theta norm
// exceeds 1.
AdversarialInstance make_adversarial(LowerBoundParams params,
                                     const ZtSchedule& schedule,
                                     double ctx_scale);

// The planar construction: theta = (gamma_u, 1/2), unscaled contexts.
AdversarialInstance instance_d2(std::uint64_t u, const ZtSchedule& schedule);

// The direct-product construction: per-group sqrt(d) context scaling and
// 1/sqrt(d) theta scaling, n = 2^(d/2) arms.
AdversarialInstance instance_general(const LowerBoundParams& params,
                                     const ZtSchedule& schedule);

// Horizon divided into phases, each running the direct-product construction
// on its own 2*log2(n)-wide coordinate block with fresh parameters.
class PhasedInstance {
 public:
  const Instance& instance() const { return instance_; }
  int phase_count() const { return static_cast<int>(phases_.size()); }
  int phase_length() const { return phase_len_; }
  const AdversarialInstance& phase(int j) const { return phases_[j]; }
  int block_offset(int j) const { return block_dims_ * j; }
  int block_dims() const { return block_dims_; }

 private:
  friend PhasedInstance instance_phased(int n, int d, int T, double eps,
                                        std::uint64_t seed);
  std::vector<AdversarialInstance> phases_;
  Instance instance_;
  int phase_len_ = 0;
  int block_dims_ = 0;
};

PhasedInstance instance_phased(int n, int d, int T, double eps = 2.0,
                               std::uint64_t seed = 0);

}  // namespace banditlab
