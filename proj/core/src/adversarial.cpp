#include "banditlab/adversarial.hpp"

#include <algorithm>
#include <cmath>

namespace banditlab {

ZtSchedule zt_schedule(int T, double eps) {
  if (T < 1) throw std::invalid_argument("zt_schedule: T must be >= 1");
  if (!(eps > 0.0 && eps <= 2.0))
    throw std::invalid_argument("zt_schedule: eps must be in (0, 2]");

  ZtSchedule s;
  s.T = T;
  s.eps = eps;
  s.S.resize(T + 1);
  s.z.assign(T + 1, 0.0);

  const double c = (eps / 2.0) * std::log(static_cast<double>(T)) / (2.0 * T);
  s.S[0] = 1.0;
  for (int t = 1; t <= T; ++t) {
    s.z[t] = std::sqrt(s.S[t - 1] * c);
    s.S[t] = s.S[t - 1] * (1.0 + c);
  }
  return s;
}

int StagePartition::stage_of(int t) const {
  if (t < 1 || t > schedule.T)
    throw std::invalid_argument("stage_of: round out of range");
  // first j with t <= t_bounds[j]
  auto it = std::lower_bound(t_bounds.begin() + 1, t_bounds.end(), t);
  return static_cast<int>(it - t_bounds.begin());
}

StagePartition stage_partition(const ZtSchedule& schedule) {
  StagePartition p;
  p.schedule = schedule;
  p.t_bounds.push_back(0);

  const int T = schedule.T;
  double bound = 9.0;
  int j = 1;
  for (;; ++j, bound *= 9.0) {
    // t_j = max{t <= T : S_t <= 9^j}; S is increasing so scan from t_{j-1}.
    int tj = p.t_bounds.back();
    while (tj < T && schedule.S[tj + 1] <= bound) ++tj;
    if (tj >= T) break;  // stage j is the last one; force t_k = T
    p.t_bounds.push_back(tj);
    if (schedule.S[tj] < 0.5 * bound)
      throw ConstructionError("stage_partition: stage-end lower bound violated");
  }
  p.t_bounds.push_back(T);
  p.k = j;
  return p;
}

RealInterval interval(int j, std::uint64_t xi) {
  if (j < 0 || j > 38 || (j < 64 && xi >= (1ULL << j)))
    throw std::invalid_argument("interval: index out of range for stage");
  // Endpoints are exact rationals over 3^(j+1); track numerators in integers
  // so the width stays exact to the last bit.
  std::uint64_t a = 1, b = 2, denom = 3;
  for (int bit = j - 1; bit >= 0; --bit) {
    if ((xi >> bit) & 1ULL) {
      a = a + 2 * b;
      b = 3 * b;
    } else {
      b = 2 * a + b;
      a = 3 * a;
    }
    denom *= 3;
  }
  return {static_cast<double>(a) / static_cast<double>(denom),
          static_cast<double>(b) / static_cast<double>(denom)};
}

std::uint64_t ancestor_index(int k, std::uint64_t xi, int j) {
  if (j < 0 || j > k) throw std::invalid_argument("ancestor_index: bad stage");
  if (k < 64 && xi >= (1ULL << k))
    throw std::invalid_argument("ancestor_index: leaf out of range");
  return xi >> (k - j);
}

double leaf_gamma(int k, std::uint64_t xi) { return interval(k, xi).mid(); }

LowerBoundParams sample_params(int d, int k, Rng& rng) {
  if (d < 2 || d % 2 != 0)
    throw std::invalid_argument("sample_params: d must be even and >= 2");
  if (k < 0) throw std::invalid_argument("sample_params: k must be >= 0");
  LowerBoundParams p;
  p.d = d;
  p.k = k;
  p.u.resize(d / 2);
  for (auto& us : p.u) us = rng.next_index(1ULL << k);
  return p;
}

// ---------------------------------------------------------------------------

AdversarialInstance make_adversarial(LowerBoundParams params,
                                     const ZtSchedule& schedule,
                                     double ctx_scale) {
  const int g = params.groups();
  if (g < 1 || g > 30)
    throw ConstructionError("make_adversarial: unsupported group count");

  auto data = std::make_shared<AdversarialInstance::Data>();
  data->partition = stage_partition(schedule);
  if (params.k != data->partition.k)
    throw ConstructionError(
        "make_adversarial: params depth does not match stage count");
  data->params = std::move(params);
  data->ctx_scale = ctx_scale;

  const int d = data->params.d;
  const int k = data->params.k;
  data->gammas.resize(g);
  data->theta.resize(d);
  for (int s = 0; s < g; ++s) {
    data->gammas[s] = leaf_gamma(k, data->params.u[s]);
    data->theta[2 * s] = data->gammas[s] / ctx_scale;
    data->theta[2 * s + 1] = 0.5 / ctx_scale;
  }
  if (data->theta.norm() > 1.0 + 1e-12)
    throw ConstructionError("make_adversarial: theta norm exceeds 1");

  // Context norms: worst arm takes the larger branch in every group.
  const StagePartition& part = data->partition;
  for (int t = 1; t <= schedule.T; ++t) {
    const int j = part.stage_of(t);
    double worst_sq = 0.0;
    for (int s = 0; s < g; ++s) {
      double ab = 2.0 * interval(j - 1, ancestor_index(k, data->params.u[s],
                                                       j - 1))
                            .mid();
      double e = std::max(1.0, ab) * schedule.z[t] * ctx_scale;
      worst_sq += e * e;
    }
    if (worst_sq > 1.0 + 1e-12)
      throw ConstructionError(
          "make_adversarial: context norm exceeds 1 at round " +
          std::to_string(t));
  }

  AdversarialInstance inst;
  inst.data_ = data;
  inst.instance_.d = d;
  inst.instance_.n = 1 << g;
  inst.instance_.T = schedule.T;
  inst.instance_.theta = data->theta;
  inst.instance_.noise = NoiseSpec::gaussian(1.0);
  inst.instance_.context_provider = [data](int t) {
    const ZtSchedule& sch = data->partition.schedule;
    const int j = data->partition.stage_of(t);
    const int d_ = data->params.d;
    const int g_ = data->params.groups();
    const int k_ = data->params.k;
    ContextSet cs;
    cs.t = t;
    cs.vectors.resize(1 << g_, Eigen::VectorXd::Zero(d_));
    for (int i = 0; i < (1 << g_); ++i) {
      Eigen::VectorXd& x = cs.vectors[i];
      for (int s = 0; s < g_; ++s) {
        if ((i >> s) & 1) {
          double ab =
              2.0 *
              interval(j - 1, ancestor_index(k_, data->params.u[s], j - 1))
                  .mid();
          x[2 * s + 1] = ab * sch.z[t] * data->ctx_scale;
        } else {
          x[2 * s] = sch.z[t] * data->ctx_scale;
        }
      }
    }
    return cs;
  };
  return inst;
}

double AdversarialInstance::group_value(int t, int s, int bit) const {
  const int j = data_->partition.stage_of(t);
  const double zt = data_->partition.schedule.z[t];
  if (bit == 0) return data_->gammas[s] * zt;
  return interval(j - 1,
                  ancestor_index(data_->params.k, data_->params.u[s], j - 1))
             .mid() *
         zt;
}

bool AdversarialInstance::is_s_suboptimal(int t, int arm, int s) const {
  if (arm < 0 || arm >= instance_.n || s < 0 || s >= groups())
    throw std::invalid_argument("is_s_suboptimal: index out of range");
  const int bit = (arm >> s) & 1;
  return group_value(t, s, bit) < group_value(t, s, 1 - bit);
}

double AdversarialInstance::s_segment_regret(int t, int arm, int s) const {
  if (arm < 0 || arm >= instance_.n || s < 0 || s >= groups())
    throw std::invalid_argument("s_segment_regret: index out of range");
  const double v0 = group_value(t, s, 0);
  const double v1 = group_value(t, s, 1);
  const double mine = ((arm >> s) & 1) ? v1 : v0;
  return std::max(v0, v1) - mine;
}

int AdversarialInstance::optimal_arm(int t) const {
  int arm = 0;
  for (int s = 0; s < groups(); ++s)
    if (group_value(t, s, 1) > group_value(t, s, 0)) arm |= (1 << s);
  return arm;
}

int AdversarialInstance::shared_stage(const LowerBoundParams& other) const {
  const LowerBoundParams& mine = data_->params;
  if (other.d != mine.d || other.k != mine.k)
    throw std::invalid_argument("shared_stage: incompatible parameters");
  int j = 1;  // tau^0 = 0 for every leaf
  while (j < mine.k) {
    bool same = true;
    for (int s = 0; s < groups(); ++s)
      if (ancestor_index(mine.k, mine.u[s], j) !=
          ancestor_index(mine.k, other.u[s], j)) {
        same = false;
        break;
      }
    if (!same) break;
    ++j;
  }
  return j;
}

double AdversarialInstance::kl_upper_bound(const LowerBoundParams& other,
                                           int t) const {
  const int j = shared_stage(other);
  if (t < 0 || t > data_->partition.t_bounds[j])
    throw std::invalid_argument(
        "kl_upper_bound: round past the shared stage boundary");
  double sum = 0.0;
  for (int s = 0; s < groups(); ++s)
    sum += std::abs(data_->gammas[s] - leaf_gamma(data_->params.k, other.u[s]));
  // 0.5 * scale^2 * (sum_s |dtheta_odd|)^2 * S_t; the scale cancels against
  // the 1/scale in theta, leaving gammas.
  return 0.5 * sum * sum * data_->partition.schedule.S[t];
}

double AdversarialInstance::mean_gap(const LowerBoundParams& other, int t,
                                     int arm) const {
  if (other.d != data_->params.d || other.k != data_->params.k)
    throw std::invalid_argument("mean_gap: incompatible parameters");
  double gap = 0.0;
  const double zt = data_->partition.schedule.z[t];
  for (int s = 0; s < groups(); ++s)
    if (((arm >> s) & 1) == 0)
      gap += zt * (data_->gammas[s] - leaf_gamma(data_->params.k, other.u[s]));
  return std::abs(gap);
}

AdversarialInstance instance_d2(std::uint64_t u, const ZtSchedule& schedule) {
  StagePartition part = stage_partition(schedule);
  LowerBoundParams p;
  p.d = 2;
  p.k = part.k;
  p.u = {u};
  if (p.k < 64 && u >= (1ULL << p.k))
    throw std::invalid_argument("instance_d2: leaf index out of range");
  return make_adversarial(std::move(p), schedule, 1.0);
}

namespace {

// Largest context scale keeping every possible arm inside the unit ball,
// independent of the parameter vector: per group the worst entry coefficient
// at a stage-j round is max(1, 4/3 - 3^-j) * z_t (the rightmost depth-(j-1)
// interval maximizes alpha + beta).
double max_feasible_scale(int groups, const StagePartition& part) {
  const ZtSchedule& sch = part.schedule;
  double worst = 0.0;
  for (int j = 1; j <= part.k; ++j) {
    double ab = 4.0 / 3.0 - std::pow(3.0, -j);
    double coeff = std::max(1.0, ab) * sch.z[part.t_bounds[j]];
    worst = std::max(worst, coeff);
  }
  return 1.0 / (worst * std::sqrt(static_cast<double>(groups)));
}

}  // namespace

AdversarialInstance instance_general(const LowerBoundParams& params,
                                     const ZtSchedule& schedule) {
  // The nominal scale is sqrt(d). At desk-scale horizons that can push the
  // worst arm outside the unit ball, so cap it at the largest feasible value;
  // reward gaps, margins, and KL budgets do not depend on the scale.
  StagePartition part = stage_partition(schedule);
  double scale = std::min(std::sqrt(static_cast<double>(params.d)),
                          max_feasible_scale(params.groups(), part));
  return make_adversarial(params, schedule, scale);
}

PhasedInstance instance_phased(int n, int d, int T, double eps,
                               std::uint64_t seed) {
  if (n < 2 || (n & (n - 1)) != 0)
    throw ConstructionError("instance_phased: n must be a power of 2, >= 2");
  int l = 0;
  while ((1 << (l + 1)) <= n) ++l;  // l = log2(n)
  const int block = 2 * l;          // dims needed to host 2^l arms
  if (block > d)
    throw ConstructionError("instance_phased: n exceeds 2^(d/2)");
  if (d % block != 0)
    throw ConstructionError(
        "instance_phased: d must be a multiple of 2*log2(n)");
  const int phases = d / block;
  if (T % phases != 0)
    throw ConstructionError(
        "instance_phased: T must be divisible by the phase count");
  const int phase_len = T / phases;
  if (static_cast<double>(phase_len) < std::pow(static_cast<double>(l), 2.0 + eps))
    throw ConstructionError("instance_phased: phase length too short");

  PhasedInstance out;
  out.phase_len_ = phase_len;
  out.block_dims_ = block;

  ZtSchedule sub_schedule = zt_schedule(phase_len, eps);
  StagePartition sub_part = stage_partition(sub_schedule);
  // Full-d scaling keeps the concatenated theta inside the unit ball; capped
  // as in instance_general so contexts stay inside it too.
  const double scale = std::min(std::sqrt(static_cast<double>(d)),
                                max_feasible_scale(block / 2, sub_part));
  Rng rng(seed);
  for (int j = 0; j < phases; ++j) {
    LowerBoundParams p = sample_params(block, sub_part.k, rng);
    out.phases_.push_back(make_adversarial(std::move(p), sub_schedule, scale));
  }

  out.instance_.d = d;
  out.instance_.n = n;
  out.instance_.T = T;
  out.instance_.noise = NoiseSpec::gaussian(1.0);
  out.instance_.theta = Eigen::VectorXd::Zero(d);
  for (int j = 0; j < phases; ++j)
    out.instance_.theta.segment(j * block, block) =
        out.phases_[j].instance().theta;
  if (out.instance_.theta.norm() > 1.0 + 1e-12)
    throw ConstructionError("instance_phased: theta norm exceeds 1");

  std::vector<AdversarialInstance> phase_copies = out.phases_;
  int d_copy = d, block_copy = block, len_copy = phase_len;
  out.instance_.context_provider = [phase_copies, d_copy, block_copy,
                                    len_copy](int t) {
    const int j = (t - 1) / len_copy;
    const int local_t = t - j * len_copy;
    ContextSet sub = phase_copies[j].instance().context_provider(local_t);
    ContextSet cs;
    cs.t = t;
    cs.vectors.resize(sub.vectors.size(), Eigen::VectorXd::Zero(d_copy));
    for (std::size_t i = 0; i < sub.vectors.size(); ++i)
      cs.vectors[i].segment(j * block_copy, block_copy) = sub.vectors[i];
    return cs;
  };
  return out;
}

}  // namespace banditlab
