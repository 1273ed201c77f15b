#include "banditlab/policies.hpp"

#include <cmath>
#include <limits>

namespace banditlab {

namespace {

void require_pending(bool pending, const char* who) {
  if (!pending)
    throw ProtocolViolation(std::string(who) + ": update without pending select");
}

void require_not_pending(bool pending, const char* who) {
  if (pending)
    throw ProtocolViolation(std::string(who) + ": select while update pending");
}

}  // namespace

// ---------------------------------------------------------------------------
// VCL-SupLinUCB

int VclPolicy::compute_zeta0(int T, int d) {
  // ceil(log2(sqrt(T/d))), clamped below at 1 so ln(n*zeta0) stays defined.
  double v = std::log2(std::sqrt(static_cast<double>(T) / d));
  int z = static_cast<int>(std::ceil(v));
  return std::max(1, z);
}

void VclPolicy::reset(int d, int n, int T, std::uint64_t /*seed*/) {
  d_ = d;
  n_ = n;
  T_ = T;
  round_ = 0;
  zeta0_ = compute_zeta0(T, d);
  layers_.clear();
  layers_.reserve(zeta0_ + 1);
  for (int z = 0; z <= zeta0_; ++z) layers_.emplace_back(d);
  pending_ = false;
  traces_.clear();
  played_x_.clear();
  played_r_.clear();
}

int VclPolicy::select(const ContextSet& contexts) {
  require_not_pending(pending_, "VclPolicy");
  if (contexts.n() == 0) throw ProtocolViolation("VclPolicy: empty context set");

  const double sqrt_2ln_nz0 =
      std::sqrt(2.0 * std::max(0.0, std::log(static_cast<double>(n_) * zeta0_)));

  VclSelectTrace trace;
  trace.t = round_ + 1;

  std::vector<int> survivors(contexts.n());
  for (int i = 0; i < contexts.n(); ++i) survivors[i] = i;

  int chosen = -1;
  int zeta = 0;
  while (chosen < 0) {
    const DesignState& ds = layers_[zeta].design;
    Eigen::VectorXd theta_hat = ds.solve_theta();

    std::vector<double> varpi(survivors.size());
    std::vector<double> omega(survivors.size());
    std::vector<double> mean(survivors.size());
    for (std::size_t p = 0; p < survivors.size(); ++p) {
      const Eigen::VectorXd& x = contexts.vectors[survivors[p]];
      double w = std::sqrt(ds.quadratic_form(x));
      double inner = std::log(static_cast<double>(T_) * w * w / d_);
      double a = 1.0 + std::max(1.0, std::sqrt(std::max(0.0, inner))) * sqrt_2ln_nz0;
      omega[p] = w;
      varpi[p] = a * w;
      mean[p] = x.dot(theta_hat);
    }

    if (tracing_) {
      trace.survivors.push_back(survivors);
      trace.varpis.push_back(varpi);
    }

    const double width = std::ldexp(1.0, -zeta);  // 2^-zeta

    if (zeta == zeta0_) {
      // Clause 1: out of layers, take the lowest-index survivor.
      chosen = survivors[0];
      trace.zeta_t = zeta;
      trace.omega = omega[0];
      trace.varpi = varpi[0];
      break;
    }

    bool all_small = true;
    for (double v : varpi)
      if (v > width) {
        all_small = false;
        break;
      }

    if (all_small) {
      // Clause 2: eliminate arms far below the empirical argmax, descend.
      double best = -std::numeric_limits<double>::infinity();
      std::size_t best_p = 0;
      for (std::size_t p = 0; p < survivors.size(); ++p)
        if (mean[p] > best) {
          best = mean[p];
          best_p = p;
        }
      if (tracing_) trace.emp_argmax.push_back(survivors[best_p]);
      std::vector<int> next;
      for (std::size_t p = 0; p < survivors.size(); ++p)
        if (mean[p] >= best - 2.0 * width) next.push_back(survivors[p]);
      survivors = std::move(next);
      ++zeta;
    } else {
      // Clause 3: any arm whose band is still wider than 2^-zeta may be
      // played; take the optimistic (highest upper-bound) one among them.
      std::size_t best_p = survivors.size();
      for (std::size_t p = 0; p < survivors.size(); ++p) {
        if (varpi[p] <= width) continue;
        if (best_p == survivors.size() ||
            mean[p] + varpi[p] > mean[best_p] + varpi[best_p])
          best_p = p;
      }
      chosen = survivors[best_p];
      trace.zeta_t = zeta;
      trace.omega = omega[best_p];
      trace.varpi = varpi[best_p];
    }
  }

  trace.chosen = chosen;
  if (tracing_) traces_.push_back(std::move(trace));

  pending_ = true;
  pending_zeta_ = zeta;
  pending_x_ = contexts.vectors[chosen];
  last_zeta_ = static_cast<double>(zeta);
  last_varpi_ = trace.varpi;
  return chosen;
}

void VclPolicy::update(int /*chosen*/, double reward) {
  require_pending(pending_, "VclPolicy");
  ++round_;
  layers_[pending_zeta_].design.rank_one_update(pending_x_, reward);
  layers_[pending_zeta_].rounds.push_back(round_);
  if (tracing_) {
    played_x_.push_back(pending_x_);
    played_r_.push_back(reward);
  }
  pending_ = false;
}

std::map<std::string, double> VclPolicy::last_diagnostics() const {
  return {{"zeta", last_zeta_}, {"varpi", last_varpi_}};
}

// ---------------------------------------------------------------------------
// Classical SupLinUCB

double SupLinUcbPolicy::confidence_multiplier(int T, int n) {
  // sqrt(0.5 * ln(2 T n / delta)) with delta = 1/T.
  return std::sqrt(0.5 * std::log(2.0 * static_cast<double>(T) * T * n));
}

void SupLinUcbPolicy::reset(int d, int n, int T, std::uint64_t /*seed*/) {
  d_ = d;
  n_ = n;
  T_ = T;
  zeta0_ = VclPolicy::compute_zeta0(T, d);
  alpha_ = confidence_multiplier(T, n);
  layers_.clear();
  for (int z = 0; z <= zeta0_; ++z) layers_.emplace_back(d);
  pending_ = false;
}

int SupLinUcbPolicy::select(const ContextSet& contexts) {
  require_not_pending(pending_, "SupLinUcbPolicy");
  if (contexts.n() == 0)
    throw ProtocolViolation("SupLinUcbPolicy: empty context set");

  std::vector<int> survivors(contexts.n());
  for (int i = 0; i < contexts.n(); ++i) survivors[i] = i;

  const double mult = 1.0 + alpha_;
  const double stop_width = 1.0 / std::sqrt(static_cast<double>(T_));

  int chosen = -1;
  int zeta = 0;
  while (chosen < 0) {
    const DesignState& ds = layers_[zeta].design;
    Eigen::VectorXd theta_hat = ds.solve_theta();

    std::vector<double> w(survivors.size());
    std::vector<double> mean(survivors.size());
    for (std::size_t p = 0; p < survivors.size(); ++p) {
      const Eigen::VectorXd& x = contexts.vectors[survivors[p]];
      w[p] = mult * std::sqrt(ds.quadratic_form(x));
      mean[p] = x.dot(theta_hat);
    }

    bool all_tiny = true;
    for (double v : w)
      if (v > stop_width) {
        all_tiny = false;
        break;
      }
    if (all_tiny) {
      // Confident everywhere: exploit the optimistic estimate.
      std::size_t best_p = 0;
      for (std::size_t p = 1; p < survivors.size(); ++p)
        if (mean[p] + w[p] > mean[best_p] + w[best_p]) best_p = p;
      chosen = survivors[best_p];
      break;
    }

    const double width = std::ldexp(1.0, -zeta);
    if (zeta == zeta0_) {
      chosen = survivors[0];
      break;
    }

    bool all_small = true;
    for (double v : w)
      if (v > width) {
        all_small = false;
        break;
      }
    if (all_small) {
      double best = -std::numeric_limits<double>::infinity();
      for (double m : mean) best = std::max(best, m);
      std::vector<int> next;
      for (std::size_t p = 0; p < survivors.size(); ++p)
        if (mean[p] >= best - 2.0 * width) next.push_back(survivors[p]);
      survivors = std::move(next);
      ++zeta;
    } else {
      std::size_t best_p = 0;
      for (std::size_t p = 1; p < survivors.size(); ++p)
        if (w[p] > w[best_p]) best_p = p;
      chosen = survivors[best_p];
    }
  }

  pending_ = true;
  pending_zeta_ = zeta;
  pending_x_ = contexts.vectors[chosen];
  last_zeta_ = static_cast<double>(zeta);
  return chosen;
}

void SupLinUcbPolicy::update(int /*chosen*/, double reward) {
  require_pending(pending_, "SupLinUcbPolicy");
  layers_[pending_zeta_].design.rank_one_update(pending_x_, reward);
  pending_ = false;
}

std::map<std::string, double> SupLinUcbPolicy::last_diagnostics() const {
  return {{"zeta", last_zeta_}};
}

// ---------------------------------------------------------------------------
// Ridge-UCB (single design matrix)

void LinUcbPolicy::reset(int d, int /*n*/, int T, std::uint64_t /*seed*/) {
  d_ = d;
  T_ = T;
  round_ = 0;
  design_ = std::make_unique<DesignState>(d);
  pending_ = false;
}

int LinUcbPolicy::select(const ContextSet& contexts) {
  require_not_pending(pending_, "LinUcbPolicy");
  if (contexts.n() == 0)
    throw ProtocolViolation("LinUcbPolicy: empty context set");

  const int t = round_ + 1;
  const double beta =
      1.0 + std::sqrt(d_ * std::log((1.0 + t) * static_cast<double>(T_)));
  Eigen::VectorXd theta_hat = design_->solve_theta();

  int best = 0;
  double best_ucb = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < contexts.n(); ++i) {
    const Eigen::VectorXd& x = contexts.vectors[i];
    double ucb = x.dot(theta_hat) + beta * std::sqrt(design_->quadratic_form(x));
    if (ucb > best_ucb) {
      best_ucb = ucb;
      best = i;
    }
  }
  pending_ = true;
  pending_x_ = contexts.vectors[best];
  return best;
}

void LinUcbPolicy::update(int /*chosen*/, double reward) {
  require_pending(pending_, "LinUcbPolicy");
  ++round_;
  design_->rank_one_update(pending_x_, reward);
  pending_ = false;
}

// ---------------------------------------------------------------------------
// Uniform random baseline

int random_select(Rng& rng, int n) {
  if (n < 1) throw ProtocolViolation("random_select: n must be >= 1");
  return static_cast<int>(rng.next_index(static_cast<std::uint64_t>(n)));
}

void RandomPolicy::reset(int /*d*/, int n, int /*T*/, std::uint64_t seed) {
  n_ = n;
  rng_ = Rng(seed);
  pending_ = false;
}

int RandomPolicy::select(const ContextSet& contexts) {
  require_not_pending(pending_, "RandomPolicy");
  pending_ = true;
  return random_select(rng_, contexts.n());
}

void RandomPolicy::update(int /*chosen*/, double /*reward*/) {
  require_pending(pending_, "RandomPolicy");
  pending_ = false;
}

}  // namespace banditlab
