#include "banditlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

namespace banditlab {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

template <typename T>
T get_required(const json& obj, const std::string& key,
               const std::string& where) {
  if (!obj.contains(key))
    throw ConfigError("missing key '" + key + "' in " + where);
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for '" + key + "' in " + where);
  }
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

InstanceSpec parse_instance(const json& j) {
  if (!j.is_object()) throw ConfigError("'instance' must be an object");
  InstanceSpec spec;
  const std::string type = get_required<std::string>(j, "type", "instance");
  if (type == "random") {
    require_keys(j, {"type", "d", "n", "T", "theta_seed"}, "random instance");
    spec.type = InstanceSpec::Type::kRandom;
    spec.d = get_required<int>(j, "d", "instance");
    spec.n = get_required<int>(j, "n", "instance");
    spec.T = get_required<int>(j, "T", "instance");
    spec.theta_seed = get_required<std::uint64_t>(j, "theta_seed", "instance");
  } else if (type == "adversarial_d2") {
    require_keys(j, {"type", "T", "eps", "u"}, "adversarial_d2 instance");
    spec.type = InstanceSpec::Type::kAdversarialD2;
    spec.d = 2;
    spec.n = 2;
    spec.T = get_required<int>(j, "T", "instance");
    if (j.contains("eps")) spec.eps = get_required<double>(j, "eps", "instance");
    if (!j.contains("u")) throw ConfigError("missing key 'u' in instance");
    if (j.at("u").is_string()) {
      if (j.at("u").get<std::string>() != "sample")
        throw ConfigError("'u' must be an integer or \"sample\"");
      spec.sample_params = true;
    } else {
      spec.u = {get_required<std::uint64_t>(j, "u", "instance")};
    }
  } else if (type == "adversarial_general") {
    require_keys(j, {"type", "d", "T", "eps", "U"},
                 "adversarial_general instance");
    spec.type = InstanceSpec::Type::kAdversarialGeneral;
    spec.d = get_required<int>(j, "d", "instance");
    if (spec.d < 2 || spec.d % 2 != 0)
      throw ConfigError("adversarial_general: d must be even and >= 2");
    spec.n = 1 << (spec.d / 2);
    spec.T = get_required<int>(j, "T", "instance");
    if (j.contains("eps")) spec.eps = get_required<double>(j, "eps", "instance");
    if (!j.contains("U")) throw ConfigError("missing key 'U' in instance");
    if (j.at("U").is_string()) {
      if (j.at("U").get<std::string>() != "sample")
        throw ConfigError("'U' must be an array or \"sample\"");
      spec.sample_params = true;
    } else {
      spec.u = get_required<std::vector<std::uint64_t>>(j, "U", "instance");
      if (static_cast<int>(spec.u.size()) != spec.d / 2)
        throw ConfigError("adversarial_general: U must have d/2 entries");
    }
  } else if (type == "phased") {
    require_keys(j, {"type", "n", "d", "T", "eps", "seed"}, "phased instance");
    spec.type = InstanceSpec::Type::kPhased;
    spec.n = get_required<int>(j, "n", "instance");
    spec.d = get_required<int>(j, "d", "instance");
    spec.T = get_required<int>(j, "T", "instance");
    if (j.contains("eps")) spec.eps = get_required<double>(j, "eps", "instance");
    if (j.contains("seed"))
      spec.seed = get_required<std::uint64_t>(j, "seed", "instance");
  } else {
    throw ConfigError("unknown instance type '" + type + "'");
  }
  if (spec.T < 1) throw ConfigError("instance: T must be >= 1");
  return spec;
}

std::vector<int> default_checkpoints(int T) {
  std::vector<int> cps;
  for (int c = 1; c < T; c *= 2) cps.push_back(c);
  cps.push_back(T);
  return cps;
}

struct RepOutput {
  std::vector<ResultRow> rows;
};

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  require_keys(j,
               {"policy", "instance", "replications", "base_seed",
                "output_path", "checkpoints", "jobs"},
               "config");

  ExperimentConfig cfg;
  cfg.policy = get_required<std::string>(j, "policy", "config");
  if (cfg.policy != "vcl" && cfg.policy != "suplinucb" &&
      cfg.policy != "linucb" && cfg.policy != "random")
    throw ConfigError("unknown policy '" + cfg.policy + "'");
  if (!j.contains("instance")) throw ConfigError("missing key 'instance'");
  cfg.instance = parse_instance(j.at("instance"));
  cfg.replications = get_required<int>(j, "replications", "config");
  if (cfg.replications < 1) throw ConfigError("replications must be >= 1");
  cfg.base_seed = get_required<std::uint64_t>(j, "base_seed", "config");
  if (j.contains("output_path"))
    cfg.output_path = get_required<std::string>(j, "output_path", "config");
  if (j.contains("jobs")) cfg.jobs = get_required<int>(j, "jobs", "config");
  if (j.contains("checkpoints")) {
    cfg.checkpoints = get_required<std::vector<int>>(j, "checkpoints", "config");
    for (std::size_t i = 0; i < cfg.checkpoints.size(); ++i) {
      if (cfg.checkpoints[i] < 1 || cfg.checkpoints[i] > cfg.instance.T)
        throw ConfigError("checkpoints must lie in [1, T]");
      if (i > 0 && cfg.checkpoints[i] <= cfg.checkpoints[i - 1])
        throw ConfigError("checkpoints must be strictly increasing");
    }
  } else {
    cfg.checkpoints = default_checkpoints(cfg.instance.T);
  }
  return cfg;
}

std::unique_ptr<Policy> make_policy(const std::string& name) {
  if (name == "vcl") return std::make_unique<VclPolicy>();
  if (name == "suplinucb") return std::make_unique<SupLinUcbPolicy>();
  if (name == "linucb") return std::make_unique<LinUcbPolicy>();
  if (name == "random") return std::make_unique<RandomPolicy>();
  throw ConfigError("unknown policy '" + name + "'");
}

Instance make_random_instance(int d, int n, int T, std::uint64_t theta_seed) {
  if (d < 1 || n < 1 || T < 1)
    throw ConfigError("random instance: d, n, T must be >= 1");
  Rng theta_rng(mix(theta_seed, 0));
  Eigen::VectorXd theta(d);
  for (int i = 0; i < d; ++i) theta[i] = theta_rng.next_gaussian();
  double nrm = theta.norm();
  if (nrm > 0) theta /= nrm;

  Instance inst;
  inst.d = d;
  inst.n = n;
  inst.T = T;
  inst.theta = theta;
  inst.noise = NoiseSpec::gaussian(1.0);
  inst.context_provider = [d, n, theta_seed](int t) {
    Rng rng(mix(theta_seed, static_cast<std::uint64_t>(t)));
    ContextSet cs;
    cs.t = t;
    cs.vectors.resize(n);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd x(d);
      for (int c = 0; c < d; ++c) x[c] = rng.next_gaussian();
      double v = x.norm();
      if (v > 0) x /= v;
      cs.vectors[i] = x;
    }
    return cs;
  };
  return inst;
}

namespace {

// Builds the environment for one replication and runs it, producing the
// checkpoint rows for that replication.
RepOutput run_replication(const ExperimentConfig& cfg, int rep,
                          const ZtSchedule* shared_schedule, int adv_k) {
  const std::uint64_t seed = mix(cfg.base_seed, static_cast<std::uint64_t>(rep));

  Instance instance;
  std::optional<AdversarialInstance> adv;
  switch (cfg.instance.type) {
    case InstanceSpec::Type::kRandom:
      instance = make_random_instance(cfg.instance.d, cfg.instance.n,
                                      cfg.instance.T, cfg.instance.theta_seed);
      break;
    case InstanceSpec::Type::kAdversarialD2:
    case InstanceSpec::Type::kAdversarialGeneral: {
      LowerBoundParams params;
      params.d = cfg.instance.d;
      params.k = adv_k;
      if (cfg.instance.sample_params) {
        Rng rng(mix(cfg.base_seed, static_cast<std::uint64_t>(rep), 1));
        params = sample_params(cfg.instance.d, adv_k, rng);
      } else {
        params.u = cfg.instance.u;
      }
      adv = (cfg.instance.type == InstanceSpec::Type::kAdversarialD2)
                ? make_adversarial(params, *shared_schedule, 1.0)
                : instance_general(params, *shared_schedule);
      instance = adv->instance();
      break;
    }
    case InstanceSpec::Type::kPhased: {
      PhasedInstance ph =
          instance_phased(cfg.instance.n, cfg.instance.d, cfg.instance.T,
                          cfg.instance.eps, cfg.instance.seed);
      instance = ph.instance();
      break;
    }
  }

  auto policy = make_policy(cfg.policy);
  const bool want_zeta = cfg.policy == "vcl";
  RegretTrace trace = simulate(*policy, instance, seed, want_zeta);

  RepOutput out;
  std::map<int, long long> zeta_counts;
  long long subopt = 0;
  std::size_t next_cp = 0;
  for (int t = 1; t <= instance.T && next_cp < cfg.checkpoints.size(); ++t) {
    if (adv) {
      for (int s = 0; s < adv->groups(); ++s)
        if (adv->is_s_suboptimal(t, trace.chosen[t - 1], s)) ++subopt;
    }
    if (want_zeta) {
      auto diag = trace.diagnostics[t - 1];
      zeta_counts[static_cast<int>(diag.at("zeta"))]++;
    }
    if (t == cfg.checkpoints[next_cp]) {
      ResultRow row;
      row.replication = rep;
      row.seed = seed;
      row.checkpoint = t;
      row.cum_regret = trace.cum_regret[t - 1];
      if (adv) row.subopt_pulls = subopt;
      if (want_zeta) {
        std::ostringstream os;
        bool first = true;
        for (const auto& [z, c] : zeta_counts) {
          if (!first) os << "|";
          os << z << ":" << c;
          first = false;
        }
        row.zeta_hist = os.str();
      }
      out.rows.push_back(std::move(row));
      ++next_cp;
    }
  }
  return out;
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  // Shared read-only schedule for adversarial families.
  std::optional<ZtSchedule> schedule;
  int adv_k = 0;
  if (cfg.instance.type == InstanceSpec::Type::kAdversarialD2 ||
      cfg.instance.type == InstanceSpec::Type::kAdversarialGeneral) {
    schedule = zt_schedule(cfg.instance.T, cfg.instance.eps);
    adv_k = stage_partition(*schedule).k;
    if (!cfg.instance.sample_params) {
      for (auto us : cfg.instance.u)
        if (adv_k < 64 && us >= (1ULL << adv_k))
          throw ConfigError("instance parameter u out of range for k=" +
                            std::to_string(adv_k));
    }
  } else if (cfg.instance.type == InstanceSpec::Type::kPhased) {
    // Validate construction eagerly so errors surface before threads start.
    instance_phased(cfg.instance.n, cfg.instance.d, cfg.instance.T,
                    cfg.instance.eps, cfg.instance.seed);
  }

  const int jobs = cfg.jobs > 0
                       ? cfg.jobs
                       : std::max(1u, std::thread::hardware_concurrency());
  std::vector<RepOutput> outputs(cfg.replications);

  if (jobs <= 1 || cfg.replications == 1) {
    for (int r = 0; r < cfg.replications; ++r)
      outputs[r] = run_replication(cfg, r, schedule ? &*schedule : nullptr,
                                   adv_k);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
      for (;;) {
        int r = next.fetch_add(1);
        if (r >= cfg.replications) return;
        try {
          outputs[r] = run_replication(cfg, r,
                                       schedule ? &*schedule : nullptr, adv_k);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> threads;
    for (int w = 0; w < std::min(jobs, cfg.replications); ++w)
      threads.emplace_back(worker);
    for (auto& th : threads) th.join();
    if (error) std::rethrow_exception(error);
  }

  std::vector<ResultRow> rows;
  for (auto& o : outputs)
    for (auto& r : o.rows) rows.push_back(std::move(r));

  if (!cfg.output_path.empty()) {
    std::ofstream f(cfg.output_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + cfg.output_path);
    f << rows_to_csv(rows);
  }
  return rows;
}

std::string rows_to_csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  os << "replication,seed,checkpoint,cum_regret,subopt_pulls,zeta_hist\n";
  for (const auto& r : rows) {
    os << r.replication << "," << r.seed << "," << r.checkpoint << ","
       << fmt_double(r.cum_regret) << ",";
    if (r.subopt_pulls) os << *r.subopt_pulls;
    os << "," << r.zeta_hist << "\n";
  }
  return os.str();
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double std_error_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  double m = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  double var = ss / static_cast<double>(xs.size() - 1);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

ScalingFit fit_scaling_exponent(
    const std::vector<std::pair<int, double>>& points) {
  ScalingFit fit;
  if (points.size() < 2) return fit;
  for (const auto& [T, r] : points)
    if (T < 1 || r <= 0.0) return fit;  // undefined marker

  const std::size_t m = points.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [T, r] : points) {
    double x = std::log(static_cast<double>(T));
    double y = std::log(r);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = m * sxx - sx * sx;
  if (denom == 0.0) return fit;
  fit.slope = (m * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / m;
  fit.residual = 0.0;
  for (const auto& [T, r] : points) {
    double e = std::log(r) - (fit.intercept +
                              fit.slope * std::log(static_cast<double>(T)));
    fit.residual += e * e;
  }
  fit.defined = true;
  return fit;
}

SweepResult sweep(const ExperimentConfig& base, const std::vector<int>& horizons) {
  if (horizons.size() < 3)
    throw ConfigError("sweep: need at least 3 horizon values");
  SweepResult result;
  std::vector<std::pair<int, double>> pts;
  for (int T : horizons) {
    ExperimentConfig cfg = base;
    cfg.instance.T = T;
    cfg.checkpoints = {T};
    cfg.output_path.clear();
    auto rows = run_experiment(cfg);
    std::vector<double> finals;
    for (const auto& r : rows)
      if (r.checkpoint == T) finals.push_back(r.cum_regret);
    ScalingPoint p;
    p.T = T;
    p.mean_regret = mean_of(finals);
    p.std_error = std_error_of(finals);
    result.points.push_back(p);
    pts.emplace_back(T, p.mean_regret);
  }
  result.fit = fit_scaling_exponent(pts);
  return result;
}

LowerBoundSummary lowerbound_eval(const std::string& policy, int d, int T,
                                  double eps, int samples,
                                  std::uint64_t base_seed, int jobs) {
  if (samples < 1) throw ConfigError("lowerbound_eval: samples must be >= 1");
  if (T < 2)
    throw ConstructionError("lowerbound_eval: horizon too short to build stages");
  ZtSchedule schedule = zt_schedule(T, eps);
  StagePartition part = stage_partition(schedule);

  struct SampleOut {
    double pulls = 0.0;
    double regret = 0.0;
  };
  std::vector<SampleOut> outs(samples);

  const int njobs =
      jobs > 0 ? jobs : std::max(1u, std::thread::hardware_concurrency());
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  auto worker = [&] {
    for (;;) {
      int i = next.fetch_add(1);
      if (i >= samples) return;
      try {
        Rng prng(mix(base_seed, static_cast<std::uint64_t>(i), 1));
        LowerBoundParams params = sample_params(d, part.k, prng);
        AdversarialInstance adv =
            (d == 2) ? make_adversarial(params, schedule, 1.0)
                     : instance_general(params, schedule);
        auto pol = make_policy(policy);
        RegretTrace trace =
            simulate(*pol, adv.instance(), mix(base_seed, i), false);
        long long pulls = 0;
        for (int t = 1; t <= T; ++t)
          for (int s = 0; s < adv.groups(); ++s)
            if (adv.is_s_suboptimal(t, trace.chosen[t - 1], s)) ++pulls;
        outs[i].pulls = static_cast<double>(pulls);
        outs[i].regret = trace.cum_regret.back();
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> threads;
  for (int w = 0; w < std::min(njobs, samples); ++w) threads.emplace_back(worker);
  for (auto& th : threads) th.join();
  if (error) std::rethrow_exception(error);

  LowerBoundSummary sum;
  sum.samples = samples;
  sum.per_pull_floor = std::sqrt(eps * std::log(static_cast<double>(T))) /
                       (36.0 * std::sqrt(2.0 * T));
  std::vector<double> pulls, regrets;
  for (const auto& o : outs) {
    pulls.push_back(o.pulls);
    regrets.push_back(o.regret);
    if (o.regret + 1e-9 < o.pulls * sum.per_pull_floor)
      sum.floor_respected = false;
  }
  sum.mean_subopt_pulls = mean_of(pulls);
  sum.mean_regret = mean_of(regrets);
  sum.pull_floor_fraction =
      sum.mean_subopt_pulls / (static_cast<double>(T) * (d / 2));
  return sum;
}

}  // namespace banditlab
