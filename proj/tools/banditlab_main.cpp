#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "banditlab/harness.hpp"
#include "banditlab/potential.hpp"

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw banditlab::ConfigError("cannot read config file " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

struct GlobalOpts {
  bool seed_set = false;
  std::uint64_t seed = 0;
  int jobs = 0;
  std::string out;
};

void apply_globals(banditlab::ExperimentConfig& cfg, const GlobalOpts& g) {
  if (g.seed_set) cfg.base_seed = g.seed;
  if (g.jobs > 0) cfg.jobs = g.jobs;
  if (!g.out.empty()) cfg.output_path = g.out;
}

int cmd_run(const std::string& path, const GlobalOpts& g) {
  banditlab::ExperimentConfig cfg = banditlab::parse_config(slurp(path));
  apply_globals(cfg, g);
  auto rows = banditlab::run_experiment(cfg);
  if (cfg.output_path.empty()) std::cout << banditlab::rows_to_csv(rows);
  std::vector<double> finals;
  for (const auto& r : rows)
    if (r.checkpoint == cfg.checkpoints.back()) finals.push_back(r.cum_regret);
  std::fprintf(stderr, "replications %d  final regret mean %.6g  stderr %.6g\n",
               cfg.replications, banditlab::mean_of(finals),
               banditlab::std_error_of(finals));
  return 0;
}

int cmd_sweep(const std::string& path, const GlobalOpts& g) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(slurp(path));
  } catch (const nlohmann::json::exception& e) {
    throw banditlab::ConfigError(std::string("config is not valid JSON: ") +
                                 e.what());
  }
  if (!j.is_object() || !j.contains("horizons"))
    throw banditlab::ConfigError("sweep config needs a 'horizons' array");
  std::vector<int> horizons;
  try {
    horizons = j.at("horizons").get<std::vector<int>>();
  } catch (const nlohmann::json::exception&) {
    throw banditlab::ConfigError("'horizons' must be an array of integers");
  }
  j.erase("horizons");
  banditlab::ExperimentConfig base = banditlab::parse_config(j.dump());
  apply_globals(base, g);

  banditlab::SweepResult res = banditlab::sweep(base, horizons);
  std::ostringstream os;
  os << "T,mean_regret,std_error\n";
  os.precision(17);
  for (const auto& p : res.points)
    os << p.T << "," << p.mean_regret << "," << p.std_error << "\n";
  if (res.fit.defined) {
    std::fprintf(stderr, "slope %.6f  intercept %.6f  residual %.6g\n",
                 res.fit.slope, res.fit.intercept, res.fit.residual);
  } else {
    std::fprintf(stderr, "slope undefined\n");
  }
  if (g.out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(g.out, std::ios::binary);
    f << os.str();
  }
  return 0;
}

int cmd_lowerbound(const std::string& policy, int d, int T, double eps,
                   int samples, const GlobalOpts& g) {
  banditlab::LowerBoundSummary s =
      banditlab::lowerbound_eval(policy, d, T, eps, samples, g.seed, g.jobs);
  std::ostringstream os;
  os.precision(12);
  os << "samples            " << s.samples << "\n"
     << "mean_subopt_pulls  " << s.mean_subopt_pulls << "\n"
     << "mean_regret        " << s.mean_regret << "\n"
     << "per_pull_floor     " << s.per_pull_floor << "\n"
     << "pull_floor_frac    " << s.pull_floor_fraction << "\n"
     << "floor_respected    " << (s.floor_respected ? "yes" : "NO") << "\n";
  if (g.out.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream f(g.out, std::ios::binary);
    f << os.str();
  }
  return s.floor_respected ? 0 : 1;
}

int cmd_potential(int T, double eps, const GlobalOpts& g) {
  banditlab::PotentialReport rep = banditlab::tightness_report(T, eps);
  std::cout << rep.to_text();
  if (!g.out.empty()) {
    banditlab::ZtSchedule sched = banditlab::zt_schedule(T, eps);
    std::ofstream f(g.out, std::ios::binary);
    f << rep.to_csv(&sched);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"linear contextual bandit laboratory"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "override base seed")
      ->each([&g](const std::string&) { g.seed_set = true; });
  app.add_option("--jobs", g.jobs, "worker thread count (default: cores)");
  app.add_option("--out", g.out, "override output path");

  std::string run_cfg, sweep_cfg;
  auto* run = app.add_subcommand("run", "run one experiment from a config");
  run->add_option("config", run_cfg, "JSON config file")->required();

  auto* sw = app.add_subcommand("sweep", "horizon sweep with a scaling fit");
  sw->add_option("config", sweep_cfg, "JSON config file with 'horizons'")
      ->required();

  std::string lb_policy = "vcl";
  int lb_d = 2, lb_T = 5000, lb_samples = 200;
  double lb_eps = 2.0;
  auto* lb = app.add_subcommand("lowerbound",
                                "evaluate a policy on adversarial instances");
  lb->add_option("--policy", lb_policy, "vcl | suplinucb | linucb | random");
  lb->add_option("--d", lb_d, "dimension (even)");
  lb->add_option("--T", lb_T, "horizon");
  lb->add_option("--eps", lb_eps, "schedule exponent parameter");
  lb->add_option("--samples", lb_samples, "number of sampled instances");

  int pot_T = 0;
  double pot_eps = 2.0;
  auto* pot = app.add_subcommand("potential", "tight-schedule verifier");
  pot->add_option("--T", pot_T, "horizon")->required();
  pot->add_option("--eps", pot_eps, "schedule exponent parameter");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_cfg, g);
    if (sw->parsed()) return cmd_sweep(sweep_cfg, g);
    if (lb->parsed())
      return cmd_lowerbound(lb_policy, lb_d, lb_T, lb_eps, lb_samples, g);
    if (pot->parsed()) return cmd_potential(pot_T, pot_eps, g);
  } catch (const banditlab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const banditlab::ConstructionError& e) {
    std::fprintf(stderr, "construction error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "check failed: %s\n", e.what());
    return 1;
  }
  return 2;
}
