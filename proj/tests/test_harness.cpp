#include <doctest.h>

#include <cmath>

#include "banditlab/harness.hpp"

using namespace banditlab;

namespace {

const char* kBaseConfig = R"({
  "policy": "vcl",
  "instance": {"type": "random", "d": 3, "n": 4, "T": 128, "theta_seed": 5},
  "replications": 4,
  "base_seed": 99
})";

}  // namespace

TEST_CASE("parse_config round trip") {
  ExperimentConfig cfg = parse_config(kBaseConfig);
  CHECK(cfg.policy == "vcl");
  CHECK(cfg.instance.type == InstanceSpec::Type::kRandom);
  CHECK(cfg.instance.d == 3);
  CHECK(cfg.instance.T == 128);
  CHECK(cfg.replications == 4);
  CHECK(cfg.base_seed == 99);
  // Default checkpoints: powers of 2 up to T, then T.
  CHECK(cfg.checkpoints.front() == 1);
  CHECK(cfg.checkpoints.back() == 128);
}

TEST_CASE("parse_config rejects malformed input") {
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config("[1,2]"), ConfigError);
  // Unknown top-level key.
  CHECK_THROWS_AS(parse_config(R"({
    "policy": "vcl",
    "instance": {"type": "random", "d": 2, "n": 2, "T": 8, "theta_seed": 1},
    "replications": 1, "base_seed": 0, "bogus": 1})"),
                  ConfigError);
  // Unknown instance key.
  CHECK_THROWS_AS(parse_config(R"({
    "policy": "vcl",
    "instance": {"type": "random", "d": 2, "n": 2, "T": 8, "theta_seed": 1,
                 "extra": true},
    "replications": 1, "base_seed": 0})"),
                  ConfigError);
  // Unknown policy / instance type.
  CHECK_THROWS_AS(parse_config(R"({
    "policy": "thompson",
    "instance": {"type": "random", "d": 2, "n": 2, "T": 8, "theta_seed": 1},
    "replications": 1, "base_seed": 0})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({
    "policy": "vcl",
    "instance": {"type": "weird", "T": 8},
    "replications": 1, "base_seed": 0})"),
                  ConfigError);
  // Bad checkpoint ordering.
  CHECK_THROWS_AS(parse_config(R"({
    "policy": "vcl",
    "instance": {"type": "random", "d": 2, "n": 2, "T": 8, "theta_seed": 1},
    "replications": 1, "base_seed": 0, "checkpoints": [4, 2]})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({
    "policy": "vcl",
    "instance": {"type": "random", "d": 2, "n": 2, "T": 8, "theta_seed": 1},
    "replications": 0, "base_seed": 0})"),
                  ConfigError);
}

TEST_CASE("run_experiment basic row structure and determinism") {
  ExperimentConfig cfg = parse_config(kBaseConfig);
  cfg.jobs = 1;
  auto rows1 = run_experiment(cfg);
  cfg.jobs = 2;
  auto rows2 = run_experiment(cfg);
  CHECK(rows_to_csv(rows1) == rows_to_csv(rows2));

  CHECK(rows1.size() == 4 * cfg.checkpoints.size());
  int idx = 0;
  for (int r = 0; r < 4; ++r) {
    double prev = -1.0;
    for (int cp : cfg.checkpoints) {
      const ResultRow& row = rows1[idx++];
      CHECK(row.replication == r);
      CHECK(row.seed == mix(99, r));
      CHECK(row.checkpoint == cp);
      CHECK(row.cum_regret >= prev);  // nondecreasing within a replication
      prev = row.cum_regret;
      CHECK(!row.zeta_hist.empty());  // vcl publishes the layer histogram
      CHECK(!row.subopt_pulls.has_value());
    }
  }
}

TEST_CASE("run_experiment on a single-arm instance has zero regret") {
  ExperimentConfig cfg = parse_config(R"({
    "policy": "random",
    "instance": {"type": "random", "d": 2, "n": 1, "T": 64, "theta_seed": 3},
    "replications": 2, "base_seed": 1})");
  for (const auto& row : run_experiment(cfg))
    CHECK(row.cum_regret == doctest::Approx(0.0));
}

TEST_CASE("adversarial config populates suboptimal pull counts") {
  ExperimentConfig cfg = parse_config(R"({
    "policy": "linucb",
    "instance": {"type": "adversarial_d2", "T": 500, "eps": 2.0, "u": "sample"},
    "replications": 3, "base_seed": 7, "checkpoints": [250, 500]})");
  auto rows = run_experiment(cfg);
  CHECK(rows.size() == 6);
  for (const auto& row : rows) {
    REQUIRE(row.subopt_pulls.has_value());
    CHECK(*row.subopt_pulls >= 0);
    CHECK(*row.subopt_pulls <= row.checkpoint);
    CHECK(row.zeta_hist.empty());
  }
  // Counts are cumulative across checkpoints.
  CHECK(*rows[0].subopt_pulls <= *rows[1].subopt_pulls);
}

TEST_CASE("fixed u out of range is a config error") {
  ExperimentConfig cfg = parse_config(R"({
    "policy": "linucb",
    "instance": {"type": "adversarial_d2", "T": 500, "eps": 2.0, "u": 100000},
    "replications": 1, "base_seed": 7})");
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("csv format") {
  ResultRow row;
  row.replication = 1;
  row.seed = 42;
  row.checkpoint = 8;
  row.cum_regret = 1.0 / 3.0;
  std::string csv = rows_to_csv({row});
  CHECK(csv ==
        "replication,seed,checkpoint,cum_regret,subopt_pulls,zeta_hist\n"
        "1,42,8,0.33333333333333331,,\n");
}

TEST_CASE("aggregation helpers match direct recomputation") {
  std::vector<double> xs = {1.0, 2.5, -0.5, 4.0};
  CHECK(mean_of(xs) == doctest::Approx(1.75).epsilon(1e-12));
  double var = ((1.0 - 1.75) * (1.0 - 1.75) + (2.5 - 1.75) * (2.5 - 1.75) +
                (-0.5 - 1.75) * (-0.5 - 1.75) + (4.0 - 1.75) * (4.0 - 1.75)) /
               3.0;
  CHECK(std_error_of(xs) == doctest::Approx(std::sqrt(var / 4.0)).epsilon(1e-12));
}

TEST_CASE("fit_scaling_exponent oracles") {
  auto on_curve = [](double c, double p) {
    std::vector<std::pair<int, double>> pts;
    for (int T : {100, 1000, 10000}) pts.emplace_back(T, c * std::pow(T, p));
    return pts;
  };
  ScalingFit lin = fit_scaling_exponent(on_curve(0.3, 1.0));
  REQUIRE(lin.defined);
  CHECK(lin.slope == doctest::Approx(1.0).epsilon(1e-12));
  ScalingFit root = fit_scaling_exponent(on_curve(2.0, 0.5));
  REQUIRE(root.defined);
  CHECK(root.slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(root.intercept == doctest::Approx(std::log(2.0)).epsilon(1e-9));

  // Independent closed-form OLS on three noisy points.
  std::vector<std::pair<int, double>> noisy = {
      {100, 31.7}, {1000, 99.2}, {10000, 340.5}};
  double x1 = std::log(100.0), x2 = std::log(1000.0), x3 = std::log(10000.0);
  double y1 = std::log(31.7), y2 = std::log(99.2), y3 = std::log(340.5);
  double mx = (x1 + x2 + x3) / 3.0, my = (y1 + y2 + y3) / 3.0;
  double slope = ((x1 - mx) * (y1 - my) + (x2 - mx) * (y2 - my) +
                  (x3 - mx) * (y3 - my)) /
                 ((x1 - mx) * (x1 - mx) + (x2 - mx) * (x2 - mx) +
                  (x3 - mx) * (x3 - mx));
  ScalingFit fit = fit_scaling_exponent(noisy);
  REQUIRE(fit.defined);
  CHECK(fit.slope == doctest::Approx(slope).epsilon(1e-9));

  // Degenerate inputs give the undefined marker, not an exception.
  CHECK_FALSE(fit_scaling_exponent({{100, 0.0}, {1000, 1.0}}).defined);
  CHECK_FALSE(fit_scaling_exponent({{100, -2.0}, {1000, 1.0}}).defined);
  CHECK_FALSE(fit_scaling_exponent({{100, 1.0}}).defined);
}

TEST_CASE("sweep on zero-theta instances reports an undefined slope") {
  ExperimentConfig base = parse_config(R"({
    "policy": "random",
    "instance": {"type": "random", "d": 2, "n": 1, "T": 32, "theta_seed": 2},
    "replications": 2, "base_seed": 4})");
  SweepResult res = sweep(base, {32, 64, 128});
  CHECK(res.points.size() == 3);
  for (const auto& p : res.points) CHECK(p.mean_regret == doctest::Approx(0.0));
  CHECK_FALSE(res.fit.defined);
  CHECK_THROWS_AS(sweep(base, {32, 64}), ConfigError);
}

TEST_CASE("lowerbound_eval floor accounting on a small run") {
  LowerBoundSummary s = lowerbound_eval("linucb", 2, 400, 2.0, 5, 11, 1);
  CHECK(s.samples == 5);
  CHECK(s.per_pull_floor ==
        doctest::Approx(std::sqrt(std::log(400.0)) / (36.0 * 20.0)));
  CHECK(s.mean_subopt_pulls >= 0.0);
  CHECK(s.floor_respected);
  CHECK_THROWS_AS(lowerbound_eval("linucb", 2, 1, 2.0, 2, 0, 1),
                  ConstructionError);
}
