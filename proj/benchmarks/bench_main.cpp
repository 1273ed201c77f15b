#include <benchmark/benchmark.h>

#include "banditlab/adversarial.hpp"
#include "banditlab/design_state.hpp"
#include "banditlab/policies.hpp"
#include "banditlab/rng.hpp"

using namespace banditlab;

static void BM_RankOneUpdate(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  Rng rng(1);
  std::vector<Eigen::VectorXd> xs(512);
  for (auto& x : xs) {
    x.resize(d);
    for (int i = 0; i < d; ++i) x[i] = rng.next_gaussian();
    x.normalize();
  }
  DesignState s(d);
  std::size_t i = 0;
  for (auto _ : state) {
    s.rank_one_update(xs[i++ & 511], 0.5);
    benchmark::DoNotOptimize(s.inv_mat().data());
  }
}
BENCHMARK(BM_RankOneUpdate)->Arg(4)->Arg(16)->Arg(64);

static void BM_VclSelect(benchmark::State& state) {
  const int d = 8, n = static_cast<int>(state.range(0));
  VclPolicy p;
  p.reset(d, n, 100000, 0);
  Rng rng(2);
  ContextSet cs;
  cs.t = 1;
  cs.vectors.resize(n);
  for (auto& x : cs.vectors) {
    x.resize(d);
    for (int i = 0; i < d; ++i) x[i] = rng.next_gaussian();
    x.normalize();
  }
  for (auto _ : state) {
    int arm = p.select(cs);
    p.update(arm, rng.next_gaussian());
  }
}
BENCHMARK(BM_VclSelect)->Arg(4)->Arg(16)->Arg(64);

static void BM_ZtSchedule(benchmark::State& state) {
  const int T = static_cast<int>(state.range(0));
  for (auto _ : state) {
    ZtSchedule s = zt_schedule(T, 2.0);
    benchmark::DoNotOptimize(s.S.back());
  }
}
BENCHMARK(BM_ZtSchedule)->Arg(1000)->Arg(100000);

static void BM_StagePartition(benchmark::State& state) {
  ZtSchedule s = zt_schedule(static_cast<int>(state.range(0)), 2.0);
  for (auto _ : state) {
    StagePartition p = stage_partition(s);
    benchmark::DoNotOptimize(p.k);
  }
}
BENCHMARK(BM_StagePartition)->Arg(1000)->Arg(100000);

BENCHMARK_MAIN();
