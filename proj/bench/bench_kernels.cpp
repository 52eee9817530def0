// Serial reference vs OpenMP kernels. Set OPTIDESIGN_THREADS to cap threads.

#include <benchmark/benchmark.h>

#include <numeric>

#include "optidesign/datagen.hpp"
#include "optidesign/greedy.hpp"
#include "optidesign/oracle.hpp"

using namespace optidesign;

namespace {

Pool bench_pool(int p, int size) {
  SynthSpec spec;
  spec.p = p;
  spec.pool_size = size;
  spec.seed = 1;
  return synth_pool(spec);
}

Execution exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Execution::serial : Execution::parallel;
}

void BM_EvaluateGains(benchmark::State& state) {
  const Criterion c = static_cast<Criterion>(state.range(1));
  const Pool pool = bench_pool(20, 200);
  const DesignState s = DesignState::empty(pool);
  std::vector<std::size_t> idx(pool.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_gains(c, pool, s, idx, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(idx.size()));
}
BENCHMARK(BM_EvaluateGains)->ArgsProduct({{0, 1}, {0, 1, 2}})->ArgNames({"parallel", "criterion"});

void BM_Greedy(benchmark::State& state) {
  const Pool pool = bench_pool(20, 200);
  for (auto _ : state) benchmark::DoNotOptimize(greedy_design(pool, Criterion::A, 40, true, exec_of(state)));
}
BENCHMARK(BM_Greedy)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_BruteForce(benchmark::State& state) {
  const Pool pool = bench_pool(4, 8);
  for (auto _ : state) benchmark::DoNotOptimize(optimal_design_bruteforce(pool, Criterion::E, 4, true, exec_of(state)));
}
BENCHMARK(BM_BruteForce)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_AuditTables(benchmark::State& state) {
  const Pool pool = bench_pool(3, 5);
  AuditOptions opts;
  opts.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(audit_tables(pool, Criterion::A, 3, 3, true, true, opts));
}
BENCHMARK(BM_AuditTables)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const Pool pool = bench_pool(10, 20);
  const Design d = random_design(pool, 10, 3);
  for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_mse(pool, d, 50000, 7, exec_of(state)));
}
BENCHMARK(BM_MonteCarlo)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
