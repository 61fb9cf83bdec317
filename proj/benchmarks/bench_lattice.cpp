#include "benchmark/benchmark.h"

#include "af2m/lattice.hpp"

using namespace af2m::lattice;

static void BM_MendlerPrinciples(benchmark::State& state) {
  FiniteLattice l = random_lattice(static_cast<int>(state.range(0)), 7);
  LatticeOperator op = random_operator(l, 11);
  for (auto _ : state)
    for (int m = 0; m < l.n; ++m)
      benchmark::DoNotOptimize(check_mendler_principles(l, op, m).any_violation());
}
BENCHMARK(BM_MendlerPrinciples)->Arg(8)->Arg(32);

static void BM_Campaign(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(run_campaign(16, 50, 3, false).checks);
}
BENCHMARK(BM_Campaign);
