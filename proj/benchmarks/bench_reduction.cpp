#include "benchmark/benchmark.h"

#include "af2m/driver.hpp"
#include "af2m/reduction.hpp"

using namespace af2m;

namespace {

const CheckedFile& ex1() {
  static CheckedFile cf = check_file(std::string(AF2M_CORPUS_DIR) + "/ex1_nat_adhoc.af2",
                                     DriverOptions{});
  return cf;
}

}  // namespace

static void BM_NormalizeFacTwo(benchmark::State& state) {
  TermRef t = ProofTerm::app(resolve_term(ex1(), "fac_total"), resolve_term(ex1(), "two"));
  for (auto _ : state)
    benchmark::DoNotOptimize(normalize(t, 100000).trace.size());
}
BENCHMARK(BM_NormalizeFacTwo);

static void BM_SnOracleSum(benchmark::State& state) {
  TermRef t = ProofTerm::app(
      ProofTerm::app(resolve_term(ex1(), "sum_total"), resolve_term(ex1(), "two")),
      resolve_term(ex1(), "two"));
  for (auto _ : state)
    benchmark::DoNotOptimize(sn_oracle(t, 200000).graph_size);
}
BENCHMARK(BM_SnOracleSum);

static void BM_SnCertifySumExtract(benchmark::State& state) {
  TermRef t = resolve_term(ex1(), "sum_total");
  for (auto _ : state)
    benchmark::DoNotOptimize(sn_certify(t, 100000).nodes_used);
}
BENCHMARK(BM_SnCertifySumExtract);
