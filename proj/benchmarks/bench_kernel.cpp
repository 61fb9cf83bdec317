#include <fstream>
#include <sstream>

#include "benchmark/benchmark.h"

#include "af2m/kernel.hpp"
#include "af2m/parser.hpp"

using namespace af2m;

namespace {

const SourceFile& ex1_source() {
  static SourceFile f = [] {
    std::ifstream in(std::string(AF2M_CORPUS_DIR) + "/ex1_nat_adhoc.af2");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_source(ss.str(), "ex1");
  }();
  return f;
}

}  // namespace

static void BM_ParseEx1(benchmark::State& state) {
  std::ifstream in(std::string(AF2M_CORPUS_DIR) + "/ex1_nat_adhoc.af2");
  std::stringstream ss;
  ss << in.rdbuf();
  std::string text = ss.str();
  for (auto _ : state)
    benchmark::DoNotOptimize(parse_source(text, "ex1").thms.size());
}
BENCHMARK(BM_ParseEx1);

static void BM_CheckSumTotal(benchmark::State& state) {
  const SourceFile& f = ex1_source();
  const ThmDecl* sum = nullptr;
  for (const auto& t : f.thms)
    if (t.name == "sum_total") sum = &t;
  for (auto _ : state)
    benchmark::DoNotOptimize(check_script(sum->script).ok());
}
BENCHMARK(BM_CheckSumTotal);
