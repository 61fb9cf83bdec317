#include "benchmark/benchmark.h"

#include "af2m/syntax.hpp"

using namespace af2m;

namespace {

FormulaRef deep_formula(int depth) {
  auto N = Predicate::symbol("N", 1);
  FormulaRef f = Formula::atom(N, {ObjTerm::var("x")});
  for (int i = 0; i < depth; ++i) {
    f = Formula::forall_obj("x" + std::to_string(i),
                            Formula::implies(Formula::atom(N, {ObjTerm::var("x")}), f));
  }
  return f;
}

}  // namespace

static void BM_SubstFormula(benchmark::State& state) {
  FormulaRef f = deep_formula(static_cast<int>(state.range(0)));
  ObjTerm r = ObjTerm::app("suc", {ObjTerm::var("y")});
  for (auto _ : state)
    benchmark::DoNotOptimize(subst_formula_obj(f, "x", r));
}
BENCHMARK(BM_SubstFormula)->Arg(8)->Arg(32);

static void BM_AlphaEq(benchmark::State& state) {
  FormulaRef a = deep_formula(static_cast<int>(state.range(0)));
  FormulaRef b = deep_formula(static_cast<int>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(alpha_eq(a, b));
}
BENCHMARK(BM_AlphaEq)->Arg(8)->Arg(32);
