#include "doctest.h"

#include <functional>

#include "af2m/syntax.hpp"
#include "test_util.hpp"

using namespace af2m;
using namespace af2m::testutil;

namespace {

ObjTerm v(const std::string& n) { return ObjTerm::var(n); }
ObjTerm ap(const std::string& f, std::vector<ObjTerm> args = {}) {
  return ObjTerm::app(f, std::move(args));
}

}  // namespace

TEST_CASE("object term substitution") {
  CHECK(subst_obj(v("x"), "x", ap("0")) == ap("0"));
  CHECK(subst_obj(ap("suc", {v("x")}), "x", ap("suc", {v("y")})) ==
        ap("suc", {ap("suc", {v("y")})}));
  CHECK(subst_obj(ap("sum", {v("n"), v("x")}), "x", ap("suc", {v("m")})) ==
        ap("sum", {v("n"), ap("suc", {v("m")})}));

  // structural recursion oracle over the term tree
  Gen g(11);
  for (int i = 0; i < 200; ++i) {
    ObjTerm t = g.term(4, {"x", "y"});
    ObjTerm r = g.term(2, {"z"});
    std::function<ObjTerm(const ObjTerm&)> ref = [&](const ObjTerm& u) -> ObjTerm {
      if (u.is_var) return u.head == "x" ? r : u;
      std::vector<ObjTerm> as;
      for (const auto& a : u.args) as.push_back(ref(a));
      return ObjTerm::app(u.head, std::move(as));
    };
    CHECK(subst_obj(t, "x", r) == ref(t));
  }
}

TEST_CASE("formula substitution basics") {
  auto X = Predicate::var2("X", 1);
  auto N = Predicate::symbol("N", 1);

  // bound variable shadows
  auto shadowed = Formula::forall_obj("x", Formula::atom(X, {v("x")}));
  CHECK(alpha_eq(subst_formula_obj(shadowed, "x", ap("0")), shadowed));

  // no binders hit
  auto open_f = Formula::implies(Formula::atom(N, {v("x")}),
                                 Formula::atom(N, {ap("fac", {v("x")})}));
  auto want = Formula::implies(Formula::atom(N, {ap("0")}),
                               Formula::atom(N, {ap("fac", {ap("0")})}));
  CHECK(alpha_eq(subst_formula_obj(open_f, "x", ap("0")), want));

  // capture avoidance: (all y. X(y) -> X(x))[x := y]  =  all y'. X(y') -> X(y)
  auto cap = Formula::forall_obj(
      "y", Formula::implies(Formula::atom(X, {v("y")}), Formula::atom(X, {v("x")})));
  auto got = subst_formula_obj(cap, "x", v("y"));
  auto expected = Formula::forall_obj(
      "q", Formula::implies(Formula::atom(X, {v("q")}), Formula::atom(X, {v("y")})));
  CHECK(alpha_eq(got, expected));
  CHECK(alpha_eq(got, oracle_subst(cap, "x", v("y"))));
}

TEST_CASE("formula substitution agrees with the freshen-then-naive oracle") {
  Gen g(23);
  for (int i = 0; i < 300; ++i) {
    FormulaRef a = g.formula(3, {"x", "y"}, {{"X", 1}});
    ObjTerm r = g.term(2, {"y", "q0", "q1"});
    FormulaRef got = subst_formula_obj(a, "x", r);
    FormulaRef want = oracle_subst(a, "x", r);
    CAPTURE(show_formula(a));
    CAPTURE(show_term(r));
    CHECK(alpha_eq(got, want));
    CHECK(formula_canonical(got) == formula_canonical(want));
  }
}

TEST_CASE("second-order substitution") {
  auto X = Predicate::var2("X", 1);
  auto N = Predicate::symbol("N", 1);
  ObjTerm r = v("r"), s = v("s");

  // Leibniz-equation instantiation
  auto leib = Formula::implies(Formula::atom(X, {r}), Formula::atom(X, {s}));
  auto inst = subst_formula_pred(leib, "X", Predicate::compr({"z"}, Formula::atom(N, {v("z")})));
  CHECK(alpha_eq(inst, Formula::implies(Formula::atom(N, {r}), Formula::atom(N, {s}))));

  // bound occurrence untouched
  auto bound = Formula::forall_pred("X", 1, Formula::atom(X, {r}));
  CHECK(alpha_eq(subst_formula_pred(bound, "X", N), bound));

  // the ad-hoc naturals transformer applied to N
  auto unit = Predicate::compr({"u"}, mk_equation(v("u"), ap("star")));
  auto op = std::make_shared<Transformer>();
  op->var = "X";
  op->arity = 1;
  op->body = Predicate::compr(
      {"x"}, Formula::disj(Formula::atom(unit, {v("x")}), Formula::atom(X, {v("x")})));
  auto applied = apply_transformer(op, N);
  auto want = Predicate::compr(
      {"x"}, Formula::disj(Formula::atom(unit, {v("x")}), Formula::atom(N, {v("x")})));
  CHECK(alpha_eq(beta_normalize(applied), beta_normalize(want)));
}

TEST_CASE("apply_transformer") {
  auto P = Predicate::symbol("N", 1);

  // identity transformer
  auto idop = std::make_shared<Transformer>();
  idop->var = "X";
  idop->arity = 1;
  idop->body = Predicate::var2("X", 1);
  CHECK(alpha_eq(apply_transformer(idop, P), P));

  // binary transformer from the observational-equality example
  auto eqop = std::make_shared<Transformer>();
  eqop->var = "X";
  eqop->arity = 2;
  eqop->body = Predicate::compr(
      {"x", "y"},
      Formula::conj(mk_equation(ap("head", {v("x")}), ap("head", {v("y")})),
                    Formula::atom(Predicate::var2("X", 2),
                                  {ap("tail", {v("x")}), ap("tail", {v("y")})})));
  auto E = Predicate::symbol("L", 2);
  auto applied = apply_transformer(eqop, E);
  auto want = Predicate::compr(
      {"x", "y"},
      Formula::conj(mk_equation(ap("head", {v("x")}), ap("head", {v("y")})),
                    Formula::atom(E, {ap("tail", {v("x")}), ap("tail", {v("y")})})));
  CHECK(alpha_eq(applied, want));

  CHECK_THROWS_AS(apply_transformer(idop, Predicate::symbol("L", 2)),
                  std::invalid_argument);

  // agreement with subst_formula_pred on the body, randomized
  Gen g(37);
  for (int i = 0; i < 200; ++i) {
    TransformerRef op = g.transformer(2);
    PredicateRef rep =
        g.coin() ? PredicateRef(Predicate::symbol("N", 1))
                 : PredicateRef(Predicate::compr({"m"}, g.formula(2, {"m"}, {})));
    PredicateRef applied2 = apply_transformer(op, rep);
    // reference route: substitute inside the comprehension body
    const auto& body = op->body;
    REQUIRE(body->kind == PredKind::Compr);
    FormulaRef ref = subst_formula_pred(body->body, op->var, rep);
    REQUIRE(applied2->kind == PredKind::Compr);
    CHECK(alpha_eq(beta_normalize(apply_comprehension(applied2, {v(body->binders[0])})),
                   beta_normalize(ref)));
  }
}

TEST_CASE("apply_comprehension") {
  auto unit = Predicate::compr({"x"}, mk_equation(v("x"), ap("star")));
  CHECK(alpha_eq(apply_comprehension(unit, {ap("0")}), mk_equation(ap("0"), ap("star"))));

  // vacuous
  auto N = Predicate::symbol("N", 1);
  auto konst = Predicate::compr({"x"}, Formula::atom(N, {v("y")}));
  CHECK(alpha_eq(apply_comprehension(konst, {ap("0")}), Formula::atom(N, {v("y")})));

  // simultaneous substitution: {x,y => L(x,y)}(suc n, suc m)
  auto L = Predicate::symbol("L", 2);
  auto two = Predicate::compr({"x", "y"}, Formula::atom(L, {v("x"), v("y")}));
  auto got = apply_comprehension(two, {ap("suc", {v("n")}), ap("suc", {v("m")})});
  CHECK(alpha_eq(got, Formula::atom(L, {ap("suc", {v("n")}), ap("suc", {v("m")})})));

  // the swap case needs simultaneity: {x,y => L(x,y)}(y, x)
  auto swapped = apply_comprehension(two, {v("y"), v("x")});
  CHECK(alpha_eq(swapped, Formula::atom(L, {v("y"), v("x")})));

  CHECK_THROWS_AS(apply_comprehension(two, {v("x")}), std::invalid_argument);
}

TEST_CASE("alpha equivalence") {
  auto N = Predicate::symbol("N", 1);
  auto all_x = Formula::forall_obj("x", Formula::atom(N, {v("x")}));
  auto all_y = Formula::forall_obj("y", Formula::atom(N, {v("y")}));
  CHECK(alpha_eq(all_x, all_y));

  CHECK(alpha_eq(mk_equation(v("r"), v("s")),
                 Formula::forall_pred("Y", 1,
                                      Formula::implies(Formula::atom(Predicate::var2("Y", 1), {v("r")}),
                                                       Formula::atom(Predicate::var2("Y", 1), {v("s")})))));

  auto all_suc = Formula::forall_obj("x", Formula::atom(N, {ap("suc", {v("x")})}));
  CHECK_FALSE(alpha_eq(all_x, all_suc));

  // de-Bruijn canonical strings characterize the same relation
  Gen g(41);
  for (int i = 0; i < 300; ++i) {
    FormulaRef a = g.formula(3, {"x"}, {{"X", 1}});
    FormulaRef b = g.formula(3, {"x"}, {{"X", 1}});
    CHECK(alpha_eq(a, b) == (formula_canonical(a) == formula_canonical(b)));
    CHECK(alpha_eq(a, a));
    // a freshened variant stays alpha-equivalent
    Freshener fr;
    FormulaRef a2 = fr.formula(a, {}, {});
    CHECK(alpha_eq(a, a2));
  }
}

TEST_CASE("free variables") {
  auto N = Predicate::symbol("N", 1);
  auto X = Predicate::var2("X", 1);

  auto f1 = Formula::implies(Formula::atom(N, {v("x")}),
                             Formula::atom(N, {ap("fac", {v("x")})}));
  FreeVars fv1 = free_vars(f1);
  CHECK(fv1.obj == std::set<std::string>{"x"});
  CHECK(fv1.pred.empty());

  auto f2 = Formula::forall_obj("x", Formula::atom(X, {v("x")}));
  FreeVars fv2 = free_vars(f2);
  CHECK(fv2.obj.empty());
  CHECK(fv2.pred == std::set<std::string>{"X"});

  auto f3 = Formula::implies(Formula::atom(X, {ap("0")}), Formula::atom(X, {ap("star")}));
  FreeVars fv3 = free_vars(f3);
  CHECK(fv3.obj.empty());
  CHECK(fv3.pred == std::set<std::string>{"X"});
}

TEST_CASE("substitution lemma") {
  // A[x:=r][y:=s] = A[y:=s][x := r[y:=s]]  when x != y and x not free in s
  Gen g(53);
  int done = 0;
  while (done < 200) {
    FormulaRef a = g.formula(3, {"x", "y"}, {{"X", 1}});
    ObjTerm r = g.term(2, {"x", "y"});
    ObjTerm s = g.term(2, {"y"});
    if (obj_vars(s).count("x")) continue;
    ++done;
    FormulaRef lhs = subst_formula_obj(subst_formula_obj(a, "x", r), "y", s);
    FormulaRef rhs =
        subst_formula_obj(subst_formula_obj(a, "y", s), "x", subst_obj(r, "y", s));
    CAPTURE(show_formula(a));
    CHECK(alpha_eq(lhs, rhs));
  }
}

TEST_CASE("alpha_eq is a congruence for substitution") {
  Gen g(67);
  for (int i = 0; i < 200; ++i) {
    FormulaRef a = g.formula(3, {"x"}, {{"X", 1}});
    Freshener fr;
    FormulaRef b = fr.formula(a, {}, {});
    REQUIRE(alpha_eq(a, b));
    ObjTerm r = g.term(2, {"x"});
    CHECK(alpha_eq(subst_formula_obj(a, "x", r), subst_formula_obj(b, "x", r)));
    auto P = Predicate::compr({"m"}, g.formula(1, {"m", "x"}, {}));
    CHECK(alpha_eq(subst_formula_pred(a, "X", P), subst_formula_pred(b, "X", P)));
  }
}

TEST_CASE("equation sugar round-trips") {
  Gen g(71);
  for (int i = 0; i < 200; ++i) {
    ObjTerm r = g.term(3, {"x", "y"});
    ObjTerm s = g.term(3, {"x", "y"});
    auto eq = mk_equation(r, s);
    auto back = as_equation(eq);
    REQUIRE(back.has_value());
    CHECK(back->first == r);
    CHECK(back->second == s);
  }
  // non-equations are not recognized
  auto N = Predicate::symbol("N", 1);
  CHECK_FALSE(as_equation(Formula::atom(N, {v("x")})).has_value());
  CHECK_FALSE(as_equation(Formula::forall_pred(
                              "X", 1, Formula::implies(Formula::atom(Predicate::var2("X", 1), {v("r")}),
                                                       Formula::atom(Predicate::var2("Y", 1), {v("s")})))
                              )
                  .has_value());
}

TEST_CASE("beta normalization terminates and is idempotent") {
  Gen g(79);
  for (int i = 0; i < 200; ++i) {
    FormulaRef a = g.formula(4, {"x"}, {{"X", 1}});
    FormulaRef n1 = beta_normalize(a);
    FormulaRef n2 = beta_normalize(n1);
    CHECK(alpha_eq(n1, n2));
  }
}

TEST_CASE("transformer closedness validation") {
  auto op = std::make_shared<Transformer>();
  op->var = "X";
  op->arity = 1;
  op->body = Predicate::compr({"x"}, Formula::atom(Predicate::var2("X", 1), {v("x")}));
  CHECK(!check_transformer_closed(op).has_value());

  auto bad = std::make_shared<Transformer>();
  bad->var = "X";
  bad->arity = 1;
  bad->body = Predicate::compr({"x"}, Formula::atom(Predicate::var2("Y", 1), {v("x")}));
  CHECK(check_transformer_closed(bad).has_value());

  auto bad2 = std::make_shared<Transformer>();
  bad2->var = "X";
  bad2->arity = 1;
  bad2->body =
      Predicate::compr({"x"}, Formula::atom(Predicate::var2("X", 1), {v("freevar")}));
  CHECK(check_transformer_closed(bad2).has_value());
}
