#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "af2m/equational.hpp"
#include "af2m/proofterm.hpp"
#include "af2m/syntax.hpp"

namespace af2m {

// ---------------------------------------------------------------------------
// Derivation scripts: explicit rule applications carrying all the
// instantiation data the Curry-style rules leave implicit. The kernel
// validates each step; formula comparison is alpha-equivalence on
// comprehension-normal forms. All uses of the equation context go through
// explicit Eq / EqAx / restriction steps.
// ---------------------------------------------------------------------------

enum class Rule {
  Var, ImpI, ImpE, AllI, AllE, All2I, All2E,
  Eq, EqAx, MuI, NuE, MuE, NuI, MuIt, NuCoIt,
  AndI, AndEL, AndER, OrIL, OrIR, OrE, ExI, ExE,
  RestrI, RestrE, Lemma
};
const char* rule_name(Rule r);

/// A unary term context "h => body", the form the recursion rules take their
/// function tuples in; a plain symbol f is (h => f(h)) and the identity is
/// (h => h).
struct TermContext {
  std::string hole;
  ObjTerm body;
  ObjTerm apply(const ObjTerm& t) const { return subst_obj(body, hole, t); }
};

/// An equation made available by a restriction elimination, valid while all
/// the hypotheses it was derived under remain in the context.
struct LicensedEq {
  Equation eq;
  std::set<std::string> support;
};

struct CheckedJudgment {
  std::vector<std::pair<std::string, FormulaRef>> ctx;  // ordered, unique names
  TermRef term;
  FormulaRef formula;  // comprehension-normal
  std::vector<LicensedEq> licensed;
};

struct DerivationStep {
  Rule rule = Rule::Var;
  std::vector<int> premises;  // 1-based indices of earlier steps

  std::string name;   // var / binder / lemma name
  std::string name2;  // second binder (or_e right branch, ex_e variable)
  FormulaRef formula; // var's A, vacuous lam's A, or_i other side, ex_i target,
                      // eq template
  std::string eq_var; // eq template variable
  std::optional<ObjTerm> term1, term2;  // eq r/s, all_e witness, ex_i witness,
                                        // restrict equation
  PredicateRef pred;    // all2_e payload, mu/nu target predicate
  PredicateRef motive;  // recursion motive K
  std::vector<TermContext> funs;
  std::vector<ObjTerm> args;
  std::optional<EqEvidence> evidence;  // explicit; otherwise derive_eq search
  int arity = 0;  // all2_i binder arity
  int line = 0;   // source line for diagnostics
};

struct DerivationScript {
  std::string name;
  SignatureRef sig;
  EquationSet eqs;
  std::vector<std::pair<std::string, FormulaRef>> hyps;  // declared hypotheses
  FormulaRef goal;  // checked against the conclusion when set
  std::vector<DerivationStep> steps;
};

struct CheckError {
  int step = 0;  // 1-based; 0 = script-level
  std::string rule;
  std::string message;
};

/// Closed judgments already established in the same file, importable by
/// Lemma steps whose equation set covers the lemma's.
struct LemmaEnv {
  std::map<std::string, std::pair<CheckedJudgment, EquationSet>> lemmas;
};

struct CheckResult {
  std::optional<CheckedJudgment> judgment;
  std::vector<CheckedJudgment> step_judgments;
  std::vector<CheckError> errors;
  std::map<std::string, long> rule_uses;
  bool ok() const { return errors.empty() && judgment.has_value(); }
};

CheckResult check_script(const DerivationScript& script, const LemmaEnv* lemmas = nullptr);

/// Validates one rule application against already-checked premises.
/// On failure returns the error; premises are indexed by step.premises.
std::optional<CheckError> check_rule(const DerivationScript& script,
                                     const DerivationStep& step, int step_index,
                                     const std::vector<const CheckedJudgment*>& premises,
                                     const LemmaEnv* lemmas, CheckedJudgment& out);

/// The proof term of the conclusion judgment.
TermRef extract(const CheckResult& r);

/// The step-premise formula demanded by the recursion rules for the given
/// instantiation data: extended=true gives the mu_e / nu_i shape, false the
/// iteration shape (mu_it / nu_coit). Returns nullptr and sets *error on bad
/// instantiation data.
FormulaRef recursion_step_formula(const Signature& sig, const PredicateRef& fix,
                                  const PredicateRef& motive,
                                  const std::vector<TermContext>& funs, bool extended,
                                  std::string* error = nullptr);

std::string show_judgment(const CheckedJudgment& j, const Signature* sig = nullptr);

}  // namespace af2m
