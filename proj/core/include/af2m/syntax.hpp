#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace af2m {

// ---------------------------------------------------------------------------
// Object terms: t ::= x | f(t1,...,tn). No binders at this layer.
// ---------------------------------------------------------------------------

struct ObjTerm {
  bool is_var = true;
  std::string head;           // variable name, or function symbol
  std::vector<ObjTerm> args;  // empty for variables

  static ObjTerm var(std::string name) { return {true, std::move(name), {}}; }
  static ObjTerm app(std::string fn, std::vector<ObjTerm> as = {}) {
    return {false, std::move(fn), std::move(as)};
  }

  bool operator==(const ObjTerm& o) const {
    return is_var == o.is_var && head == o.head && args == o.args;
  }
  bool operator!=(const ObjTerm& o) const { return !(*this == o); }
  bool operator<(const ObjTerm& o) const;  // total order, for use as map key
};

using ObjSubst = std::map<std::string, ObjTerm>;

/// Replaces every occurrence of variable `x` in `t` by `r`.
ObjTerm subst_obj(const ObjTerm& t, const std::string& x, const ObjTerm& r);
ObjTerm subst_obj_all(const ObjTerm& t, const ObjSubst& sigma);
void obj_vars(const ObjTerm& t, std::set<std::string>& out);
std::set<std::string> obj_vars(const ObjTerm& t);
std::string show_term(const ObjTerm& t);

// ---------------------------------------------------------------------------
// Predicates and formulas.
//
//   P ::= X | P_sym | {x1,..,xn => A} | mu(Phi) | nu(Phi)
//   A ::= P(t1,..,tn) | A -> B | A /\ B | A \/ B | all x.A | ex x.A
//       | all2 X/n.A | A |^ (r = s)
//
// The equation r = s is kept as the recognizable formula all2 X/1. X(r) -> X(s).
// mu/nu predicates carry their constructor/destructor symbol tuples.
// ---------------------------------------------------------------------------

struct Predicate;
struct Formula;
using PredicateRef = std::shared_ptr<const Predicate>;
using FormulaRef = std::shared_ptr<const Formula>;

enum class PredKind { Var2, Symbol, Compr, Mu, Nu };

/// A predicate transformer: a closed expression  X => P  of a fixed arity.
struct Transformer {
  std::string var;  // the bound second-order variable
  int arity = 1;
  PredicateRef body;
};
using TransformerRef = std::shared_ptr<const Transformer>;

struct Predicate {
  PredKind kind;
  std::string name;  // Var2 / Symbol
  int arity = 0;
  std::vector<std::string> binders;  // Compr
  FormulaRef body;                   // Compr
  TransformerRef op;                 // Mu / Nu
  std::vector<std::string> symbols;  // Mu: constructors, Nu: destructors

  static PredicateRef var2(const std::string& n, int arity);
  static PredicateRef symbol(const std::string& n, int arity);
  static PredicateRef compr(std::vector<std::string> binders, FormulaRef body);
  static PredicateRef mu(TransformerRef op, std::vector<std::string> ctors);
  static PredicateRef nu(TransformerRef op, std::vector<std::string> dtors);
};

enum class FormKind { Atom, Implies, And, Or, ForallObj, Exists, ForallPred, Restrict };

struct Formula {
  FormKind kind;
  // Atom
  PredicateRef pred;
  std::vector<ObjTerm> args;
  // Implies / And / Or
  FormulaRef lhs, rhs;
  // ForallObj / Exists / ForallPred
  std::string var;
  int var_arity = 0;  // ForallPred
  FormulaRef body;
  // Restrict: body |^ (eq_lhs = eq_rhs)
  ObjTerm eq_lhs, eq_rhs;

  static FormulaRef atom(PredicateRef p, std::vector<ObjTerm> args);
  static FormulaRef implies(FormulaRef a, FormulaRef b);
  static FormulaRef conj(FormulaRef a, FormulaRef b);
  static FormulaRef disj(FormulaRef a, FormulaRef b);
  static FormulaRef forall_obj(const std::string& x, FormulaRef a);
  static FormulaRef exists_obj(const std::string& x, FormulaRef a);
  static FormulaRef forall_pred(const std::string& x, int arity, FormulaRef a);
  static FormulaRef restrict(FormulaRef a, ObjTerm r, ObjTerm s);
};

/// The Leibniz equation r = s, i.e. all2 X/1. X(r) -> X(s).
FormulaRef mk_equation(const ObjTerm& r, const ObjTerm& s);
/// Recognizes the equation shape up to alpha; returns (r, s) when it matches.
std::optional<std::pair<ObjTerm, ObjTerm>> as_equation(const FormulaRef& f);

// ---------------------------------------------------------------------------
// Signature
// ---------------------------------------------------------------------------

struct Signature {
  std::map<std::string, int> functions;          // name -> arity
  std::map<std::string, int> predicate_symbols;  // name -> arity
  // declared (co)inductive predicates, by surface name; each Mu/Nu node also
  // carries its own constructor/destructor tuple
  std::map<std::string, PredicateRef> inductives;

  bool has_function(const std::string& n, int arity) const {
    auto it = functions.find(n);
    return it != functions.end() && it->second == arity;
  }
};
using SignatureRef = std::shared_ptr<const Signature>;

/// Arity/wellformedness check; returns an error description on failure.
std::optional<std::string> check_term_wf(const Signature& sig, const ObjTerm& t);
std::optional<std::string> check_formula_wf(const Signature& sig, const FormulaRef& f);
std::optional<std::string> check_predicate_wf(const Signature& sig, const PredicateRef& p);
/// A transformer must be closed: no free variables besides its bound X.
std::optional<std::string> check_transformer_closed(const TransformerRef& op);

// ---------------------------------------------------------------------------
// Free variables, substitution, alpha-equivalence, beta-normalization
// ---------------------------------------------------------------------------

struct FreeVars {
  std::set<std::string> obj;
  std::set<std::string> pred;
};
FreeVars free_vars(const FormulaRef& f);
FreeVars free_vars(const PredicateRef& p);

/// Capture-avoiding substitution of an object variable in a formula.
FormulaRef subst_formula_obj(const FormulaRef& a, const std::string& x, const ObjTerm& r);
FormulaRef subst_formula_obj_all(const FormulaRef& a, const ObjSubst& sigma);
/// Capture-avoiding substitution of a second-order variable by a predicate.
/// Comprehension redexes created at the substituted atoms are contracted.
FormulaRef subst_formula_pred(const FormulaRef& a, const std::string& x, const PredicateRef& p);

/// Phi(R): the transformer body with its bound variable replaced by R.
PredicateRef apply_transformer(const TransformerRef& op, const PredicateRef& r);
/// ( {x.. => A} )(t..) = A[x.. := t..], simultaneous and capture-avoiding.
FormulaRef apply_comprehension(const PredicateRef& f, const std::vector<ObjTerm>& ts);

bool alpha_eq(const FormulaRef& a, const FormulaRef& b);
bool alpha_eq(const PredicateRef& a, const PredicateRef& b);

/// Contracts every comprehension-headed atom, everywhere (including inside
/// comprehension and transformer bodies). Kernel comparisons happen on these
/// normal forms.
FormulaRef beta_normalize(const FormulaRef& f);
PredicateRef beta_normalize(const PredicateRef& p);

/// Fresh name based on `base` avoiding everything in `used`.
std::string fresh_name(const std::string& base, const std::set<std::string>& used);

std::string show_formula(const FormulaRef& f, const Signature* sig = nullptr);
std::string show_predicate(const PredicateRef& p, const Signature* sig = nullptr);

}  // namespace af2m
