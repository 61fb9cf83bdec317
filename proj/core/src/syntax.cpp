#include "af2m/syntax.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

namespace af2m {

// ---------------------------------------------------------------------------
// Object terms
// ---------------------------------------------------------------------------

bool ObjTerm::operator<(const ObjTerm& o) const {
  if (is_var != o.is_var) return is_var && !o.is_var;
  if (head != o.head) return head < o.head;
  return args < o.args;
}

ObjTerm subst_obj(const ObjTerm& t, const std::string& x, const ObjTerm& r) {
  if (t.is_var) return t.head == x ? r : t;
  std::vector<ObjTerm> as;
  as.reserve(t.args.size());
  for (const auto& a : t.args) as.push_back(subst_obj(a, x, r));
  return ObjTerm::app(t.head, std::move(as));
}

ObjTerm subst_obj_all(const ObjTerm& t, const ObjSubst& sigma) {
  if (t.is_var) {
    auto it = sigma.find(t.head);
    return it == sigma.end() ? t : it->second;
  }
  std::vector<ObjTerm> as;
  as.reserve(t.args.size());
  for (const auto& a : t.args) as.push_back(subst_obj_all(a, sigma));
  return ObjTerm::app(t.head, std::move(as));
}

void obj_vars(const ObjTerm& t, std::set<std::string>& out) {
  if (t.is_var) {
    out.insert(t.head);
    return;
  }
  for (const auto& a : t.args) obj_vars(a, out);
}

std::set<std::string> obj_vars(const ObjTerm& t) {
  std::set<std::string> out;
  obj_vars(t, out);
  return out;
}

std::string show_term(const ObjTerm& t) {
  if (t.is_var) return t.head;
  if (t.args.empty()) return t.head;
  std::string s = t.head + "(";
  for (size_t i = 0; i < t.args.size(); ++i) {
    if (i) s += ", ";
    s += show_term(t.args[i]);
  }
  return s + ")";
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

PredicateRef Predicate::var2(const std::string& n, int arity) {
  auto p = std::make_shared<Predicate>();
  p->kind = PredKind::Var2;
  p->name = n;
  p->arity = arity;
  return p;
}

PredicateRef Predicate::symbol(const std::string& n, int arity) {
  auto p = std::make_shared<Predicate>();
  p->kind = PredKind::Symbol;
  p->name = n;
  p->arity = arity;
  return p;
}

PredicateRef Predicate::compr(std::vector<std::string> binders, FormulaRef body) {
  auto p = std::make_shared<Predicate>();
  p->kind = PredKind::Compr;
  p->arity = static_cast<int>(binders.size());
  p->binders = std::move(binders);
  p->body = std::move(body);
  return p;
}

PredicateRef Predicate::mu(TransformerRef op, std::vector<std::string> ctors) {
  auto p = std::make_shared<Predicate>();
  p->kind = PredKind::Mu;
  p->arity = op->arity;
  p->op = std::move(op);
  p->symbols = std::move(ctors);
  return p;
}

PredicateRef Predicate::nu(TransformerRef op, std::vector<std::string> dtors) {
  auto p = std::make_shared<Predicate>();
  p->kind = PredKind::Nu;
  p->arity = op->arity;
  p->op = std::move(op);
  p->symbols = std::move(dtors);
  return p;
}

FormulaRef Formula::atom(PredicateRef p, std::vector<ObjTerm> args) {
  auto f = std::make_shared<Formula>();
  f->kind = FormKind::Atom;
  f->pred = std::move(p);
  f->args = std::move(args);
  return f;
}

static FormulaRef mk_binary(FormKind k, FormulaRef a, FormulaRef b) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

FormulaRef Formula::implies(FormulaRef a, FormulaRef b) { return mk_binary(FormKind::Implies, std::move(a), std::move(b)); }
FormulaRef Formula::conj(FormulaRef a, FormulaRef b) { return mk_binary(FormKind::And, std::move(a), std::move(b)); }
FormulaRef Formula::disj(FormulaRef a, FormulaRef b) { return mk_binary(FormKind::Or, std::move(a), std::move(b)); }

static FormulaRef mk_quant(FormKind k, const std::string& x, int arity, FormulaRef a) {
  auto f = std::make_shared<Formula>();
  f->kind = k;
  f->var = x;
  f->var_arity = arity;
  f->body = std::move(a);
  return f;
}

FormulaRef Formula::forall_obj(const std::string& x, FormulaRef a) { return mk_quant(FormKind::ForallObj, x, 0, std::move(a)); }
FormulaRef Formula::exists_obj(const std::string& x, FormulaRef a) { return mk_quant(FormKind::Exists, x, 0, std::move(a)); }
FormulaRef Formula::forall_pred(const std::string& x, int arity, FormulaRef a) { return mk_quant(FormKind::ForallPred, x, arity, std::move(a)); }

FormulaRef Formula::restrict(FormulaRef a, ObjTerm r, ObjTerm s) {
  auto f = std::make_shared<Formula>();
  f->kind = FormKind::Restrict;
  f->body = std::move(a);
  f->eq_lhs = std::move(r);
  f->eq_rhs = std::move(s);
  return f;
}

FormulaRef mk_equation(const ObjTerm& r, const ObjTerm& s) {
  auto X = Predicate::var2("X", 1);
  return Formula::forall_pred(
      "X", 1,
      Formula::implies(Formula::atom(X, {r}), Formula::atom(X, {s})));
}

std::optional<std::pair<ObjTerm, ObjTerm>> as_equation(const FormulaRef& f) {
  if (!f || f->kind != FormKind::ForallPred || f->var_arity != 1) return std::nullopt;
  const auto& imp = f->body;
  if (!imp || imp->kind != FormKind::Implies) return std::nullopt;
  const auto& l = imp->lhs;
  const auto& r = imp->rhs;
  if (l->kind != FormKind::Atom || r->kind != FormKind::Atom) return std::nullopt;
  if (l->pred->kind != PredKind::Var2 || r->pred->kind != PredKind::Var2) return std::nullopt;
  if (l->pred->name != f->var || r->pred->name != f->var) return std::nullopt;
  if (l->args.size() != 1 || r->args.size() != 1) return std::nullopt;
  // object terms cannot mention the bound predicate variable, so shape suffices
  return std::make_pair(l->args[0], r->args[0]);
}

// ---------------------------------------------------------------------------
// Free variables
// ---------------------------------------------------------------------------

namespace {

void fv_pred(const PredicateRef& p, std::set<std::string>& bound_obj,
             std::set<std::string>& bound_pred, FreeVars& out);

void fv_formula(const FormulaRef& f, std::set<std::string>& bound_obj,
                std::set<std::string>& bound_pred, FreeVars& out) {
  switch (f->kind) {
    case FormKind::Atom: {
      fv_pred(f->pred, bound_obj, bound_pred, out);
      for (const auto& t : f->args)
        for (const auto& v : obj_vars(t))
          if (!bound_obj.count(v)) out.obj.insert(v);
      break;
    }
    case FormKind::Implies:
    case FormKind::And:
    case FormKind::Or:
      fv_formula(f->lhs, bound_obj, bound_pred, out);
      fv_formula(f->rhs, bound_obj, bound_pred, out);
      break;
    case FormKind::ForallObj:
    case FormKind::Exists: {
      bool fresh = bound_obj.insert(f->var).second;
      fv_formula(f->body, bound_obj, bound_pred, out);
      if (fresh) bound_obj.erase(f->var);
      break;
    }
    case FormKind::ForallPred: {
      bool fresh = bound_pred.insert(f->var).second;
      fv_formula(f->body, bound_obj, bound_pred, out);
      if (fresh) bound_pred.erase(f->var);
      break;
    }
    case FormKind::Restrict: {
      fv_formula(f->body, bound_obj, bound_pred, out);
      for (const auto* t : {&f->eq_lhs, &f->eq_rhs})
        for (const auto& v : obj_vars(*t))
          if (!bound_obj.count(v)) out.obj.insert(v);
      break;
    }
  }
}

void fv_pred(const PredicateRef& p, std::set<std::string>& bound_obj,
             std::set<std::string>& bound_pred, FreeVars& out) {
  switch (p->kind) {
    case PredKind::Var2:
      if (!bound_pred.count(p->name)) out.pred.insert(p->name);
      break;
    case PredKind::Symbol:
      break;
    case PredKind::Compr: {
      std::vector<std::string> added;
      for (const auto& b : p->binders)
        if (bound_obj.insert(b).second) added.push_back(b);
      fv_formula(p->body, bound_obj, bound_pred, out);
      for (const auto& b : added) bound_obj.erase(b);
      break;
    }
    case PredKind::Mu:
    case PredKind::Nu:
      // transformers are closed by construction
      break;
  }
}

}  // namespace

FreeVars free_vars(const FormulaRef& f) {
  FreeVars out;
  std::set<std::string> bo, bp;
  fv_formula(f, bo, bp, out);
  return out;
}

FreeVars free_vars(const PredicateRef& p) {
  FreeVars out;
  std::set<std::string> bo, bp;
  fv_pred(p, bo, bp, out);
  return out;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& used) {
  if (!used.count(base)) return base;
  std::string cand = base + "'";
  int n = 1;
  while (used.count(cand)) {
    ++n;
    if (n <= 3) {
      cand += "'";
    } else {
      cand = base + "_" + std::to_string(n);
    }
  }
  return cand;
}

// ---------------------------------------------------------------------------
// Substitution (capture-avoiding)
// ---------------------------------------------------------------------------

namespace {

// Active object substitution together with the variables occurring free in
// its images; binders clashing with those get renamed.
struct ObjSubstEnv {
  ObjSubst sigma;
  std::set<std::string> image_vars;

  static ObjSubstEnv make(const ObjSubst& s) {
    ObjSubstEnv e;
    e.sigma = s;
    for (const auto& [k, v] : s) obj_vars(v, e.image_vars);
    return e;
  }
  bool empty() const { return sigma.empty(); }
};

PredicateRef subst_pred_obj(const PredicateRef& p, const ObjSubstEnv& env);

FormulaRef subst_form_obj(const FormulaRef& f, const ObjSubstEnv& env) {
  if (env.empty()) return f;
  switch (f->kind) {
    case FormKind::Atom: {
      std::vector<ObjTerm> as;
      as.reserve(f->args.size());
      for (const auto& t : f->args) as.push_back(subst_obj_all(t, env.sigma));
      return Formula::atom(subst_pred_obj(f->pred, env), std::move(as));
    }
    case FormKind::Implies:
      return Formula::implies(subst_form_obj(f->lhs, env), subst_form_obj(f->rhs, env));
    case FormKind::And:
      return Formula::conj(subst_form_obj(f->lhs, env), subst_form_obj(f->rhs, env));
    case FormKind::Or:
      return Formula::disj(subst_form_obj(f->lhs, env), subst_form_obj(f->rhs, env));
    case FormKind::ForallObj:
    case FormKind::Exists: {
      ObjSubstEnv inner = env;
      inner.sigma.erase(f->var);
      std::string v = f->var;
      FormulaRef body = f->body;
      if (inner.sigma.empty()) return f;
      if (inner.image_vars.count(v)) {
        std::set<std::string> avoid = inner.image_vars;
        for (const auto& [k, _] : inner.sigma) avoid.insert(k);
        for (const auto& w : free_vars(body).obj) avoid.insert(w);
        std::string v2 = fresh_name(v, avoid);
        ObjSubstEnv ren;
        ren.sigma[v] = ObjTerm::var(v2);
        ren.image_vars.insert(v2);
        body = subst_form_obj(body, ren);
        v = v2;
      }
      return mk_quant(f->kind, v, 0, subst_form_obj(body, inner));
    }
    case FormKind::ForallPred:
      return Formula::forall_pred(f->var, f->var_arity, subst_form_obj(f->body, env));
    case FormKind::Restrict:
      return Formula::restrict(subst_form_obj(f->body, env),
                               subst_obj_all(f->eq_lhs, env.sigma),
                               subst_obj_all(f->eq_rhs, env.sigma));
  }
  return f;
}

PredicateRef subst_pred_obj(const PredicateRef& p, const ObjSubstEnv& env) {
  switch (p->kind) {
    case PredKind::Var2:
    case PredKind::Symbol:
    case PredKind::Mu:
    case PredKind::Nu:
      return p;  // transformers are closed
    case PredKind::Compr: {
      ObjSubstEnv inner = env;
      for (const auto& b : p->binders) inner.sigma.erase(b);
      if (inner.sigma.empty()) return p;
      std::vector<std::string> binders = p->binders;
      FormulaRef body = p->body;
      // rename binders that would capture image variables
      ObjSubstEnv ren;
      std::set<std::string> avoid = inner.image_vars;
      for (const auto& [k, _] : inner.sigma) avoid.insert(k);
      for (const auto& w : free_vars(body).obj) avoid.insert(w);
      for (auto& b : binders) avoid.insert(b);
      bool renamed = false;
      for (auto& b : binders) {
        if (inner.image_vars.count(b)) {
          std::string b2 = fresh_name(b, avoid);
          avoid.insert(b2);
          ren.sigma[b] = ObjTerm::var(b2);
          ren.image_vars.insert(b2);
          b = b2;
          renamed = true;
        }
      }
      if (renamed) body = subst_form_obj(body, ren);
      return Predicate::compr(std::move(binders), subst_form_obj(body, inner));
    }
  }
  return p;
}

}  // namespace

FormulaRef subst_formula_obj_all(const FormulaRef& a, const ObjSubst& sigma) {
  if (sigma.empty()) return a;
  return subst_form_obj(a, ObjSubstEnv::make(sigma));
}

FormulaRef subst_formula_obj(const FormulaRef& a, const std::string& x, const ObjTerm& r) {
  ObjSubst s;
  s[x] = r;
  return subst_formula_obj_all(a, s);
}

namespace {

PredicateRef subst_pred_pred(const PredicateRef& p, const std::string& x,
                             const PredicateRef& repl, const FreeVars& repl_fv);

FormulaRef subst_form_pred(const FormulaRef& f, const std::string& x,
                           const PredicateRef& repl, const FreeVars& repl_fv) {
  switch (f->kind) {
    case FormKind::Atom: {
      PredicateRef h = subst_pred_pred(f->pred, x, repl, repl_fv);
      if (h->kind == PredKind::Compr)
        return apply_comprehension(h, f->args);
      return Formula::atom(h, f->args);
    }
    case FormKind::Implies:
      return Formula::implies(subst_form_pred(f->lhs, x, repl, repl_fv),
                              subst_form_pred(f->rhs, x, repl, repl_fv));
    case FormKind::And:
      return Formula::conj(subst_form_pred(f->lhs, x, repl, repl_fv),
                           subst_form_pred(f->rhs, x, repl, repl_fv));
    case FormKind::Or:
      return Formula::disj(subst_form_pred(f->lhs, x, repl, repl_fv),
                           subst_form_pred(f->rhs, x, repl, repl_fv));
    case FormKind::ForallObj:
    case FormKind::Exists: {
      std::string v = f->var;
      FormulaRef body = f->body;
      if (repl_fv.obj.count(v)) {
        std::set<std::string> avoid = repl_fv.obj;
        for (const auto& w : free_vars(body).obj) avoid.insert(w);
        std::string v2 = fresh_name(v, avoid);
        body = subst_formula_obj(body, v, ObjTerm::var(v2));
        v = v2;
      }
      return mk_quant(f->kind, v, 0, subst_form_pred(body, x, repl, repl_fv));
    }
    case FormKind::ForallPred: {
      if (f->var == x) return f;  // shadowed
      std::string v = f->var;
      FormulaRef body = f->body;
      if (repl_fv.pred.count(v)) {
        std::set<std::string> avoid = repl_fv.pred;
        avoid.insert(x);
        for (const auto& w : free_vars(body).pred) avoid.insert(w);
        std::string v2 = fresh_name(v, avoid);
        body = subst_form_pred(body, v, Predicate::var2(v2, f->var_arity), FreeVars{});
        v = v2;
      }
      return Formula::forall_pred(v, f->var_arity, subst_form_pred(body, x, repl, repl_fv));
    }
    case FormKind::Restrict:
      return Formula::restrict(subst_form_pred(f->body, x, repl, repl_fv),
                               f->eq_lhs, f->eq_rhs);
  }
  return f;
}

PredicateRef subst_pred_pred(const PredicateRef& p, const std::string& x,
                             const PredicateRef& repl, const FreeVars& repl_fv) {
  switch (p->kind) {
    case PredKind::Var2:
      return p->name == x ? repl : p;
    case PredKind::Symbol:
    case PredKind::Mu:
    case PredKind::Nu:
      return p;  // closed
    case PredKind::Compr: {
      std::vector<std::string> binders = p->binders;
      FormulaRef body = p->body;
      std::set<std::string> avoid = repl_fv.obj;
      for (const auto& w : free_vars(body).obj) avoid.insert(w);
      for (const auto& b : binders) avoid.insert(b);
      for (auto& b : binders) {
        if (repl_fv.obj.count(b)) {
          std::string b2 = fresh_name(b, avoid);
          avoid.insert(b2);
          body = subst_formula_obj(body, b, ObjTerm::var(b2));
          b = b2;
        }
      }
      return Predicate::compr(std::move(binders), subst_form_pred(body, x, repl, repl_fv));
    }
  }
  return p;
}

}  // namespace

FormulaRef subst_formula_pred(const FormulaRef& a, const std::string& x, const PredicateRef& p) {
  return subst_form_pred(a, x, p, free_vars(p));
}

PredicateRef apply_transformer(const TransformerRef& op, const PredicateRef& r) {
  if (op->arity != r->arity)
    throw std::invalid_argument("apply_transformer: arity mismatch");
  return subst_pred_pred(op->body, op->var, r, free_vars(r));
}

FormulaRef apply_comprehension(const PredicateRef& f, const std::vector<ObjTerm>& ts) {
  if (f->kind != PredKind::Compr)
    throw std::invalid_argument("apply_comprehension: not a comprehension");
  if (static_cast<size_t>(f->arity) != ts.size())
    throw std::invalid_argument("apply_comprehension: arity mismatch");
  ObjSubst sigma;
  for (size_t i = 0; i < ts.size(); ++i) sigma[f->binders[i]] = ts[i];
  return subst_formula_obj_all(f->body, sigma);
}

// ---------------------------------------------------------------------------
// Alpha-equivalence
// ---------------------------------------------------------------------------

namespace {

struct AlphaCtx {
  std::vector<std::pair<std::string, std::string>> obj;
  std::vector<std::pair<std::string, std::string>> pred;

  bool obj_var_eq(const std::string& a, const std::string& b) const {
    for (auto it = obj.rbegin(); it != obj.rend(); ++it) {
      bool la = it->first == a, lb = it->second == b;
      if (la || lb) return la && lb;
    }
    return a == b;
  }
  bool pred_var_eq(const std::string& a, const std::string& b) const {
    for (auto it = pred.rbegin(); it != pred.rend(); ++it) {
      bool la = it->first == a, lb = it->second == b;
      if (la || lb) return la && lb;
    }
    return a == b;
  }
};

bool aeq_term(const ObjTerm& a, const ObjTerm& b, const AlphaCtx& ctx) {
  if (a.is_var != b.is_var) return false;
  if (a.is_var) return ctx.obj_var_eq(a.head, b.head);
  if (a.head != b.head || a.args.size() != b.args.size()) return false;
  for (size_t i = 0; i < a.args.size(); ++i)
    if (!aeq_term(a.args[i], b.args[i], ctx)) return false;
  return true;
}

bool aeq_pred(const PredicateRef& a, const PredicateRef& b, AlphaCtx& ctx);

bool aeq_form(const FormulaRef& a, const FormulaRef& b, AlphaCtx& ctx) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FormKind::Atom: {
      if (a->args.size() != b->args.size()) return false;
      if (!aeq_pred(a->pred, b->pred, ctx)) return false;
      for (size_t i = 0; i < a->args.size(); ++i)
        if (!aeq_term(a->args[i], b->args[i], ctx)) return false;
      return true;
    }
    case FormKind::Implies:
    case FormKind::And:
    case FormKind::Or:
      return aeq_form(a->lhs, b->lhs, ctx) && aeq_form(a->rhs, b->rhs, ctx);
    case FormKind::ForallObj:
    case FormKind::Exists: {
      ctx.obj.emplace_back(a->var, b->var);
      bool ok = aeq_form(a->body, b->body, ctx);
      ctx.obj.pop_back();
      return ok;
    }
    case FormKind::ForallPred: {
      if (a->var_arity != b->var_arity) return false;
      ctx.pred.emplace_back(a->var, b->var);
      bool ok = aeq_form(a->body, b->body, ctx);
      ctx.pred.pop_back();
      return ok;
    }
    case FormKind::Restrict:
      return aeq_form(a->body, b->body, ctx) &&
             aeq_term(a->eq_lhs, b->eq_lhs, ctx) &&
             aeq_term(a->eq_rhs, b->eq_rhs, ctx);
  }
  return false;
}

bool aeq_pred(const PredicateRef& a, const PredicateRef& b, AlphaCtx& ctx) {
  if (a->kind != b->kind || a->arity != b->arity) return false;
  switch (a->kind) {
    case PredKind::Var2:
      return ctx.pred_var_eq(a->name, b->name);
    case PredKind::Symbol:
      return a->name == b->name;
    case PredKind::Compr: {
      if (a->binders.size() != b->binders.size()) return false;
      for (size_t i = 0; i < a->binders.size(); ++i)
        ctx.obj.emplace_back(a->binders[i], b->binders[i]);
      bool ok = aeq_form(a->body, b->body, ctx);
      for (size_t i = 0; i < a->binders.size(); ++i) ctx.obj.pop_back();
      return ok;
    }
    case PredKind::Mu:
    case PredKind::Nu: {
      if (a->symbols != b->symbols) return false;  // constructor identity matters
      ctx.pred.emplace_back(a->op->var, b->op->var);
      bool ok = aeq_pred(a->op->body, b->op->body, ctx);
      ctx.pred.pop_back();
      return ok;
    }
  }
  return false;
}

}  // namespace

bool alpha_eq(const FormulaRef& a, const FormulaRef& b) {
  if (!a || !b) return a == b;
  AlphaCtx ctx;
  return aeq_form(a, b, ctx);
}

bool alpha_eq(const PredicateRef& a, const PredicateRef& b) {
  if (!a || !b) return a == b;
  AlphaCtx ctx;
  return aeq_pred(a, b, ctx);
}

// ---------------------------------------------------------------------------
// Beta-normalization of comprehension redexes
// ---------------------------------------------------------------------------

FormulaRef beta_normalize(const FormulaRef& f) {
  switch (f->kind) {
    case FormKind::Atom: {
      PredicateRef h = beta_normalize(f->pred);
      if (h->kind == PredKind::Compr)
        return apply_comprehension(h, f->args);
      if (h == f->pred) return f;
      return Formula::atom(h, f->args);
    }
    case FormKind::Implies:
      return Formula::implies(beta_normalize(f->lhs), beta_normalize(f->rhs));
    case FormKind::And:
      return Formula::conj(beta_normalize(f->lhs), beta_normalize(f->rhs));
    case FormKind::Or:
      return Formula::disj(beta_normalize(f->lhs), beta_normalize(f->rhs));
    case FormKind::ForallObj:
    case FormKind::Exists:
      return mk_quant(f->kind, f->var, 0, beta_normalize(f->body));
    case FormKind::ForallPred:
      return Formula::forall_pred(f->var, f->var_arity, beta_normalize(f->body));
    case FormKind::Restrict:
      return Formula::restrict(beta_normalize(f->body), f->eq_lhs, f->eq_rhs);
  }
  return f;
}

PredicateRef beta_normalize(const PredicateRef& p) {
  switch (p->kind) {
    case PredKind::Var2:
    case PredKind::Symbol:
      return p;
    case PredKind::Compr:
      return Predicate::compr(p->binders, beta_normalize(p->body));
    case PredKind::Mu:
    case PredKind::Nu: {
      auto op = std::make_shared<Transformer>();
      op->var = p->op->var;
      op->arity = p->op->arity;
      op->body = beta_normalize(p->op->body);
      return p->kind == PredKind::Mu ? Predicate::mu(op, p->symbols)
                                     : Predicate::nu(op, p->symbols);
    }
  }
  return p;
}

// ---------------------------------------------------------------------------
// Well-formedness
// ---------------------------------------------------------------------------

std::optional<std::string> check_term_wf(const Signature& sig, const ObjTerm& t) {
  if (t.is_var) return std::nullopt;
  auto it = sig.functions.find(t.head);
  if (it == sig.functions.end())
    return "unknown function symbol '" + t.head + "'";
  if (it->second != static_cast<int>(t.args.size()))
    return "arity mismatch: '" + t.head + "' expects " + std::to_string(it->second) +
           " arguments, got " + std::to_string(t.args.size());
  for (const auto& a : t.args)
    if (auto err = check_term_wf(sig, a)) return err;
  return std::nullopt;
}

namespace {

std::optional<std::string> wf_pred(const Signature& sig, const PredicateRef& p,
                                   std::map<std::string, int>& pvars);

std::optional<std::string> wf_form(const Signature& sig, const FormulaRef& f,
                                   std::map<std::string, int>& pvars) {
  switch (f->kind) {
    case FormKind::Atom: {
      if (auto err = wf_pred(sig, f->pred, pvars)) return err;
      int want = f->pred->arity;
      if (f->pred->kind == PredKind::Var2) {
        auto it = pvars.find(f->pred->name);
        if (it != pvars.end()) want = it->second;
      } else if (f->pred->kind == PredKind::Symbol) {
        auto it = sig.predicate_symbols.find(f->pred->name);
        if (it == sig.predicate_symbols.end())
          return "unknown predicate symbol '" + f->pred->name + "'";
        want = it->second;
      }
      if (want != static_cast<int>(f->args.size()))
        return "predicate arity mismatch at '" + show_predicate(f->pred) + "': expected " +
               std::to_string(want) + " arguments, got " + std::to_string(f->args.size());
      for (const auto& t : f->args)
        if (auto err = check_term_wf(sig, t)) return err;
      return std::nullopt;
    }
    case FormKind::Implies:
    case FormKind::And:
    case FormKind::Or:
      if (auto err = wf_form(sig, f->lhs, pvars)) return err;
      return wf_form(sig, f->rhs, pvars);
    case FormKind::ForallObj:
    case FormKind::Exists:
      return wf_form(sig, f->body, pvars);
    case FormKind::ForallPred: {
      auto saved = pvars.find(f->var) != pvars.end()
                       ? std::optional<int>(pvars[f->var])
                       : std::nullopt;
      pvars[f->var] = f->var_arity;
      auto err = wf_form(sig, f->body, pvars);
      if (saved)
        pvars[f->var] = *saved;
      else
        pvars.erase(f->var);
      return err;
    }
    case FormKind::Restrict:
      if (auto err = wf_form(sig, f->body, pvars)) return err;
      if (auto err = check_term_wf(sig, f->eq_lhs)) return err;
      return check_term_wf(sig, f->eq_rhs);
  }
  return std::nullopt;
}

std::optional<std::string> wf_pred(const Signature& sig, const PredicateRef& p,
                                   std::map<std::string, int>& pvars) {
  switch (p->kind) {
    case PredKind::Var2: {
      auto it = pvars.find(p->name);
      if (it == pvars.end()) {
        pvars[p->name] = p->arity;  // free occurrence fixes the arity
        return std::nullopt;
      }
      if (it->second != p->arity)
        return "second-order variable '" + p->name + "' used at arity " +
               std::to_string(p->arity) + " but expected arity " +
               std::to_string(it->second);
      return std::nullopt;
    }
    case PredKind::Symbol: {
      auto it = sig.predicate_symbols.find(p->name);
      if (it == sig.predicate_symbols.end())
        return "unknown predicate symbol '" + p->name + "'";
      if (it->second != p->arity)
        return "predicate symbol '" + p->name + "' has arity " + std::to_string(it->second);
      return std::nullopt;
    }
    case PredKind::Compr:
      return wf_form(sig, p->body, pvars);
    case PredKind::Mu:
    case PredKind::Nu: {
      if (auto err = check_transformer_closed(p->op)) return err;
      if (static_cast<int>(p->symbols.size()) != p->arity)
        return std::string(p->kind == PredKind::Mu ? "mu" : "nu") +
               " predicate of arity " + std::to_string(p->arity) + " needs exactly " +
               std::to_string(p->arity) + (p->kind == PredKind::Mu ? " constructors" : " destructors");
      for (const auto& c : p->symbols)
        if (!sig.has_function(c, 1))
          return "constructor/destructor '" + c + "' must be a declared unary function symbol";
      std::map<std::string, int> inner = pvars;
      inner[p->op->var] = p->op->arity;
      if (p->op->body->arity != p->arity)
        return "transformer body arity mismatch";
      return wf_pred(sig, p->op->body, inner);
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> check_formula_wf(const Signature& sig, const FormulaRef& f) {
  std::map<std::string, int> pvars;
  return wf_form(sig, f, pvars);
}

std::optional<std::string> check_predicate_wf(const Signature& sig, const PredicateRef& p) {
  std::map<std::string, int> pvars;
  return wf_pred(sig, p, pvars);
}

std::optional<std::string> check_transformer_closed(const TransformerRef& op) {
  FreeVars fv = free_vars(op->body);
  fv.pred.erase(op->var);
  if (!fv.obj.empty())
    return "transformer is not closed: free object variable '" + *fv.obj.begin() + "'";
  if (!fv.pred.empty())
    return "transformer is not closed: free predicate variable '" + *fv.pred.begin() + "'";
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Printing
// ---------------------------------------------------------------------------

namespace {

// precedence levels: 0 quantifier/equation, 1 ->, 2 \/, 3 /\, 4 |^, 5 atom
std::string show_form_prec(const FormulaRef& f, int prec, const Signature* sig);

std::string show_pred_inner(const PredicateRef& p, const Signature* sig) {
  switch (p->kind) {
    case PredKind::Var2:
    case PredKind::Symbol:
      return p->name;
    case PredKind::Compr: {
      std::string s = "{";
      for (size_t i = 0; i < p->binders.size(); ++i) {
        if (i) s += ", ";
        s += p->binders[i];
      }
      s += " => " + show_form_prec(p->body, 0, sig) + "}";
      return s;
    }
    case PredKind::Mu:
    case PredKind::Nu: {
      if (sig) {
        for (const auto& [name, q] : sig->inductives)
          if (alpha_eq(q, p)) return name;
      }
      std::string s = p->kind == PredKind::Mu ? "mu(" : "nu(";
      s += p->op->var + " => " + show_pred_inner(p->op->body, sig) + ")";
      s += p->kind == PredKind::Mu ? " ctors [" : " dtors [";
      for (size_t i = 0; i < p->symbols.size(); ++i) {
        if (i) s += ", ";
        s += p->symbols[i];
      }
      return s + "]";
    }
  }
  return "?";
}

std::string show_form_prec(const FormulaRef& f, int prec, const Signature* sig) {
  auto wrap = [&](int lvl, std::string s) {
    return prec > lvl ? "(" + std::move(s) + ")" : std::move(s);
  };
  if (auto eq = as_equation(f))
    return wrap(0, show_term(eq->first) + " = " + show_term(eq->second));
  switch (f->kind) {
    case FormKind::Atom: {
      std::string s = show_pred_inner(f->pred, sig);
      if (!f->args.empty()) {
        s += "(";
        for (size_t i = 0; i < f->args.size(); ++i) {
          if (i) s += ", ";
          s += show_term(f->args[i]);
        }
        s += ")";
      }
      return s;
    }
    case FormKind::Implies:
      return wrap(1, show_form_prec(f->lhs, 2, sig) + " -> " + show_form_prec(f->rhs, 1, sig));
    case FormKind::Or:
      return wrap(2, show_form_prec(f->lhs, 3, sig) + " \\/ " + show_form_prec(f->rhs, 2, sig));
    case FormKind::And:
      return wrap(3, show_form_prec(f->lhs, 4, sig) + " /\\ " + show_form_prec(f->rhs, 3, sig));
    case FormKind::ForallObj:
      return wrap(0, "all " + f->var + ". " + show_form_prec(f->body, 0, sig));
    case FormKind::Exists:
      return wrap(0, "ex " + f->var + ". " + show_form_prec(f->body, 0, sig));
    case FormKind::ForallPred:
      return wrap(0, "all2 " + f->var + "/" + std::to_string(f->var_arity) + ". " +
                         show_form_prec(f->body, 0, sig));
    case FormKind::Restrict:
      return wrap(4, show_form_prec(f->body, 5, sig) + " |^ (" + show_term(f->eq_lhs) +
                         " = " + show_term(f->eq_rhs) + ")");
  }
  return "?";
}

}  // namespace

std::string show_formula(const FormulaRef& f, const Signature* sig) {
  if (!f) return "<null>";
  return show_form_prec(f, 0, sig);
}

std::string show_predicate(const PredicateRef& p, const Signature* sig) {
  if (!p) return "<null>";
  return show_pred_inner(p, sig);
}

}  // namespace af2m
