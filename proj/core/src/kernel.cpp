#include "af2m/kernel.hpp"

#include <algorithm>
#include <sstream>

namespace af2m {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Var: return "var";
    case Rule::ImpI: return "arrow_i";
    case Rule::ImpE: return "arrow_e";
    case Rule::AllI: return "all_i";
    case Rule::AllE: return "all_e";
    case Rule::All2I: return "all2_i";
    case Rule::All2E: return "all2_e";
    case Rule::Eq: return "eq";
    case Rule::EqAx: return "eq_ax";
    case Rule::MuI: return "mu_i";
    case Rule::NuE: return "nu_e";
    case Rule::MuE: return "mu_e";
    case Rule::NuI: return "nu_i";
    case Rule::MuIt: return "mu_it";
    case Rule::NuCoIt: return "nu_coit";
    case Rule::AndI: return "and_i";
    case Rule::AndEL: return "and_e_l";
    case Rule::AndER: return "and_e_r";
    case Rule::OrIL: return "or_i_l";
    case Rule::OrIR: return "or_i_r";
    case Rule::OrE: return "or_e";
    case Rule::ExI: return "ex_i";
    case Rule::ExE: return "ex_e";
    case Rule::RestrI: return "restrict_i";
    case Rule::RestrE: return "restrict_e";
    case Rule::Lemma: return "lemma";
  }
  return "?";
}

namespace {

struct Fail {
  std::string message;
};

using Ctx = std::vector<std::pair<std::string, FormulaRef>>;

std::optional<std::string> lookup_ctx(const Ctx& ctx, const std::string& name,
                                      FormulaRef& out) {
  for (const auto& [n, f] : ctx)
    if (n == name) {
      out = f;
      return std::nullopt;
    }
  return "hypothesis '" + name + "' not in context";
}

void merge_ctx(Ctx& into, const Ctx& from, const Signature* sig) {
  for (const auto& [n, f] : from) {
    bool found = false;
    for (const auto& [m, g] : into)
      if (m == n) {
        if (!alpha_eq(f, g))
          throw Fail{"hypothesis '" + n + "' occurs with two different formulas: " +
                     show_formula(g, sig) + " vs " + show_formula(f, sig)};
        found = true;
        break;
      }
    if (!found) into.emplace_back(n, f);
  }
}

Ctx drop_hyp(const Ctx& ctx, const std::string& name) {
  Ctx out;
  for (const auto& e : ctx)
    if (e.first != name) out.push_back(e);
  return out;
}

void merge_licensed(std::vector<LicensedEq>& into, const std::vector<LicensedEq>& from) {
  for (const auto& l : from) {
    bool dup = false;
    for (const auto& e : into)
      if (e.eq.lhs == l.eq.lhs && e.eq.rhs == l.eq.rhs && e.support == l.support) {
        dup = true;
        break;
      }
    if (!dup) into.push_back(l);
  }
}

std::vector<LicensedEq> drop_supported(const std::vector<LicensedEq>& lic,
                                       const std::string& name) {
  std::vector<LicensedEq> out;
  for (const auto& l : lic)
    if (!l.support.count(name)) out.push_back(l);
  return out;
}

std::set<std::string> ctx_free_obj(const Ctx& ctx) {
  std::set<std::string> out;
  for (const auto& [_, f] : ctx)
    for (const auto& v : free_vars(f).obj) out.insert(v);
  return out;
}

std::set<std::string> ctx_free_pred(const Ctx& ctx) {
  std::set<std::string> out;
  for (const auto& [_, f] : ctx)
    for (const auto& v : free_vars(f).pred) out.insert(v);
  return out;
}

EquationSet equations_in_scope(const DerivationScript& script,
                               const std::vector<LicensedEq>& licensed) {
  EquationSet eqs = script.eqs;
  for (const auto& l : licensed) eqs.push_back(l.eq);
  return eqs;
}

// Validates E |> r = s: replays explicit evidence if supplied, otherwise
// searches. Either way the accepted pair must be exactly (r, s).
void require_derivable(const EquationSet& eqs, const ObjTerm& r, const ObjTerm& s,
                       const std::optional<EqEvidence>& evidence) {
  EqEvidence ev;
  if (evidence) {
    ev = *evidence;
  } else {
    DeriveResult dr = derive_eq(eqs, r, s);
    if (dr.status == DeriveStatus::FuelExhausted)
      throw Fail{"equational search ran out of fuel for " + show_term(r) + " = " +
                 show_term(s)};
    if (dr.status != DeriveStatus::Derived)
      throw Fail{"not derivable from the equations in scope: " + show_term(r) +
                 " = " + show_term(s)};
    ev = *dr.evidence;
  }
  auto replayed = replay_evidence(eqs, ev);
  if (std::holds_alternative<ReplayError>(replayed))
    throw Fail{"equational evidence rejected: " + std::get<ReplayError>(replayed).message};
  auto& [pr, ps] = std::get<0>(replayed);
  if (!(pr == r && ps == s))
    throw Fail{"equational evidence proves " + show_term(pr) + " = " + show_term(ps) +
               ", wanted " + show_term(r) + " = " + show_term(s)};
}

FormulaRef atom_of(const PredicateRef& p, std::vector<ObjTerm> args) {
  return beta_normalize(Formula::atom(p, std::move(args)));
}

// all v1..vn. P(v..) -> Q(g(v..)) with fresh object variables.
FormulaRef subset_formula(const PredicateRef& p, const PredicateRef& q,
                          const std::vector<TermContext>* funs, int n,
                          std::set<std::string> avoid) {
  std::vector<std::string> xs;
  std::vector<ObjTerm> xs_t;
  for (int i = 0; i < n; ++i) {
    std::string x = fresh_name("v" + std::to_string(i + 1), avoid);
    avoid.insert(x);
    xs.push_back(x);
    xs_t.push_back(ObjTerm::var(x));
  }
  std::vector<ObjTerm> rhs_args;
  for (int i = 0; i < n; ++i)
    rhs_args.push_back(funs ? (*funs)[i].apply(xs_t[i]) : xs_t[i]);
  FormulaRef body = Formula::implies(atom_of(p, xs_t), atom_of(q, rhs_args));
  for (int i = n; i-- > 0;) body = Formula::forall_obj(xs[i], body);
  return body;
}

std::set<std::string> avoid_vars(const PredicateRef& motive,
                                 const std::vector<TermContext>& funs) {
  std::set<std::string> avoid = free_vars(motive).obj;
  for (const auto& f : funs) {
    for (const auto& v : obj_vars(f.body))
      if (v != f.hole) avoid.insert(v);
  }
  return avoid;
}

struct RecRulePieces {
  PredicateRef fix;  // the mu/nu predicate
  PredicateRef motive;
  std::vector<TermContext> funs;
  std::vector<ObjTerm> args;
  int n = 0;
};

RecRulePieces prepare_rec(const DerivationScript& script, const DerivationStep& step,
                          bool is_mu) {
  RecRulePieces p;
  if (!step.pred) throw Fail{"missing target (co)inductive predicate"};
  p.fix = beta_normalize(step.pred);
  if (is_mu && p.fix->kind != PredKind::Mu)
    throw Fail{"target predicate is not a mu predicate"};
  if (!is_mu && p.fix->kind != PredKind::Nu)
    throw Fail{"target predicate is not a nu predicate"};
  if (auto err = check_predicate_wf(*script.sig, p.fix)) throw Fail{*err};
  p.n = p.fix->arity;
  if (!step.motive) throw Fail{"missing motive"};
  p.motive = beta_normalize(step.motive);
  if (auto err = check_predicate_wf(*script.sig, p.motive)) throw Fail{*err};
  if (p.motive->arity != p.n)
    throw Fail{"motive arity " + std::to_string(p.motive->arity) +
               " does not match predicate arity " + std::to_string(p.n)};
  if (static_cast<int>(step.funs.size()) != p.n)
    throw Fail{"function tuple must have " + std::to_string(p.n) + " entries"};
  if (static_cast<int>(step.args.size()) != p.n)
    throw Fail{"argument tuple must have " + std::to_string(p.n) + " entries"};
  p.funs = step.funs;
  for (const auto& f : p.funs)
    if (auto err = check_term_wf(*script.sig, f.body))
      throw Fail{"in function context: " + *err};
  for (const auto& t : step.args)
    if (auto err = check_term_wf(*script.sig, t)) throw Fail{*err};
  p.args = step.args;
  return p;
}

std::vector<ObjTerm> apply_symbols(const std::vector<std::string>& symbols,
                                   const std::vector<ObjTerm>& ts) {
  std::vector<ObjTerm> out;
  for (size_t i = 0; i < ts.size(); ++i)
    out.push_back(ObjTerm::app(symbols[i], {ts[i]}));
  return out;
}

std::vector<ObjTerm> apply_funs(const std::vector<TermContext>& funs,
                                const std::vector<ObjTerm>& ts) {
  std::vector<ObjTerm> out;
  for (size_t i = 0; i < ts.size(); ++i) out.push_back(funs[i].apply(ts[i]));
  return out;
}

FormulaRef build_rec_step_formula(const PredicateRef& fix, const PredicateRef& motive,
                                  const std::vector<TermContext>& funs, bool extended) {
  bool is_mu = fix->kind == PredKind::Mu;
  int n = fix->arity;
  std::set<std::string> pavoid = free_vars(motive).pred;
  pavoid.insert(fix->op->var);
  std::string xname = fresh_name("X", pavoid);
  PredicateRef xvar = Predicate::var2(xname, n);
  std::set<std::string> oavoid = avoid_vars(motive, funs);

  FormulaRef sub1, sub2, sub3;
  if (is_mu) {
    sub1 = subset_formula(xvar, fix, nullptr, n, oavoid);
    sub2 = subset_formula(xvar, motive, &funs, n, oavoid);
    std::vector<TermContext> f_o_c;
    for (int i = 0; i < n; ++i) {
      std::string h = fresh_name("h", oavoid);
      f_o_c.push_back(
          {h, funs[i].apply(ObjTerm::app(fix->symbols[i], {ObjTerm::var(h)}))});
    }
    sub3 = subset_formula(apply_transformer(fix->op, xvar), motive, &f_o_c, n, oavoid);
  } else {
    sub1 = subset_formula(fix, xvar, nullptr, n, oavoid);
    sub2 = subset_formula(motive, xvar, &funs, n, oavoid);
    std::vector<TermContext> d_o_f;
    for (int i = 0; i < n; ++i) {
      std::string h = fresh_name("h", oavoid);
      d_o_f.push_back(
          {h, ObjTerm::app(fix->symbols[i], {funs[i].apply(ObjTerm::var(h))})});
    }
    sub3 = subset_formula(motive, apply_transformer(fix->op, xvar), &d_o_f, n, oavoid);
  }
  FormulaRef body = extended ? Formula::implies(sub1, Formula::implies(sub2, sub3))
                             : Formula::implies(sub2, sub3);
  return beta_normalize(Formula::forall_pred(xname, n, body));
}

void expect_alpha(const FormulaRef& got, const FormulaRef& want, const char* what,
                  const Signature* sig) {
  if (!alpha_eq(got, want))
    throw Fail{std::string(what) + ": expected " + show_formula(want, sig) +
               ", got " + show_formula(got, sig)};
}

}  // namespace

std::optional<CheckError> check_rule(const DerivationScript& script,
                                     const DerivationStep& step, int step_index,
                                     const std::vector<const CheckedJudgment*>& premises,
                                     const LemmaEnv* lemmas, CheckedJudgment& out) {
  const Signature* sig = script.sig.get();
  auto fail = [&](const std::string& msg) {
    return CheckError{step_index, rule_name(step.rule), msg};
  };
  auto need_premises = [&](size_t n) {
    if (premises.size() != n)
      throw Fail{"expected " + std::to_string(n) + " premise(s), got " +
                 std::to_string(premises.size())};
  };
  auto normalized_payload_formula = [&]() -> FormulaRef {
    if (!step.formula) throw Fail{"missing formula payload"};
    FormulaRef f = beta_normalize(step.formula);
    if (auto err = check_formula_wf(*sig, f)) throw Fail{*err};
    return f;
  };

  try {
    switch (step.rule) {
      case Rule::Var: {
        need_premises(0);
        FormulaRef a = normalized_payload_formula();
        out.ctx = {{step.name, a}};
        out.term = ProofTerm::var(step.name);
        out.formula = a;
        return std::nullopt;
      }

      case Rule::ImpI: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        FormulaRef hyp;
        bool in_ctx = !lookup_ctx(j.ctx, step.name, hyp).has_value();
        if (!in_ctx) {
          if (!step.formula)
            throw Fail{"'" + step.name +
                       "' is not a hypothesis of the premise; a formula is required "
                       "for vacuous abstraction"};
          hyp = normalized_payload_formula();
        } else if (step.formula) {
          FormulaRef a = normalized_payload_formula();
          expect_alpha(hyp, a, "hypothesis formula mismatch", sig);
        }
        out.ctx = drop_hyp(j.ctx, step.name);
        out.term = ProofTerm::lam(step.name, j.term);
        out.formula = Formula::implies(hyp, j.formula);
        out.licensed = drop_supported(j.licensed, step.name);
        return std::nullopt;
      }

      case Rule::ImpE: {
        need_premises(2);
        const CheckedJudgment& f = *premises[0];
        const CheckedJudgment& a = *premises[1];
        if (f.formula->kind != FormKind::Implies)
          throw Fail{"major premise is not an implication: " + show_formula(f.formula, sig)};
        expect_alpha(a.formula, f.formula->lhs, "argument formula mismatch", sig);
        out.ctx = f.ctx;
        merge_ctx(out.ctx, a.ctx, sig);
        out.term = ProofTerm::app(f.term, a.term);
        out.formula = f.formula->rhs;
        out.licensed = f.licensed;
        merge_licensed(out.licensed, a.licensed);
        return std::nullopt;
      }

      case Rule::AllI: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        if (ctx_free_obj(j.ctx).count(step.name))
          throw Fail{"freshness violated: '" + step.name +
                     "' occurs free in the context"};
        out = j;
        out.formula = Formula::forall_obj(step.name, j.formula);
        return std::nullopt;
      }

      case Rule::AllE: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        if (j.formula->kind != FormKind::ForallObj)
          throw Fail{"premise is not a first-order universal: " +
                     show_formula(j.formula, sig)};
        if (!step.term1) throw Fail{"missing witness term"};
        if (auto err = check_term_wf(*sig, *step.term1)) throw Fail{*err};
        out = j;
        out.formula = beta_normalize(
            subst_formula_obj(j.formula->body, j.formula->var, *step.term1));
        return std::nullopt;
      }

      case Rule::All2I: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        if (ctx_free_pred(j.ctx).count(step.name))
          throw Fail{"freshness violated: '" + step.name +
                     "' occurs free in the context"};
        out = j;
        out.formula = Formula::forall_pred(step.name, step.arity, j.formula);
        if (auto err = check_formula_wf(*sig, out.formula)) throw Fail{*err};
        return std::nullopt;
      }

      case Rule::All2E: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        if (j.formula->kind != FormKind::ForallPred)
          throw Fail{"premise is not a second-order universal: " +
                     show_formula(j.formula, sig)};
        if (!step.pred) throw Fail{"missing predicate payload"};
        PredicateRef p = beta_normalize(step.pred);
        if (auto err = check_predicate_wf(*sig, p)) throw Fail{*err};
        if (p->arity != j.formula->var_arity)
          throw Fail{"predicate arity " + std::to_string(p->arity) +
                     " does not match the bound variable's arity " +
                     std::to_string(j.formula->var_arity)};
        out = j;
        out.formula =
            beta_normalize(subst_formula_pred(j.formula->body, j.formula->var, p));
        return std::nullopt;
      }

      case Rule::Eq: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        if (!step.term1 || !step.term2) throw Fail{"missing equation terms"};
        if (step.eq_var.empty()) throw Fail{"missing template variable"};
        FormulaRef tmpl = normalized_payload_formula();
        const ObjTerm& r = *step.term1;
        const ObjTerm& s = *step.term2;
        if (auto err = check_term_wf(*sig, r)) throw Fail{*err};
        if (auto err = check_term_wf(*sig, s)) throw Fail{*err};
        FormulaRef with_r = beta_normalize(subst_formula_obj(tmpl, step.eq_var, r));
        expect_alpha(j.formula, with_r, "premise does not match the template at the "
                                        "left-hand term", sig);
        require_derivable(equations_in_scope(script, j.licensed), r, s,
                          step.evidence);
        out = j;
        out.formula = beta_normalize(subst_formula_obj(tmpl, step.eq_var, s));
        return std::nullopt;
      }

      case Rule::EqAx: {
        need_premises(0);
        if (!step.term1 || !step.term2) throw Fail{"missing equation terms"};
        if (auto err = check_term_wf(*sig, *step.term1)) throw Fail{*err};
        if (auto err = check_term_wf(*sig, *step.term2)) throw Fail{*err};
        require_derivable(script.eqs, *step.term1, *step.term2, step.evidence);
        out.ctx = {};
        out.term = ProofTerm::unit();
        out.formula = mk_equation(*step.term1, *step.term2);
        return std::nullopt;
      }

      case Rule::MuI: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        if (!step.pred) throw Fail{"missing mu predicate"};
        PredicateRef fix = beta_normalize(step.pred);
        if (fix->kind != PredKind::Mu) throw Fail{"target predicate is not a mu predicate"};
        if (auto err = check_predicate_wf(*sig, fix)) throw Fail{*err};
        int n = fix->arity;
        if (static_cast<int>(step.args.size()) != n)
          throw Fail{"argument tuple must have " + std::to_string(n) + " entries"};
        for (const auto& t : step.args)
          if (auto err = check_term_wf(*sig, t)) throw Fail{*err};
        FormulaRef want =
            atom_of(apply_transformer(fix->op, fix), step.args);
        expect_alpha(j.formula, want, "premise must be the one-step unfolding", sig);
        out = j;
        out.term = ProofTerm::in(j.term);
        out.formula = atom_of(fix, apply_symbols(fix->symbols, step.args));
        return std::nullopt;
      }

      case Rule::NuE: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        if (!step.pred) throw Fail{"missing nu predicate"};
        PredicateRef fix = beta_normalize(step.pred);
        if (fix->kind != PredKind::Nu) throw Fail{"target predicate is not a nu predicate"};
        if (auto err = check_predicate_wf(*sig, fix)) throw Fail{*err};
        int n = fix->arity;
        if (static_cast<int>(step.args.size()) != n)
          throw Fail{"argument tuple must have " + std::to_string(n) + " entries"};
        for (const auto& t : step.args)
          if (auto err = check_term_wf(*sig, t)) throw Fail{*err};
        FormulaRef want = atom_of(fix, step.args);
        expect_alpha(j.formula, want, "premise must inhabit the nu predicate", sig);
        out = j;
        out.term = ProofTerm::out(j.term);
        out.formula = atom_of(apply_transformer(fix->op, fix),
                              apply_symbols(fix->symbols, step.args));
        return std::nullopt;
      }

      case Rule::MuE:
      case Rule::MuIt: {
        need_premises(2);
        const CheckedJudgment& sj = *premises[0];
        const CheckedJudgment& rj = *premises[1];
        RecRulePieces p = prepare_rec(script, step, /*is_mu=*/true);
        expect_alpha(rj.formula, atom_of(p.fix, p.args),
                     "main premise must inhabit the mu predicate", sig);
        FormulaRef want_step =
            build_rec_step_formula(p.fix, p.motive, p.funs, step.rule == Rule::MuE);
        expect_alpha(sj.formula, want_step, "step premise has the wrong shape", sig);
        out.ctx = sj.ctx;
        merge_ctx(out.ctx, rj.ctx, sig);
        out.licensed = sj.licensed;
        merge_licensed(out.licensed, rj.licensed);
        out.term = step.rule == Rule::MuE ? ProofTerm::mrec(sj.term, rj.term)
                                          : ProofTerm::mit(sj.term, rj.term);
        out.formula = atom_of(p.motive, apply_funs(p.funs, p.args));
        return std::nullopt;
      }

      case Rule::NuI:
      case Rule::NuCoIt: {
        need_premises(2);
        const CheckedJudgment& sj = *premises[0];
        const CheckedJudgment& rj = *premises[1];
        RecRulePieces p = prepare_rec(script, step, /*is_mu=*/false);
        expect_alpha(rj.formula, atom_of(p.motive, p.args),
                     "main premise must inhabit the motive", sig);
        FormulaRef want_step =
            build_rec_step_formula(p.fix, p.motive, p.funs, step.rule == Rule::NuI);
        expect_alpha(sj.formula, want_step, "step premise has the wrong shape", sig);
        out.ctx = sj.ctx;
        merge_ctx(out.ctx, rj.ctx, sig);
        out.licensed = sj.licensed;
        merge_licensed(out.licensed, rj.licensed);
        out.term = step.rule == Rule::NuI ? ProofTerm::mcorec(sj.term, rj.term)
                                          : ProofTerm::mcoit(sj.term, rj.term);
        out.formula = atom_of(p.fix, apply_funs(p.funs, p.args));
        return std::nullopt;
      }

      case Rule::AndI: {
        need_premises(2);
        const CheckedJudgment& a = *premises[0];
        const CheckedJudgment& b = *premises[1];
        out.ctx = a.ctx;
        merge_ctx(out.ctx, b.ctx, sig);
        out.licensed = a.licensed;
        merge_licensed(out.licensed, b.licensed);
        out.term = ProofTerm::pair(a.term, b.term);
        out.formula = Formula::conj(a.formula, b.formula);
        return std::nullopt;
      }

      case Rule::AndEL:
      case Rule::AndER: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        if (j.formula->kind != FormKind::And)
          throw Fail{"premise is not a conjunction: " + show_formula(j.formula, sig)};
        out = j;
        if (step.rule == Rule::AndEL) {
          out.term = ProofTerm::fst(j.term);
          out.formula = j.formula->lhs;
        } else {
          out.term = ProofTerm::snd(j.term);
          out.formula = j.formula->rhs;
        }
        return std::nullopt;
      }

      case Rule::OrIL:
      case Rule::OrIR: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        FormulaRef other = normalized_payload_formula();
        out = j;
        if (step.rule == Rule::OrIL) {
          out.term = ProofTerm::inl(j.term);
          out.formula = Formula::disj(j.formula, other);
        } else {
          out.term = ProofTerm::inr(j.term);
          out.formula = Formula::disj(other, j.formula);
        }
        return std::nullopt;
      }

      case Rule::OrE: {
        need_premises(3);
        const CheckedJudgment& d = *premises[0];
        const CheckedJudgment& l = *premises[1];
        const CheckedJudgment& r = *premises[2];
        if (d.formula->kind != FormKind::Or)
          throw Fail{"major premise is not a disjunction: " + show_formula(d.formula, sig)};
        FormulaRef lh, rh;
        if (auto err = lookup_ctx(l.ctx, step.name, lh))
          throw Fail{"left branch: " + *err};
        if (auto err = lookup_ctx(r.ctx, step.name2, rh))
          throw Fail{"right branch: " + *err};
        expect_alpha(lh, d.formula->lhs, "left branch hypothesis mismatch", sig);
        expect_alpha(rh, d.formula->rhs, "right branch hypothesis mismatch", sig);
        expect_alpha(r.formula, l.formula, "branch conclusions differ", sig);
        out.ctx = d.ctx;
        merge_ctx(out.ctx, drop_hyp(l.ctx, step.name), sig);
        merge_ctx(out.ctx, drop_hyp(r.ctx, step.name2), sig);
        out.licensed = d.licensed;
        merge_licensed(out.licensed, drop_supported(l.licensed, step.name));
        merge_licensed(out.licensed, drop_supported(r.licensed, step.name2));
        out.term = ProofTerm::case_of(d.term, step.name, l.term, step.name2, r.term);
        out.formula = l.formula;
        return std::nullopt;
      }

      case Rule::ExI: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        FormulaRef target = normalized_payload_formula();
        if (target->kind != FormKind::Exists)
          throw Fail{"target is not an existential: " + show_formula(target, sig)};
        if (!step.term1) throw Fail{"missing witness term"};
        if (auto err = check_term_wf(*sig, *step.term1)) throw Fail{*err};
        FormulaRef inst = beta_normalize(
            subst_formula_obj(target->body, target->var, *step.term1));
        expect_alpha(j.formula, inst, "premise does not match the instantiated body", sig);
        out = j;
        out.term = ProofTerm::pack(j.term);
        out.formula = target;
        return std::nullopt;
      }

      case Rule::ExE: {
        need_premises(2);
        const CheckedJudgment& e = *premises[0];
        const CheckedJudgment& b = *premises[1];
        if (e.formula->kind != FormKind::Exists)
          throw Fail{"major premise is not an existential: " + show_formula(e.formula, sig)};
        const std::string& u = step.name;
        const std::string& x = step.name2.empty() ? e.formula->var : step.name2;
        FormulaRef hyp;
        if (auto err = lookup_ctx(b.ctx, u, hyp)) throw Fail{"branch: " + *err};
        FormulaRef want = beta_normalize(
            subst_formula_obj(e.formula->body, e.formula->var, ObjTerm::var(x)));
        expect_alpha(hyp, want, "branch hypothesis mismatch", sig);
        Ctx merged = e.ctx;
        merge_ctx(merged, drop_hyp(b.ctx, u), sig);
        if (free_vars(b.formula).obj.count(x))
          throw Fail{"freshness violated: '" + x + "' occurs free in the conclusion"};
        for (const auto& [n, f] : merged)
          if (free_vars(f).obj.count(x))
            throw Fail{"freshness violated: '" + x + "' occurs free in hypothesis '" +
                       n + "'"};
        out.ctx = std::move(merged);
        out.licensed = e.licensed;
        merge_licensed(out.licensed, drop_supported(b.licensed, u));
        out.term = ProofTerm::open_of(e.term, u, b.term);
        out.formula = b.formula;
        return std::nullopt;
      }

      case Rule::RestrI: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        if (!step.term1 || !step.term2) throw Fail{"missing equation terms"};
        if (auto err = check_term_wf(*sig, *step.term1)) throw Fail{*err};
        if (auto err = check_term_wf(*sig, *step.term2)) throw Fail{*err};
        require_derivable(equations_in_scope(script, j.licensed), *step.term1,
                          *step.term2, step.evidence);
        out = j;
        out.formula = Formula::restrict(j.formula, *step.term1, *step.term2);
        return std::nullopt;
      }

      case Rule::RestrE: {
        need_premises(1);
        const CheckedJudgment& j = *premises[0];
        if (j.formula->kind != FormKind::Restrict)
          throw Fail{"premise is not a restriction: " + show_formula(j.formula, sig)};
        out = j;
        out.formula = j.formula->body;
        LicensedEq lic;
        lic.eq = {j.formula->eq_lhs, j.formula->eq_rhs};
        for (const auto& [n, _] : j.ctx) lic.support.insert(n);
        out.licensed.push_back(std::move(lic));
        return std::nullopt;
      }

      case Rule::Lemma: {
        need_premises(0);
        if (!lemmas) throw Fail{"no lemma environment"};
        auto it = lemmas->lemmas.find(step.name);
        if (it == lemmas->lemmas.end())
          throw Fail{"unknown lemma '" + step.name + "'"};
        const auto& [judgment, lemma_eqs] = it->second;
        for (const auto& le : lemma_eqs) {
          bool covered = false;
          for (const auto& se : script.eqs)
            if (equation_alpha_eq(le, se)) {
              covered = true;
              break;
            }
          if (!covered)
            throw Fail{"lemma '" + step.name + "' depends on equation '" +
                       show_equation(le) + "' which is not in this script's context"};
        }
        out = judgment;
        // licenses were scoped to the lemma's own derivation
        out.licensed.clear();
        return std::nullopt;
      }
    }
    throw Fail{"unhandled rule"};
  } catch (const Fail& f) {
    return fail(f.message);
  } catch (const std::exception& ex) {
    return fail(std::string("internal error: ") + ex.what());
  }
}

CheckResult check_script(const DerivationScript& script, const LemmaEnv* lemmas) {
  CheckResult res;
  const Signature* sig = script.sig.get();

  if (script.steps.empty()) {
    res.errors.push_back({0, "", "script has no steps"});
    return res;
  }
  for (size_t i = 0; i < script.steps.size(); ++i) {
    const DerivationStep& step = script.steps[i];
    std::vector<const CheckedJudgment*> prem;
    bool bad = false;
    for (int p : step.premises) {
      if (p < 1 || static_cast<size_t>(p) > i) {
        res.errors.push_back({static_cast<int>(i) + 1, rule_name(step.rule),
                              "premise index " + std::to_string(p) +
                                  " does not refer to an earlier step"});
        bad = true;
        break;
      }
      prem.push_back(&res.step_judgments[p - 1]);
    }
    if (bad) return res;
    CheckedJudgment j;
    if (auto err = check_rule(script, step, static_cast<int>(i) + 1, prem, lemmas, j)) {
      res.errors.push_back(*err);
      return res;
    }
    ++res.rule_uses[rule_name(step.rule)];
    res.step_judgments.push_back(std::move(j));
  }

  CheckedJudgment conclusion = res.step_judgments.back();
  if (script.goal) {
    FormulaRef goal = beta_normalize(script.goal);
    if (!alpha_eq(conclusion.formula, goal)) {
      res.errors.push_back({static_cast<int>(script.steps.size()), "conclusion",
                            "concluded " + show_formula(conclusion.formula, sig) +
                                " but the declared goal is " + show_formula(goal, sig)});
      return res;
    }
  }
  // every remaining hypothesis must be declared
  for (const auto& [n, f] : conclusion.ctx) {
    bool found = false;
    for (const auto& [hn, hf] : script.hyps)
      if (hn == n && alpha_eq(beta_normalize(hf), f)) {
        found = true;
        break;
      }
    if (!found) {
      res.errors.push_back({static_cast<int>(script.steps.size()), "conclusion",
                            "undischarged hypothesis '" + n + "' : " +
                                show_formula(f, sig)});
      return res;
    }
  }
  res.judgment = std::move(conclusion);
  return res;
}

TermRef extract(const CheckResult& r) {
  return r.judgment ? r.judgment->term : nullptr;
}

FormulaRef recursion_step_formula(const Signature& sig, const PredicateRef& fix,
                                  const PredicateRef& motive,
                                  const std::vector<TermContext>& funs, bool extended,
                                  std::string* error) {
  try {
    PredicateRef f = beta_normalize(fix);
    if (f->kind != PredKind::Mu && f->kind != PredKind::Nu)
      throw Fail{"not a mu/nu predicate"};
    if (auto err = check_predicate_wf(sig, f)) throw Fail{*err};
    PredicateRef k = beta_normalize(motive);
    if (auto err = check_predicate_wf(sig, k)) throw Fail{*err};
    if (k->arity != f->arity || static_cast<int>(funs.size()) != f->arity)
      throw Fail{"arity mismatch"};
    return build_rec_step_formula(f, k, funs, extended);
  } catch (const Fail& e) {
    if (error) *error = e.message;
    return nullptr;
  }
}

std::string show_judgment(const CheckedJudgment& j, const Signature* sig) {
  std::string s;
  for (size_t i = 0; i < j.ctx.size(); ++i) {
    if (i) s += ", ";
    s += j.ctx[i].first + " : " + show_formula(j.ctx[i].second, sig);
  }
  if (!j.ctx.empty()) s += " ";
  s += "|- " + show_proof_term(j.term) + " : " + show_formula(j.formula, sig);
  return s;
}

}  // namespace af2m
