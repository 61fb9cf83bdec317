#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

namespace af2m {

// ---------------------------------------------------------------------------
// Curry-style proof terms:
//
//   t ::= x | \x.t | t t | in t | out t | MRec s r | MCoRec s r
//       | MIt s r | MCoIt s r            (iteration sugar with its own axioms)
//       | <r,s> | fst t | snd t | inl t | inr t
//       | case(t, x.s, y.r) | pack t | open(t, u.r) | unit
//
// A partially applied recursor "MRec s" stands for \x. MRec s x; the parser
// and builders materialize that eta-expansion.
// ---------------------------------------------------------------------------

enum class TermKind {
  Var, Lam, App, In, Out, MRec, MCoRec, MIt, MCoIt,
  Pair, Fst, Snd, Inl, Inr, Case, Pack, Open, Unit
};

struct ProofTerm;
using TermRef = std::shared_ptr<const ProofTerm>;

struct ProofTerm {
  TermKind kind;
  std::string name;   // Var; binder for Lam
  std::string name2;  // Case: left binder; Open: binder
  std::string name3;  // Case: right binder
  TermRef a, b, c;    // children (see builders)

  static TermRef var(const std::string& x);
  static TermRef lam(const std::string& x, TermRef body);
  static TermRef app(TermRef f, TermRef arg);
  static TermRef in(TermRef t);
  static TermRef out(TermRef t);
  static TermRef mrec(TermRef s, TermRef r);
  static TermRef mcorec(TermRef s, TermRef r);
  static TermRef mit(TermRef s, TermRef r);
  static TermRef mcoit(TermRef s, TermRef r);
  static TermRef pair(TermRef x, TermRef y);
  static TermRef fst(TermRef t);
  static TermRef snd(TermRef t);
  static TermRef inl(TermRef t);
  static TermRef inr(TermRef t);
  static TermRef case_of(TermRef scrut, const std::string& x, TermRef l,
                         const std::string& y, TermRef r);
  static TermRef pack(TermRef t);
  static TermRef open_of(TermRef scrut, const std::string& u, TermRef body);
  static TermRef unit();

  /// \x. MRec s x — the prescribed reading of a partially applied recursor.
  static TermRef partial(TermKind recursor, TermRef s);
};

std::vector<TermRef> children(const TermRef& t);

std::set<std::string> term_free_vars(const TermRef& t);
/// Capture-avoiding substitution t[x := s].
TermRef term_subst(const TermRef& t, const std::string& x, const TermRef& s);
bool term_alpha_eq(const TermRef& a, const TermRef& b);
/// Canonical nameless rendering; alpha-equivalent terms agree on it.
std::string term_canonical(const TermRef& t);
std::string show_proof_term(const TermRef& t);
size_t term_size(const TermRef& t);

}  // namespace af2m
