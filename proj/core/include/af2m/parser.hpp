#pragma once

#include <map>
#include <string>
#include <vector>

#include "af2m/kernel.hpp"

namespace af2m {

// ---------------------------------------------------------------------------
// Surface files:
//
//   sig suc/1, star/0;                      -- function symbols with arities
//   pred A/1;                               -- abstract predicate symbols
//   let Unit := {x => x = star};            -- predicate abbreviation
//   mu Nat/1 := X => {x => Unit(x) \/ X(x)} ctors [suc];
//   nu Stream/1 := X => {x => A(head(x)) /\ X(tail(x))} dtors [id];
//   eqs nat_def { suc(star) = 0; }
//   thm name hyps [h : (A)] uses [nat_def] : formula { 1. var h : A; ... }
//   term two := suc_bar (suc_bar zero_bar);
//   expect (t) ~>* (t');
//
// Line comments start with --. The first error in a top-level item does not
// abort the remaining items.
// ---------------------------------------------------------------------------

struct ThmDecl {
  std::string name;
  DerivationScript script;
  std::vector<std::string> uses;  // equation set names, in order
  int line = 0;
};

struct TermDecl {
  std::string name;
  TermRef term;  // may reference thm extracts / earlier terms by free name
  int line = 0;
};

struct ExpectDecl {
  TermRef lhs, rhs;
  long fuel = 0;  // 0 = driver default
  int line = 0;
};

struct Diagnostic {
  std::string file;
  int line = 0;
  int col = 0;
  std::string message;
};

struct SourceFile {
  std::string filename;
  SignatureRef sig;
  std::vector<std::pair<std::string, EquationSet>> eqsets;
  std::map<std::string, PredicateRef> lets;
  std::vector<ThmDecl> thms;
  std::vector<TermDecl> terms;
  std::vector<ExpectDecl> expects;
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return diagnostics.empty(); }
  const EquationSet* find_eqset(const std::string& name) const;
};

SourceFile parse_source(const std::string& text, const std::string& filename = "<input>");

/// Renders a parsed file back to surface syntax; parse(print(f)) yields
/// alpha-equivalent scripts.
std::string print_source(const SourceFile& f);

}  // namespace af2m
