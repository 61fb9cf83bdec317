#pragma once

#include <optional>
#include <string>
#include <vector>

#include "af2m/proofterm.hpp"

namespace af2m {

// ---------------------------------------------------------------------------
// Operational semantics: one-step reduction is the closure of
//
//   (\x.r)s            |-> r[x:=s]                  beta
//   MRec s (in t)      |-> s (\x.x) (MRec s) t      mrec
//   out (MCoRec s t)   |-> s (\x.x) (MCoRec s) t    mcorec-out
//   MIt s (in t)       |-> s (MIt s) t              mit
//   out (MCoIt s t)    |-> s (MCoIt s) t            mcoit-out
//   fst <r,s>          |-> r                        fst
//   snd <r,s>          |-> s                        snd
//   case(inl r,x.s,..) |-> s[x:=r]                  case-inl
//   case(inr r,..,y.t) |-> t[y:=r]                  case-inr
//   open(pack t, u.r)  |-> r[u:=t]                  open-pack
//
// under all term formers. Evaluation contexts extend the core grammar
// (hole | E s | out E | MRec s E) homomorphically to all eliminators.
// ---------------------------------------------------------------------------

struct ReductionStep {
  std::vector<int> path;  // child indices from the root to the redex
  std::string axiom;
  TermRef result;  // whole term after the step
};

/// Contracts `t` if its root is a redex.
std::optional<std::pair<std::string, TermRef>> contract_root(const TermRef& t);

/// All one-step reducts, at every position.
std::vector<ReductionStep> one_step(const TermRef& t);

/// Applies the named axiom at `path`; used to replay recorded traces.
std::optional<TermRef> apply_at(const TermRef& t, const std::vector<int>& path,
                                const std::string& axiom);

/// The unique weak-head step E[t] -> E[t'], if t sits in an evaluation
/// context hole as a redex.
std::optional<ReductionStep> whd_step(const TermRef& t);

struct NormalizeTermResult {
  TermRef term;
  std::vector<ReductionStep> trace;
  bool fuel_exhausted = false;
};

/// Leftmost-outermost normalization (reduces under binders).
NormalizeTermResult normalize(const TermRef& t, long fuel = 100000);

enum class TermClass { Variable, ITerm, ETerm };
TermClass classify(const TermRef& t);

/// true iff t decomposes as E[x] for an evaluation context E and variable x.
bool is_neutral(const TermRef& t);

/// Immediate subterms per the inductive SN definition.
std::vector<TermRef> ist(const TermRef& t);

/// Problematic subterms of a redex: the subterms an axiom may discard.
/// Returns nullopt when t is not a redex.
std::optional<std::vector<TermRef>> prt(const TermRef& t);

// ---------------------------------------------------------------------------
// Inductive SN certificates (rules sn-var, sn-i, sn-e, sn-w).
// ---------------------------------------------------------------------------

struct SNDerivation {
  enum class Rule { SnVar, SnI, SnE, SnW };
  Rule rule;
  TermRef term;
  std::vector<SNDerivation> children;
  // sn-w bookkeeping
  std::optional<ReductionStep> whd;
  std::vector<TermRef> prt_discharged;
};

struct SNCertifyResult {
  std::optional<SNDerivation> derivation;
  std::string failure;  // stuck subterm / fuel note when empty derivation
  long nodes_used = 0;
};

SNCertifyResult sn_certify(const TermRef& t, long fuel = 100000);

enum class SNVerdict { SN, NonSN, Inconclusive };

struct SNOracleResult {
  SNVerdict verdict = SNVerdict::Inconclusive;
  size_t graph_size = 0;
  /// For NonSN: a path from t into a cycle (last element alpha-repeats an
  /// earlier one).
  std::vector<TermRef> witness;
};

/// Exhaustive exploration of the one_step reduction graph modulo alpha.
/// SN iff the reachable graph is finite and acyclic.
SNOracleResult sn_oracle(const TermRef& t, size_t node_budget = 200000);

/// Least saturated superset of M /\ SN within a finite universe:
/// neutral SN terms of the universe are added, then the set is closed under
/// weak-head expansion with SN problematic subterms.
/// The universe must be closed under ist() and whd_step within itself.
struct SatClosureResult {
  std::vector<TermRef> closure;
  std::string error;  // nonempty on precondition violation
};
SatClosureResult sat_closure(const std::vector<TermRef>& m,
                             const std::vector<TermRef>& universe,
                             size_t oracle_budget = 20000);

std::string trace_to_json(const TermRef& start, const std::vector<ReductionStep>& trace);
uint64_t term_hash(const TermRef& t);

}  // namespace af2m
