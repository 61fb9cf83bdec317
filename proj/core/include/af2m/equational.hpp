#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "af2m/syntax.hpp"

namespace af2m {

// ---------------------------------------------------------------------------
// Derivations of E |> r = s from a context of equations, by instantiation,
// reflexivity, transitivity and compatibility with function symbols.
// Search is oriented bounded rewriting; replay validates evidence against the
// four rules only.
// ---------------------------------------------------------------------------

struct Equation {
  ObjTerm lhs, rhs;
};
using EquationSet = std::vector<Equation>;

struct RewriteConfig {
  long fuel = 10000;  // max rewrite steps per normalization
};

/// Checkable evidence for E |> r = s. Replaying the tree bottom-up
/// reproduces exactly the claimed pair.
struct EqEvidence {
  enum class Kind { Instance, Refl, Trans, Cong };
  Kind kind = Kind::Refl;

  // Instance: (lhs,rhs)[sigma] of equation `index`, possibly swapped
  size_t index = 0;
  ObjSubst sigma;
  bool backward = false;
  // Refl
  ObjTerm term;
  // Trans (2 children, with recorded mid term) / Cong (n children)
  std::vector<EqEvidence> children;
  ObjTerm mid;
  std::string fn;  // Cong

  static EqEvidence refl(ObjTerm t);
  static EqEvidence instance(size_t index, ObjSubst sigma, bool backward);
  static EqEvidence trans(EqEvidence a, EqEvidence b, ObjTerm mid);
  static EqEvidence cong(std::string fn, std::vector<EqEvidence> children);
};

/// First-order matching of one equation against a target pair, trying both
/// orientations; one substitution must instantiate both sides at once.
struct InstanceMatch {
  ObjSubst sigma;
  bool backward = false;
};
std::optional<InstanceMatch> match_instance(const Equation& eq, const ObjTerm& r,
                                            const ObjTerm& s);

/// One-sided pattern match: pattern[sigma] == target extending `sigma`.
bool match_term(const ObjTerm& pattern, const ObjTerm& target, ObjSubst& sigma);

struct RewriteTraceEntry {
  std::vector<int> pos;  // path of argument indices
  size_t eq_index = 0;
  ObjSubst sigma;
  ObjTerm result;  // whole term after the step
};

struct NormalizeResult {
  ObjTerm term;
  std::vector<RewriteTraceEntry> trace;
  bool fuel_exhausted = false;
};

/// Leftmost-outermost rewriting with the equations oriented left-to-right.
NormalizeResult normalize_obj(const EquationSet& eqs, const ObjTerm& t,
                              const RewriteConfig& cfg = {});

enum class DeriveStatus { Derived, NotDerivable, FuelExhausted };

struct DeriveResult {
  DeriveStatus status = DeriveStatus::NotDerivable;
  std::optional<EqEvidence> evidence;
};

/// Searches for a derivation of E |> r = s by normalizing both sides.
/// Failure is "not derivable within fuel", not a proof of non-derivability.
DeriveResult derive_eq(const EquationSet& eqs, const ObjTerm& r, const ObjTerm& s,
                       const RewriteConfig& cfg = {});

struct ReplayError {
  std::string message;
};

/// Validates an evidence tree node-by-node against the derivation rules and
/// returns the proved pair. This is the kernel-trusted path.
std::variant<std::pair<ObjTerm, ObjTerm>, ReplayError> replay_evidence(
    const EquationSet& eqs, const EqEvidence& ev);

std::string show_evidence(const EqEvidence& ev);
std::string show_equation(const Equation& eq);
/// JSON rendering of an evidence tree (the trace-format serialization).
std::string evidence_to_json(const EqEvidence& ev);

/// Equality of equations up to renaming of their (implicitly universal) variables.
bool equation_alpha_eq(const Equation& a, const Equation& b);

}  // namespace af2m
