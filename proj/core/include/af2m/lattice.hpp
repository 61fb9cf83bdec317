#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace af2m::lattice {

// ---------------------------------------------------------------------------
// Explicit finite complete lattices and table-based operators, for brute-force
// verification of the (co)induction principles and monotonization laws.
// ---------------------------------------------------------------------------

struct FiniteLattice {
  int n = 0;
  std::vector<char> leq;  // n*n, row-major: leq[a*n+b] != 0  <=>  a <= b
  std::vector<int> meet_tab, join_tab;
  int bot = 0, top = 0;
  std::string description;

  bool le(int a, int b) const { return leq[a * n + b] != 0; }
  int meet2(int a, int b) const { return meet_tab[a * n + b]; }
  int join2(int a, int b) const { return join_tab[a * n + b]; }
  /// meet of a subset; the empty meet is top
  int meet(const std::vector<int>& xs) const;
  /// join of a subset; the empty join is bottom
  int join(const std::vector<int>& xs) const;
  /// join derived from meets only: the meet of all upper bounds
  int join_via_meet(const std::vector<int>& xs) const;
};

/// Checks the order axioms and completeness (for a finite poset: bounds plus
/// all pairwise meets and joins) and fills in the operation tables.
/// Returns an error description when the input is not a complete lattice.
std::optional<std::string> validate_lattice(FiniteLattice& l);

/// Convenience constructors (validated).
FiniteLattice chain_lattice(int n);
FiniteLattice powerset_lattice(int k);  // 2^k elements, bitmask order

using LatticeOperator = std::vector<int>;

bool is_monotone(const FiniteLattice& l, const LatticeOperator& op);

/// Knaster-Tarski least/greatest fixed points of a monotone operator;
/// throws std::invalid_argument otherwise.
int lfp(const FiniteLattice& l, const LatticeOperator& op);
int gfp(const FiniteLattice& l, const LatticeOperator& op);
/// Iterative ascent from bottom / descent from top, for cross-checking.
int lfp_iterative(const FiniteLattice& l, const LatticeOperator& op);
int gfp_iterative(const FiniteLattice& l, const LatticeOperator& op);

/// Upper and lower monotonizations of an arbitrary operator.
LatticeOperator upper_mono(const FiniteLattice& l, const LatticeOperator& op);
LatticeOperator lower_mono(const FiniteLattice& l, const LatticeOperator& op);

struct PrincipleEntry {
  std::string name;
  bool hypothesis = false;
  bool conclusion = false;
  bool violated() const { return hypothesis && !conclusion; }
};

struct PrincipleReport {
  std::vector<PrincipleEntry> entries;
  bool any_violation() const {
    for (const auto& e : entries)
      if (e.violated()) return true;
    return false;
  }
};

/// The four conventional (co)induction principles for a monotone operator.
PrincipleReport check_conventional_principles(const FiniteLattice& l,
                                              const LatticeOperator& op, int m);
/// The four Mendler principles; the operator may be arbitrary.
PrincipleReport check_mendler_principles(const FiniteLattice& l,
                                         const LatticeOperator& op, int m);
/// Monotonization facts for an arbitrary operator (hypothesis-free laws; each
/// entry's hypothesis is `true`).
PrincipleReport check_monotonization_laws(const FiniteLattice& l,
                                          const LatticeOperator& op);

FiniteLattice random_lattice(int size, uint64_t seed);
LatticeOperator random_operator(const FiniteLattice& l, uint64_t seed);
LatticeOperator random_monotone_operator(const FiniteLattice& l, uint64_t seed);

/// Every labeled finite lattice with up to max_size elements (max_size <= 5
/// stays cheap).
std::vector<FiniteLattice> all_lattices_up_to(int max_size);

struct CampaignResult {
  long trials = 0;
  long lattices_checked = 0;
  long checks = 0;
  std::map<std::string, long> per_principle_pass;  // hypothesis held & conclusion held
  std::vector<std::string> counterexamples;
  bool ok() const { return counterexamples.empty(); }
};

/// Randomized trials on lattices up to `max_size` elements plus (optionally)
/// the exhaustive sweep over all lattices of size <= 5 with all operators.
CampaignResult run_campaign(int max_size, long trials, uint64_t seed,
                            bool exhaustive_small);

}  // namespace af2m::lattice
