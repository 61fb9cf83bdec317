#include "af2m/lattice.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace af2m::lattice {

int FiniteLattice::meet(const std::vector<int>& xs) const {
  int acc = top;
  for (int x : xs) acc = meet2(acc, x);
  return acc;
}

int FiniteLattice::join(const std::vector<int>& xs) const {
  int acc = bot;
  for (int x : xs) acc = join2(acc, x);
  return acc;
}

int FiniteLattice::join_via_meet(const std::vector<int>& xs) const {
  std::vector<int> uppers;
  for (int u = 0; u < n; ++u) {
    bool ub = true;
    for (int x : xs)
      if (!le(x, u)) {
        ub = false;
        break;
      }
    if (ub) uppers.push_back(u);
  }
  return meet(uppers);
}

std::optional<std::string> validate_lattice(FiniteLattice& l) {
  const int n = l.n;
  if (n < 1) return "carrier must be non-empty";
  if (static_cast<int>(l.leq.size()) != n * n) return "order table has wrong size";
  for (int a = 0; a < n; ++a)
    if (!l.le(a, a)) return "order is not reflexive";
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && l.le(a, b) && l.le(b, a)) return "order is not antisymmetric";
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (l.le(a, b))
        for (int c = 0; c < n; ++c)
          if (l.le(b, c) && !l.le(a, c)) return "order is not transitive";

  auto greatest = [&](auto pred) -> int {
    for (int t = 0; t < n; ++t) {
      bool all = true;
      for (int a = 0; a < n; ++a)
        if (pred(a) && !l.le(a, t)) {
          all = false;
          break;
        }
      if (all && pred(t)) return t;
    }
    return -1;
  };
  l.top = greatest([](int) { return true; });
  if (l.top < 0) return "no greatest element";
  for (int b = 0; b < n; ++b) {
    bool least = true;
    for (int a = 0; a < n; ++a)
      if (!l.le(b, a)) {
        least = false;
        break;
      }
    if (least) {
      l.bot = b;
      least = true;
      goto have_bot;
    }
  }
  return "no least element";
have_bot:

  l.meet_tab.assign(n * n, -1);
  l.join_tab.assign(n * n, -1);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      int m = -1;
      for (int c = 0; c < n; ++c) {
        if (!l.le(c, a) || !l.le(c, b)) continue;
        if (m < 0 || l.le(m, c)) m = c;
      }
      // m is a maximal common lower bound; verify it is the greatest
      if (m < 0) return "missing meet";
      for (int c = 0; c < n; ++c)
        if (l.le(c, a) && l.le(c, b) && !l.le(c, m))
          return "pair without a greatest lower bound";
      l.meet_tab[a * n + b] = m;

      int j = -1;
      for (int c = 0; c < n; ++c) {
        if (!l.le(a, c) || !l.le(b, c)) continue;
        if (j < 0 || l.le(c, j)) j = c;
      }
      if (j < 0) return "missing join";
      for (int c = 0; c < n; ++c)
        if (l.le(a, c) && l.le(b, c) && !l.le(j, c))
          return "pair without a least upper bound";
      l.join_tab[a * n + b] = j;
    }
  return std::nullopt;
}

FiniteLattice chain_lattice(int n) {
  FiniteLattice l;
  l.n = n;
  l.leq.assign(n * n, 0);
  for (int a = 0; a < n; ++a)
    for (int b = a; b < n; ++b) l.leq[a * n + b] = 1;
  l.description = "chain(" + std::to_string(n) + ")";
  if (auto err = validate_lattice(l)) throw std::logic_error(*err);
  return l;
}

FiniteLattice powerset_lattice(int k) {
  FiniteLattice l;
  l.n = 1 << k;
  l.leq.assign(l.n * l.n, 0);
  for (int a = 0; a < l.n; ++a)
    for (int b = 0; b < l.n; ++b)
      if ((a & b) == a) l.leq[a * l.n + b] = 1;
  l.description = "powerset(" + std::to_string(k) + ")";
  if (auto err = validate_lattice(l)) throw std::logic_error(*err);
  return l;
}

bool is_monotone(const FiniteLattice& l, const LatticeOperator& op) {
  for (int a = 0; a < l.n; ++a)
    for (int b = 0; b < l.n; ++b)
      if (l.le(a, b) && !l.le(op[a], op[b])) return false;
  return true;
}

int lfp(const FiniteLattice& l, const LatticeOperator& op) {
  if (!is_monotone(l, op))
    throw std::invalid_argument("lfp requires a monotone operator");
  std::vector<int> pre;
  for (int x = 0; x < l.n; ++x)
    if (l.le(op[x], x)) pre.push_back(x);
  return l.meet(pre);
}

int gfp(const FiniteLattice& l, const LatticeOperator& op) {
  if (!is_monotone(l, op))
    throw std::invalid_argument("gfp requires a monotone operator");
  std::vector<int> post;
  for (int x = 0; x < l.n; ++x)
    if (l.le(x, op[x])) post.push_back(x);
  return l.join(post);
}

int lfp_iterative(const FiniteLattice& l, const LatticeOperator& op) {
  int x = l.bot;
  for (int i = 0; i <= l.n; ++i) {
    int next = op[x];
    if (next == x) return x;
    x = next;
  }
  return x;
}

int gfp_iterative(const FiniteLattice& l, const LatticeOperator& op) {
  int x = l.top;
  for (int i = 0; i <= l.n; ++i) {
    int next = op[x];
    if (next == x) return x;
    x = next;
  }
  return x;
}

LatticeOperator upper_mono(const FiniteLattice& l, const LatticeOperator& op) {
  LatticeOperator out(l.n);
  for (int m = 0; m < l.n; ++m) {
    int acc = l.bot;
    for (int x = 0; x < l.n; ++x)
      if (l.le(x, m)) acc = l.join2(acc, op[x]);
    out[m] = acc;
  }
  return out;
}

LatticeOperator lower_mono(const FiniteLattice& l, const LatticeOperator& op) {
  LatticeOperator out(l.n);
  for (int m = 0; m < l.n; ++m) {
    int acc = l.top;
    for (int x = 0; x < l.n; ++x)
      if (l.le(m, x)) acc = l.meet2(acc, op[x]);
    out[m] = acc;
  }
  return out;
}

PrincipleReport check_conventional_principles(const FiniteLattice& l,
                                              const LatticeOperator& op, int m) {
  if (!is_monotone(l, op))
    throw std::invalid_argument("conventional principles require a monotone operator");
  PrincipleReport rep;
  int least = lfp(l, op), greatest = gfp(l, op);
  rep.entries.push_back({"induction", l.le(op[m], m), l.le(least, m)});
  rep.entries.push_back(
      {"extended-induction", l.le(op[l.meet2(least, m)], m), l.le(least, m)});
  rep.entries.push_back({"coinduction", l.le(m, op[m]), l.le(m, greatest)});
  rep.entries.push_back(
      {"extended-coinduction", l.le(m, op[l.join2(greatest, m)]), l.le(m, greatest)});
  return rep;
}

PrincipleReport check_mendler_principles(const FiniteLattice& l,
                                         const LatticeOperator& op, int m) {
  PrincipleReport rep;
  LatticeOperator up = upper_mono(l, op), lo = lower_mono(l, op);
  int mu = lfp(l, up), nu = gfp(l, lo);

  bool hyp_ind = true;
  for (int x = 0; x < l.n; ++x)
    if (l.le(x, m) && !l.le(op[x], m)) {
      hyp_ind = false;
      break;
    }
  rep.entries.push_back({"mendler-induction", hyp_ind, l.le(mu, m)});

  bool hyp_ext_ind = true;
  for (int x = 0; x < l.n; ++x)
    if (l.le(x, mu) && l.le(x, m) && !l.le(op[x], m)) {
      hyp_ext_ind = false;
      break;
    }
  rep.entries.push_back({"mendler-extended-induction", hyp_ext_ind, l.le(mu, m)});

  bool hyp_coind = true;
  for (int x = 0; x < l.n; ++x)
    if (l.le(m, x) && !l.le(m, op[x])) {
      hyp_coind = false;
      break;
    }
  rep.entries.push_back({"mendler-coinduction", hyp_coind, l.le(m, nu)});

  bool hyp_ext_coind = true;
  for (int x = 0; x < l.n; ++x)
    if (l.le(nu, x) && l.le(m, x) && !l.le(m, op[x])) {
      hyp_ext_coind = false;
      break;
    }
  rep.entries.push_back({"mendler-extended-coinduction", hyp_ext_coind, l.le(m, nu)});
  return rep;
}

PrincipleReport check_monotonization_laws(const FiniteLattice& l,
                                          const LatticeOperator& op) {
  PrincipleReport rep;
  LatticeOperator up = upper_mono(l, op), lo = lower_mono(l, op);
  rep.entries.push_back({"upper-mono-monotone", true, is_monotone(l, up)});
  rep.entries.push_back({"lower-mono-monotone", true, is_monotone(l, lo)});

  bool sandwich = true;
  for (int m = 0; m < l.n; ++m)
    if (!l.le(lo[m], op[m]) || !l.le(op[m], up[m])) {
      sandwich = false;
      break;
    }
  rep.entries.push_back({"sandwich", true, sandwich});

  bool mono = is_monotone(l, op);
  bool coincide_all = up == op && lo == op;
  rep.entries.push_back({"monotone-implies-coincide", mono, coincide_all});
  rep.entries.push_back({"lower-coincide-implies-monotone", lo == op, mono});
  rep.entries.push_back({"upper-coincide-implies-monotone", up == op, mono});

  int mu = lfp(l, up), nu = gfp(l, lo);
  rep.entries.push_back({"prefixed-point-of-upper-lfp", true, l.le(op[mu], mu)});
  rep.entries.push_back({"postfixed-point-of-lower-gfp", true, l.le(nu, op[nu])});
  return rep;
}

// ---------------------------------------------------------------------------
// Generators
// ---------------------------------------------------------------------------

FiniteLattice random_lattice(int size, uint64_t seed) {
  if (size < 1) throw std::invalid_argument("size must be >= 1");
  std::mt19937_64 rng(seed * 0x9e3779b97f4a7c15ull + 12345);
  if (size == 1) return chain_lattice(1);
  int kind = static_cast<int>(rng() % 3);
  if (kind == 0) return chain_lattice(size);
  if (kind == 1) {
    int k = 0;
    while ((2 << k) <= size) ++k;  // largest power of two <= size
    if ((1 << k) > size) --k;
    if (k >= 1 && (1 << k) >= 2) return powerset_lattice(k);
    return chain_lattice(size);
  }
  // intersection-closed family of subsets of a small base set
  int base = 5;
  std::vector<uint32_t> family{(1u << base) - 1};
  for (int attempts = 0; attempts < 64 && static_cast<int>(family.size()) < size;
       ++attempts) {
    uint32_t s = static_cast<uint32_t>(rng()) & ((1u << base) - 1);
    std::vector<uint32_t> added{s};
    for (uint32_t f : family) added.push_back(f & s);
    std::vector<uint32_t> next = family;
    for (uint32_t a : added)
      if (std::find(next.begin(), next.end(), a) == next.end()) next.push_back(a);
    if (static_cast<int>(next.size()) <= size) family = std::move(next);
  }
  FiniteLattice l;
  l.n = static_cast<int>(family.size());
  l.leq.assign(l.n * l.n, 0);
  for (int a = 0; a < l.n; ++a)
    for (int b = 0; b < l.n; ++b)
      if ((family[a] & family[b]) == family[a]) l.leq[a * l.n + b] = 1;
  l.description = "subsets(" + std::to_string(l.n) + ")";
  if (auto err = validate_lattice(l)) throw std::logic_error(*err);
  return l;
}

LatticeOperator random_operator(const FiniteLattice& l, uint64_t seed) {
  std::mt19937_64 rng(seed * 0x2545f4914f6cdd1dull + 99);
  LatticeOperator op(l.n);
  for (int i = 0; i < l.n; ++i) op[i] = static_cast<int>(rng() % l.n);
  return op;
}

LatticeOperator random_monotone_operator(const FiniteLattice& l, uint64_t seed) {
  std::mt19937_64 rng(seed * 0xda942042e4dd58b5ull + 7);
  // linear extension: sort by number of elements below
  std::vector<int> order(l.n);
  for (int i = 0; i < l.n; ++i) order[i] = i;
  auto below = [&](int x) {
    int c = 0;
    for (int a = 0; a < l.n; ++a)
      if (l.le(a, x)) ++c;
    return c;
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return below(a) < below(b); });
  LatticeOperator op(l.n, -1);
  for (int x : order) {
    int lowbound = l.bot;
    for (int y = 0; y < l.n; ++y)
      if (y != x && op[y] >= 0 && l.le(y, x)) lowbound = l.join2(lowbound, op[y]);
    std::vector<int> candidates;
    for (int c = 0; c < l.n; ++c)
      if (l.le(lowbound, c)) candidates.push_back(c);
    op[x] = candidates[rng() % candidates.size()];
  }
  return op;
}

std::vector<FiniteLattice> all_lattices_up_to(int max_size) {
  std::vector<FiniteLattice> out;
  for (int n = 1; n <= max_size; ++n) {
    int pairs = n * (n - 1) / 2;
    long combos = 1;
    for (int i = 0; i < pairs; ++i) combos *= 3;
    for (long code = 0; code < combos; ++code) {
      FiniteLattice l;
      l.n = n;
      l.leq.assign(n * n, 0);
      for (int a = 0; a < n; ++a) l.leq[a * n + a] = 1;
      long c = code;
      bool bad = false;
      for (int a = 0; a < n && !bad; ++a)
        for (int b = a + 1; b < n && !bad; ++b) {
          int choice = static_cast<int>(c % 3);
          c /= 3;
          if (choice == 1) l.leq[a * n + b] = 1;
          if (choice == 2) l.leq[b * n + a] = 1;
        }
      // transitivity must already hold (we enumerate relations, not closures)
      for (int a = 0; a < n && !bad; ++a)
        for (int b = 0; b < n && !bad; ++b)
          if (l.le(a, b))
            for (int d = 0; d < n; ++d)
              if (l.le(b, d) && !l.le(a, d)) {
                bad = true;
                break;
              }
      if (bad) continue;
      FiniteLattice copy = l;
      if (validate_lattice(copy)) continue;  // not a lattice
      copy.description = "exhaustive(n=" + std::to_string(n) + ",code=" +
                         std::to_string(code) + ")";
      out.push_back(std::move(copy));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Campaign
// ---------------------------------------------------------------------------

namespace {

void record(CampaignResult& res, const FiniteLattice& l, const LatticeOperator& op,
            int m, const PrincipleReport& rep) {
  ++res.checks;
  for (const auto& e : rep.entries) {
    if (e.hypothesis && e.conclusion) ++res.per_principle_pass[e.name];
    if (e.violated() && res.counterexamples.size() < 10) {
      std::string cx = "principle '" + e.name + "' violated on " + l.description +
                       " with operator [";
      for (size_t i = 0; i < op.size(); ++i)
        cx += (i ? "," : "") + std::to_string(op[i]);
      cx += "] at M=" + std::to_string(m);
      res.counterexamples.push_back(std::move(cx));
    }
  }
}

void check_all_for(CampaignResult& res, const FiniteLattice& l,
                   const LatticeOperator& op, int m) {
  record(res, l, op, m, check_mendler_principles(l, op, m));
  if (m == 0) record(res, l, op, 0, check_monotonization_laws(l, op));
  if (is_monotone(l, op))
    record(res, l, op, m, check_conventional_principles(l, op, m));
}

}  // namespace

CampaignResult run_campaign(int max_size, long trials, uint64_t seed,
                            bool exhaustive_small) {
  CampaignResult res;
  if (exhaustive_small) {
    auto lattices = all_lattices_up_to(5);
    for (const auto& l : lattices) {
      ++res.lattices_checked;
      long ops = 1;
      for (int i = 0; i < l.n; ++i) ops *= l.n;
      LatticeOperator op(l.n, 0);
      for (long code = 0; code < ops; ++code) {
        long c = code;
        for (int i = 0; i < l.n; ++i) {
          op[i] = static_cast<int>(c % l.n);
          c /= l.n;
        }
        for (int m = 0; m < l.n; ++m) check_all_for(res, l, op, m);
      }
    }
  }
  std::mt19937_64 rng(seed);
  for (long t = 0; t < trials; ++t) {
    ++res.trials;
    int size = 1 + static_cast<int>(rng() % static_cast<uint64_t>(max_size));
    FiniteLattice l = random_lattice(size, rng());
    ++res.lattices_checked;
    LatticeOperator op = random_operator(l, rng());
    int m = static_cast<int>(rng() % static_cast<uint64_t>(l.n));
    record(res, l, op, m, check_mendler_principles(l, op, m));
    record(res, l, op, m, check_monotonization_laws(l, op));
    if (is_monotone(l, op))
      record(res, l, op, m, check_conventional_principles(l, op, m));
    LatticeOperator mop = random_monotone_operator(l, rng());
    record(res, l, mop, m, check_conventional_principles(l, mop, m));
    record(res, l, mop, m, check_monotonization_laws(l, mop));
    record(res, l, mop, m, check_mendler_principles(l, mop, m));
    // fixed-point computations must agree on monotone operators
    if (lfp(l, mop) != lfp_iterative(l, mop) || gfp(l, mop) != gfp_iterative(l, mop)) {
      res.counterexamples.push_back(
          "Knaster-Tarski and iterative fixed points disagree on " + l.description);
    }
  }
  return res;
}

}  // namespace af2m::lattice
