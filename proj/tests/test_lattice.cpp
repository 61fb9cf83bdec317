#include "doctest.h"

#include <random>
#include <set>
#include <stdexcept>
#include <utility>

#include "af2m/lattice.hpp"

using namespace af2m::lattice;

TEST_CASE("monotonicity checks") {
  FiniteLattice two = chain_lattice(2);
  LatticeOperator identity{0, 1};
  LatticeOperator const_top{1, 1};
  LatticeOperator swap{1, 0};
  CHECK(is_monotone(two, identity));
  CHECK(is_monotone(two, const_top));
  CHECK_FALSE(is_monotone(two, swap));
}

TEST_CASE("fixed points") {
  FiniteLattice four = chain_lattice(4);
  LatticeOperator identity{0, 1, 2, 3};
  CHECK(lfp(four, identity) == four.bot);
  CHECK(gfp(four, identity) == four.top);

  LatticeOperator const_c{2, 2, 2, 2};
  CHECK(lfp(four, const_c) == 2);
  CHECK(gfp(four, const_c) == 2);

  // powerset of {1,2}: F(S) = S u {1}; elements are bitmasks, {1} = 1
  FiniteLattice ps = powerset_lattice(2);
  LatticeOperator add_one(4);
  for (int s = 0; s < 4; ++s) add_one[s] = s | 1;
  CHECK(lfp(ps, add_one) == 1);
  CHECK(gfp(ps, add_one) == 3);

  CHECK(lfp(four, identity) == lfp_iterative(four, identity));
  CHECK(gfp(ps, add_one) == gfp_iterative(ps, add_one));

  LatticeOperator swap2{1, 0};
  FiniteLattice two = chain_lattice(2);
  CHECK_THROWS_AS(lfp(two, swap2), std::invalid_argument);
}

TEST_CASE("monotonizations") {
  FiniteLattice two = chain_lattice(2);
  LatticeOperator swap{1, 0};

  LatticeOperator up = upper_mono(two, swap);
  LatticeOperator lo = lower_mono(two, swap);
  // upper(bottom) joins over {X : X <= bottom} = {bottom}: swap(bottom) = top
  CHECK(up[0] == 1);
  CHECK(up[1] == 1);
  CHECK(lo[0] == 0);
  CHECK(lo[1] == 0);
  CHECK(is_monotone(two, up));
  CHECK(is_monotone(two, lo));

  // sandwich lo <= op <= up pointwise
  for (int m = 0; m < 2; ++m) {
    CHECK(two.le(lo[m], swap[m]));
    CHECK(two.le(swap[m], up[m]));
  }

  // a monotone operator coincides with its monotonizations
  LatticeOperator identity{0, 1};
  CHECK(upper_mono(two, identity) == identity);
  CHECK(lower_mono(two, identity) == identity);

  // pre/post fixed point facts for the arbitrary swap operator
  int mu = lfp(two, up);
  CHECK(mu == 1);  // lfp of constant-top
  CHECK(two.le(swap[mu], mu));
  int nu = gfp(two, lo);
  CHECK(two.le(nu, swap[nu]));
}

TEST_CASE("principles on distinguished M") {
  FiniteLattice ps = powerset_lattice(2);
  LatticeOperator add_one(4);
  for (int s = 0; s < 4; ++s) add_one[s] = s | 1;

  // M = lfp: induction hypothesis and conclusion both hold
  int m = lfp(ps, add_one);
  auto rep = check_conventional_principles(ps, add_one, m);
  for (const auto& e : rep.entries) CHECK_FALSE(e.violated());
  CHECK(rep.entries[0].hypothesis);
  CHECK(rep.entries[0].conclusion);

  // M = top: induction conclusion trivially holds
  auto rep_top = check_conventional_principles(ps, add_one, ps.top);
  CHECK(rep_top.entries[0].conclusion);

  // Mendler principles hold for arbitrary operators; M = top conclusions hold
  FiniteLattice two = chain_lattice(2);
  LatticeOperator swap{1, 0};
  auto mrep = check_mendler_principles(two, swap, two.top);
  for (const auto& e : mrep.entries) CHECK_FALSE(e.violated());

  auto laws = check_monotonization_laws(two, swap);
  for (const auto& e : laws.entries) CHECK_FALSE(e.violated());
}

TEST_CASE("join is derivable from meet") {
  for (uint64_t seed = 1; seed <= 30; ++seed) {
    FiniteLattice l = random_lattice(1 + static_cast<int>(seed % 16), seed);
    std::mt19937_64 rng(seed);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<int> xs;
      int k = static_cast<int>(rng() % 4);
      for (int i = 0; i < k; ++i) xs.push_back(static_cast<int>(rng() % l.n));
      CHECK(l.join(xs) == l.join_via_meet(xs));
    }
  }
}

TEST_CASE("generators") {
  FiniteLattice one = random_lattice(1, 7);
  CHECK(one.n == 1);
  CHECK(one.bot == one.top);

  for (uint64_t s = 1; s <= 20; ++s) {
    FiniteLattice l = random_lattice(4, s);
    CHECK(l.n >= 1);
    CHECK(l.n <= 4);
    FiniteLattice copy = l;
    CHECK_FALSE(validate_lattice(copy).has_value());
  }

  // operator sampling covers all four tables on the 2-chain
  FiniteLattice two = chain_lattice(2);
  std::set<std::pair<int, int>> seen;
  for (uint64_t s = 0; s < 64; ++s) {
    LatticeOperator op = random_operator(two, s);
    seen.insert({op[0], op[1]});
  }
  CHECK(seen.size() == 4);

  // the monotone sampler only produces monotone operators
  for (uint64_t s = 1; s <= 50; ++s) {
    FiniteLattice l = random_lattice(1 + static_cast<int>(s % 8), s * 3 + 1);
    CHECK(is_monotone(l, random_monotone_operator(l, s)));
  }
}

TEST_CASE("exhaustive lattice enumeration counts") {
  // labeled lattices: 1 on one element, 2 chains on two, 6 chains on three,
  // 24 chains + 12 diamonds on four
  auto ls = all_lattices_up_to(4);
  int n1 = 0, n2 = 0, n3 = 0, n4 = 0;
  for (const auto& l : ls) {
    if (l.n == 1) ++n1;
    if (l.n == 2) ++n2;
    if (l.n == 3) ++n3;
    if (l.n == 4) ++n4;
  }
  CHECK(n1 == 1);
  CHECK(n2 == 2);
  CHECK(n3 == 6);
  CHECK(n4 == 36);
}

TEST_CASE("a short randomized campaign finds no counterexamples") {
  auto res = run_campaign(8, 100, 42, /*exhaustive_small=*/false);
  CHECK(res.ok());
  CHECK(res.trials == 100);
  CHECK(res.per_principle_pass.at("mendler-induction") > 0);
}
