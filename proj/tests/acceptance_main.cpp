// Acceptance suite: one pass/fail line per criterion, exit 0 iff all pass.
// Usage: af2m_acceptance <corpus-dir>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "af2m/driver.hpp"
#include "af2m/lattice.hpp"
#include "af2m/reduction.hpp"
#include "test_util.hpp"

using namespace af2m;

namespace {

struct Harness {
  int failures = 0;
  std::map<std::string, CheckedFile> files;

  void verdict(int n, const std::string& what, bool ok, const std::string& detail = "") {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion-" << n << ": " << what;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    std::cout << "\n";
    if (!ok) ++failures;
  }

  const CheckedFile& file(const std::string& name) { return files.at(name); }

  TermRef term(const std::string& fname, const std::string& ref) {
    TermRef t = resolve_term(file(fname), ref);
    if (!t) throw std::runtime_error("missing term " + fname + ":" + ref);
    return t;
  }
  const CheckResult& result(const std::string& fname, const std::string& thm) {
    return file(fname).results.at(thm);
  }
};

double secs_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

TermRef V(const std::string& n) { return ProofTerm::var(n); }
TermRef A(TermRef f, TermRef x) { return ProofTerm::app(std::move(f), std::move(x)); }

ObjTerm ov(const std::string& n) { return ObjTerm::var(n); }
ObjTerm oa(const std::string& f, std::vector<ObjTerm> args = {}) {
  return ObjTerm::app(f, std::move(args));
}

}  // namespace

int main(int argc, char** argv) {
  std::string corpus_dir = argc > 1 ? argv[1] : "corpus";
  Harness h;
  DriverOptions opts;

  // ------------------------------------------------------------------
  // Criterion 1: every derivation from the example corpus checks.
  // ------------------------------------------------------------------
  {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<std::string> paths;
    for (const auto& entry : std::filesystem::directory_iterator(corpus_dir))
      if (entry.path().extension() == ".af2") paths.push_back(entry.path().string());
    std::sort(paths.begin(), paths.end());
    bool all_ok = !paths.empty();
    long thms = 0;
    std::map<std::string, long> coverage;
    for (const auto& p : paths) {
      CheckedFile cf = check_file(p, opts);
      if (!cf.ok) {
        all_ok = false;
        for (const auto& item : cf.items)
          if (!item.ok)
            std::cout << "  [corpus] " << item.file << ":" << item.name << " "
                      << item.status << " " << item.detail << "\n";
      }
      thms += static_cast<long>(cf.results.size());
      for (const auto& [k, v] : cf.rule_coverage) coverage[k] += v;
      h.files[std::filesystem::path(p).filename().string()] = std::move(cf);
    }
    const std::vector<std::string> required = {
        "ex1_nat_adhoc.af2:zero_nat",  "ex1_nat_adhoc.af2:suc_nat",
        "ex1_nat_adhoc.af2:sum_total", "ex1_nat_adhoc.af2:fac_total",
        "ex2_nat_equi.af2:zero_e",     "ex2_nat_equi.af2:pred_e",
        "ex2_nat_equi.af2:g_total",    "ex3_nat_iso.af2:zero_i",
        "ex3_nat_iso.af2:suc_i",       "ex3_nat_iso.af2:sum_i",
        "ex3_nat_iso.af2:fac_i",       "ex3_nat_iso.af2:pred_i",
        "ex4_conat.af2:zero_conat",    "ex4_conat.af2:suc_conat",
        "ex4_conat.af2:omega_dag",     "ex4_conat.af2:omega_conat",
        "ex5_streams.af2:head_total",  "ex5_streams.af2:tail_total",
        "ex5_streams.af2:from_total",  "ex5_streams.af2:cons_total",
        "ex5_streams.af2:map_total",   "ex5_streams.af2:maphd_total",
        "ex6_order.af2:l_zero",        "ex6_order.af2:l_suc",
        "ex7_obseq.af2:e_heads",       "ex7_obseq.af2:e_tails",
        "ex7_obseq.af2:e_corec"};
    for (const auto& rq : required) {
      auto colon = rq.find(':');
      const auto& cf = h.files.at(rq.substr(0, colon));
      auto it = cf.results.find(rq.substr(colon + 1));
      if (it == cf.results.end() || !it->second.ok()) {
        all_ok = false;
        std::cout << "  [corpus] required judgment missing or failed: " << rq << "\n";
      }
    }
    const std::vector<std::string> all_rules = {
        "var",    "arrow_i", "arrow_e", "all_i",  "all_e",   "all2_i",
        "all2_e", "eq",      "eq_ax",   "mu_i",   "nu_e",    "mu_e",
        "nu_i",   "mu_it",   "nu_coit", "and_i",  "and_e_l", "and_e_r",
        "or_i_l", "or_i_r",  "or_e",    "ex_i",   "ex_e",    "restrict_i",
        "restrict_e"};
    std::string uncovered;
    for (const auto& r : all_rules)
      if (coverage[r] < 1) uncovered += r + " ";
    if (!uncovered.empty()) {
      all_ok = false;
      std::cout << "  [corpus] rules never exercised: " << uncovered << "\n";
    }
    double dt = secs_since(t0);
    h.verdict(1, "corpus check: every example derivation accepted",
              all_ok && dt < 5.0,
              std::to_string(thms) + " judgments, rule coverage complete, " +
                  std::to_string(dt) + "s");
  }

  // ------------------------------------------------------------------
  // Criterion 2: golden reductions, exact normal form modulo alpha.
  // ------------------------------------------------------------------
  {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    long count = 0;
    auto golden = [&](const std::string& what, TermRef lhs, TermRef rhs) {
      ++count;
      auto nl = normalize(lhs, opts.fuel);
      auto nr = normalize(rhs, opts.fuel);
      if (nl.fuel_exhausted || nr.fuel_exhausted || !term_alpha_eq(nl.term, nr.term)) {
        ok = false;
        std::cout << "  [golden] " << what << ": " << show_proof_term(nl.term)
                  << " vs " << show_proof_term(nr.term) << "\n";
      }
    };
    try {
      const std::string e1 = "ex1_nat_adhoc.af2", e2 = "ex2_nat_equi.af2",
                        e4 = "ex4_conat.af2", e5 = "ex5_streams.af2";
      golden("sum n 0 ->* n",
             A(A(h.term(e1, "sum_total"), V("hn")), h.term(e1, "zero_nat_id")),
             V("hn"));
      golden("sum n (suc m) ->* suc (sum n m)",
             A(A(h.term(e1, "sum_total"), V("hn")), A(h.term(e1, "suc_nat"), V("hm"))),
             A(h.term(e1, "suc_nat"),
               A(A(h.term(e1, "sum_total"), V("hn")), V("hm"))));
      golden("head (from x) ->* x",
             A(h.term(e5, "head_total"), A(h.term(e5, "from_total"), V("hx"))),
             V("hx"));
      golden("tail (from x) ->* from (suc x)",
             A(h.term(e5, "tail_total"), A(h.term(e5, "from_total"), V("hx"))),
             A(h.term(e5, "from_total"), A(h.term(e5, "suc_nat"), V("hx"))));
      golden("pred 0 ->* inl unit", ProofTerm::out(h.term(e4, "zero_conat")),
             ProofTerm::inl(ProofTerm::unit()));
      golden("pred (suc n) ->* inr n",
             ProofTerm::out(A(h.term(e4, "suc_conat"), V("hn"))),
             ProofTerm::inr(V("hn")));
      golden("g 0 ->* f0 unit", A(h.term(e2, "g_total"), h.term(e2, "zero_e")),
             A(V("f0"), ProofTerm::unit()));
      golden("g (p n) ->* fp (g n)",
             A(h.term(e2, "g_total"), A(h.term(e2, "pred_e"), V("hn"))),
             A(V("fp"), A(h.term(e2, "g_total"), V("hn"))));
      golden("MIt s (in t) ->* s (MIt s) t",
             ProofTerm::mit(V("s"), ProofTerm::in(V("t"))),
             A(A(V("s"), ProofTerm::partial(TermKind::MIt, V("s"))), V("t")));
      golden("out (MCoIt s t) ->* s (MCoIt s) t",
             ProofTerm::out(ProofTerm::mcoit(V("s"), V("t"))),
             A(A(V("s"), ProofTerm::partial(TermKind::MCoIt, V("s"))), V("t")));
    } catch (const std::exception& ex) {
      ok = false;
      std::cout << "  [golden] " << ex.what() << "\n";
    }
    double dt = secs_since(t0);
    h.verdict(2, "golden reductions match exactly modulo alpha", ok && dt < 1.0,
              std::to_string(count) + " traces, " + std::to_string(dt) + "s");
  }

  // ------------------------------------------------------------------
  // Criterion 3: strong normalization at desk scale.
  // ------------------------------------------------------------------
  {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    long total = 0, certified = 0;
    for (const auto& [fname, cf] : h.files) {
      for (const auto& [tname, res] : cf.results) {
        if (!res.ok()) continue;
        TermRef t = res.judgment->term;
        ++total;
        auto nr = normalize(t, 100000);
        if (nr.fuel_exhausted) {
          ok = false;
          std::cout << "  [sn] normalize ran out of fuel: " << fname << ":" << tname
                    << "\n";
        }
        auto oracle = sn_oracle(t, opts.oracle_budget);
        if (oracle.verdict != SNVerdict::SN) {
          ok = false;
          std::cout << "  [sn] oracle verdict not SN: " << fname << ":" << tname << "\n";
        }
        if (sn_certify(t, 200000).derivation) ++certified;
      }
    }
    double rate = total ? static_cast<double>(certified) / total : 0.0;
    if (rate < 0.95) {
      ok = false;
      std::cout << "  [sn] certifier rate " << rate << " below 0.95\n";
    }
    // randomized well-typed suite of size <= 10: certification must be total
    testutil::Gen g(2026);
    int typed_total = 300, typed_ok = 0;
    for (int i = 0; i < typed_total; ++i) {
      TermRef t = g.typed_term(10);
      if (sn_certify(t, 200000).derivation &&
          sn_oracle(t, 200000).verdict == SNVerdict::SN)
        ++typed_ok;
    }
    if (typed_ok != typed_total) {
      ok = false;
      std::cout << "  [sn] typed suite: " << typed_ok << "/" << typed_total << "\n";
    }
    double dt = secs_since(t0);
    h.verdict(3, "strong normalization at desk scale", ok && dt < 60.0,
              std::to_string(total) + " corpus terms, certifier " +
                  std::to_string(certified) + "/" + std::to_string(total) +
                  ", typed suite " + std::to_string(typed_ok) + "/" +
                  std::to_string(typed_total) + ", " + std::to_string(dt) + "s");
  }

  // ------------------------------------------------------------------
  // Criterion 4: negative control around Omega.
  // ------------------------------------------------------------------
  {
    bool ok = true;
    auto w = ProofTerm::lam("x", A(V("x"), V("x")));
    auto omega = A(w, w);
    auto oracle = sn_oracle(omega, 10000);
    if (oracle.verdict != SNVerdict::NonSN || oracle.witness.empty()) {
      ok = false;
      std::cout << "  [omega] oracle failed to find the cycle\n";
    } else {
      bool cycles = false;
      for (size_t i = 0; i + 1 < oracle.witness.size(); ++i)
        if (term_alpha_eq(oracle.witness[i], oracle.witness.back())) cycles = true;
      if (!cycles) {
        ok = false;
        std::cout << "  [omega] witness path does not close a cycle\n";
      }
    }
    if (sn_certify(omega, 5000).derivation) {
      ok = false;
      std::cout << "  [omega] certifier accepted Omega\n";
    }
    // typing attempts: a self-application needs one variable at two different
    // formulas, which the context merge refuses
    const char* attempts[] = {
        R"(pred P/0;
thm omega_attempt : P {
  1. var x : P -> P;
  2. var x : P;
  3. arrow_e 1 2;
  4. arrow_i 3 x;
  5. var y : P -> P;
  6. arrow_e 4 5;
})",
        R"(sig star/0, suc/1, 0/0;
let Unit := {x => x = star};
mu Nat/1 := X => {x => Unit(x) \/ X(x)} ctors [suc];
thm omega_attempt : Nat(0) {
  1. var x : Nat(0) -> Nat(0);
  2. var x : Nat(0);
  3. arrow_e 1 2;
})"};
    for (const char* src : attempts) {
      SourceFile f = parse_source(src, "<attempt>");
      bool accepted = f.ok();
      if (accepted)
        for (const auto& thm : f.thms)
          accepted = accepted && check_script(thm.script).ok();
      if (accepted) {
        ok = false;
        std::cout << "  [omega] a self-application typing was accepted\n";
      }
    }
    h.verdict(4, "Omega is rejected and reported non-SN with a cycle", ok);
  }

  // ------------------------------------------------------------------
  // Criterion 5: empirical subject reduction along the golden traces.
  // ------------------------------------------------------------------
  {
    bool ok = true;
    struct Pair {
      std::string file, redex, nf;
      std::vector<std::string> intermediates;
    };
    const std::vector<Pair> pairs = {
        {"ex1_nat_adhoc.af2", "golden_sum_zero_redex", "golden_sum_zero_nf", {}},
        {"ex1_nat_adhoc.af2", "golden_sum_suc_redex", "golden_sum_suc_nf", {}},
        {"ex2_nat_equi.af2", "golden_g_zero_redex", "golden_g_zero_nf",
         {"golden_g_zero_t1", "golden_g_zero_t2"}},
        {"ex4_conat.af2", "golden_pred_zero_redex", "golden_pred_zero_nf", {}},
        {"ex4_conat.af2", "golden_pred_suc_redex", "golden_pred_suc_nf", {}},
        {"ex5_streams.af2", "golden_head_from_redex", "golden_head_from_nf", {}},
        {"ex5_streams.af2", "golden_tail_from_redex", "golden_tail_from_nf", {}},
    };
    for (const auto& p : pairs) {
      try {
        const CheckResult& r = h.result(p.file, p.redex);
        const CheckResult& n = h.result(p.file, p.nf);
        if (!r.ok() || !n.ok()) throw std::runtime_error("pair did not check");
        if (!alpha_eq(r.judgment->formula, n.judgment->formula))
          throw std::runtime_error("redex and normal form differ in formula");
        auto nr = normalize(r.judgment->term, opts.fuel);
        if (!term_alpha_eq(nr.term, n.judgment->term))
          throw std::runtime_error("normal form is not the re-checked term");
        // step-by-step coverage: which trace states carry a re-checked script
        size_t states = nr.trace.size() + 1;  // including the start
        size_t covered = 2;                   // start and final form
        for (const auto& iname : p.intermediates) {
          const CheckResult& ij = h.result(p.file, iname);
          if (!ij.ok() || !alpha_eq(ij.judgment->formula, r.judgment->formula)) continue;
          for (const auto& st : nr.trace)
            if (term_alpha_eq(st.result, ij.judgment->term)) {
              ++covered;
              break;
            }
        }
        std::cout << "  [sr] " << p.file << ":" << p.redex << " step coverage "
                  << covered << "/" << states << "\n";
      } catch (const std::exception& ex) {
        ok = false;
        std::cout << "  [sr] " << p.file << ":" << p.redex << " " << ex.what() << "\n";
      }
    }
    h.verdict(5, "final normal forms re-check at the original formulas", ok,
              std::to_string(pairs.size()) + " golden traces");
  }

  // ------------------------------------------------------------------
  // Criterion 6: the lattice campaign.
  // ------------------------------------------------------------------
  {
    auto t0 = std::chrono::steady_clock::now();
    auto res = lattice::run_campaign(32, 1000, opts.seed, /*exhaustive_small=*/true);
    for (const auto& cx : res.counterexamples) std::cout << "  [lattice] " << cx << "\n";
    double dt = secs_since(t0);
    h.verdict(6, "no counterexamples to the fixed-point principles",
              res.ok() && dt < 120.0,
              std::to_string(res.trials) + " trials, " +
                  std::to_string(res.lattices_checked) + " lattices, " +
                  std::to_string(res.checks) + " checks, " + std::to_string(dt) + "s");
  }

  // ------------------------------------------------------------------
  // Criterion 7: certifier soundness on generated terms.
  // ------------------------------------------------------------------
  {
    testutil::Gen g(4242);
    bool ok = true;
    int certified = 0;
    for (int i = 0; i < 500; ++i) {
      TermRef t = (i % 2 == 0) ? g.proof(12) : g.typed_term(8);
      if (!sn_certify(t, 50000).derivation) continue;
      ++certified;
      if (sn_oracle(t, 200000).verdict != SNVerdict::SN) {
        ok = false;
        std::cout << "  [cert] unsound certification: " << show_proof_term(t) << "\n";
      }
    }
    h.verdict(7, "certifier success implies the oracle's SN verdict", ok,
              std::to_string(certified) + "/500 certified, zero violations");
  }

  // ------------------------------------------------------------------
  // Criterion 8: the corpus equation sets derive and replay.
  // ------------------------------------------------------------------
  {
    auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    long count = 0;
    auto derivation = [&](const char* fname, const char* set, const ObjTerm& l,
                          const ObjTerm& r) {
      ++count;
      const EquationSet* eqs = h.file(fname).source.find_eqset(set);
      if (!eqs) {
        ok = false;
        std::cout << "  [eq] missing set " << set << "\n";
        return;
      }
      auto d = derive_eq(*eqs, l, r);
      if (d.status != DeriveStatus::Derived) {
        ok = false;
        std::cout << "  [eq] not derived: " << set << " |> " << show_term(l) << " = "
                  << show_term(r) << "\n";
        return;
      }
      auto rep = replay_evidence(*eqs, *d.evidence);
      if (std::holds_alternative<ReplayError>(rep) || !(std::get<0>(rep).first == l) ||
          !(std::get<0>(rep).second == r)) {
        ok = false;
        std::cout << "  [eq] replay mismatch: " << set << "\n";
      }
    };
    // E_sum and E_fac
    derivation("ex1_nat_adhoc.af2", "sum_eqs", oa("sum", {ov("n"), oa("0")}), ov("n"));
    derivation("ex1_nat_adhoc.af2", "sum_eqs",
               oa("sum", {ov("n"), oa("suc", {ov("m")})}),
               oa("suc", {oa("sum", {ov("n"), ov("m")})}));
    derivation("ex1_nat_adhoc.af2", "fac_eqs", oa("fac", {oa("0")}), oa("1"));
    derivation("ex1_nat_adhoc.af2", "fac_eqs", oa("fac", {oa("suc", {ov("n")})}),
               oa("mult", {oa("suc", {ov("n")}), oa("fac", {ov("n")})}));
    // E_pred
    derivation("ex3_nat_iso.af2", "ipred", oa("prd", {oa("0")}), oa("lf", {oa("star")}));
    derivation("ex3_nat_iso.af2", "ipred", oa("prd", {oa("suc", {ov("n")})}),
               oa("rg", {ov("n")}));
    // E_z, E_suc, E_omega
    derivation("ex4_conat.af2", "ez", oa("prd", {oa("z", {oa("star")})}), oa("star"));
    derivation("ex4_conat.af2", "ez", oa("0"), oa("z", {oa("star")}));
    derivation("ex4_conat.af2", "esuc", oa("prd", {oa("suc", {ov("x")})}), ov("x"));
    derivation("ex4_conat.af2", "eomg", oa("omg"), oa("omgd", {oa("star")}));
    derivation("ex4_conat.af2", "eomg", oa("prd", {oa("omgd", {ov("x")})}),
               oa("omgd", {ov("x")}));
    // E_from, E_cons, E_map, E_maphd
    derivation("ex5_streams.af2", "efrom", oa("head", {oa("from", {ov("x")})}), ov("x"));
    derivation("ex5_streams.af2", "efrom", oa("tail", {oa("from", {ov("x")})}),
               oa("from", {oa("suc", {ov("x")})}));
    derivation("ex5_streams.af2", "econs", oa("head", {oa("cons", {ov("x"), ov("y")})}),
               ov("x"));
    derivation("ex5_streams.af2", "econs", oa("tail", {oa("cons", {ov("x"), ov("y")})}),
               ov("y"));
    derivation("ex5_streams.af2", "emap", oa("head", {oa("mapf", {ov("l")})}),
               oa("f", {oa("head", {ov("l")})}));
    derivation("ex5_streams.af2", "emap", oa("tail", {oa("mapf", {ov("l")})}),
               oa("mapf", {oa("tail", {ov("l")})}));
    derivation("ex5_streams.af2", "emaphd", oa("head", {oa("maphdf", {ov("l")})}),
               oa("f", {oa("head", {ov("l")})}));
    derivation("ex5_streams.af2", "emaphd", oa("tail", {oa("maphdf", {ov("l")})}),
               oa("tail", {ov("l")}));
    double dt = secs_since(t0);
    h.verdict(8, "corpus equation sets derive and replay", ok && dt < 1.0,
              std::to_string(count) + " derivations, " + std::to_string(dt) + "s");
  }

  std::cout << (h.failures == 0 ? "ALL CRITERIA PASSED" : "FAILURES PRESENT") << "\n";
  return h.failures == 0 ? 0 : 1;
}
