#include "af2m/driver.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <future>
#include <ostream>
#include <sstream>

#include "json.hpp"

#include "af2m/lattice.hpp"

namespace af2m {

namespace {

double ms_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

TermRef resolve_against(const std::map<std::string, TermRef>& env, TermRef t) {
  for (const auto& v : term_free_vars(t)) {
    auto it = env.find(v);
    if (it != env.end()) t = term_subst(t, v, it->second);
  }
  return t;
}

}  // namespace

void Report::add(ReportItem item) {
  if (!item.ok) exit_code = 1;
  items.push_back(std::move(item));
}

std::string Report::to_json(const DriverOptions& opts) const {
  nlohmann::json j;
  j["schema"] = "af2m-report/1";
  j["command"] = command;
  j["fuel"] = opts.fuel;
  j["seed"] = opts.seed;
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& it : items) {
    nlohmann::json rec;
    rec["file"] = it.file;
    rec["name"] = it.name;
    rec["kind"] = it.kind;
    rec["status"] = it.status;
    if (!it.detail.empty()) rec["detail"] = it.detail;
    if (!it.judgment.empty()) rec["judgment"] = it.judgment;
    rec["time_ms"] = it.time_ms;
    rec["ok"] = it.ok;
    arr.push_back(std::move(rec));
  }
  j["items"] = std::move(arr);
  j["rule_coverage"] = rule_coverage;
  for (const auto& [k, v] : extras) j[k] = v;
  long failed = 0;
  for (const auto& it : items)
    if (!it.ok) ++failed;
  j["summary"] = {{"total", items.size()}, {"failed", failed}};
  return j.dump(2);
}

void Report::print(std::ostream& os) const {
  for (const auto& it : items) {
    os << (it.ok ? "  ok  " : " FAIL ") << "[" << it.kind << "] ";
    if (!it.file.empty()) os << it.file << ":";
    os << it.name;
    if (!it.status.empty()) os << "  " << it.status;
    if (!it.detail.empty()) os << "  -- " << it.detail;
    os << "\n";
  }
  long failed = 0;
  for (const auto& it : items)
    if (!it.ok) ++failed;
  os << items.size() << " item(s), " << failed << " failure(s)\n";
}

CheckedFile check_source(SourceFile source, const DriverOptions& opts) {
  CheckedFile out;
  out.source = std::move(source);
  const SourceFile& f = out.source;

  for (const auto& d : f.diagnostics) {
    out.items.push_back({d.file, "line " + std::to_string(d.line), "parse",
                         "error", d.message, "", 0, false});
    out.ok = false;
  }

  for (const auto& thm : f.thms) {
    auto t0 = std::chrono::steady_clock::now();
    CheckResult res = check_script(thm.script, &out.lemmas);
    ReportItem item{f.filename, thm.name, "thm", "checked", "", "", 0, true};
    if (res.ok()) {
      out.lemmas.lemmas[thm.name] = {*res.judgment, thm.script.eqs};
      out.term_env[thm.name] = res.judgment->term;
      for (const auto& [k, v] : res.rule_uses) out.rule_coverage[k] += v;
      item.judgment = show_judgment(*res.judgment, thm.script.sig.get());
    } else {
      item.ok = false;
      item.status = "failed";
      const CheckError& e = res.errors.front();
      item.detail = "step " + std::to_string(e.step) + " (" + e.rule + "): " + e.message;
      out.ok = false;
    }
    item.time_ms = ms_since(t0);
    out.results.emplace(thm.name, std::move(res));
    out.items.push_back(std::move(item));
  }

  for (const auto& td : f.terms) {
    if (out.term_env.count(td.name)) {
      out.items.push_back({f.filename, td.name, "term", "error",
                           "name already used by a theorem or term", "", 0, false});
      out.ok = false;
      continue;
    }
    out.term_env[td.name] = resolve_against(out.term_env, td.term);
  }

  long expect_index = 0;
  for (const auto& ed : f.expects) {
    ++expect_index;
    auto t0 = std::chrono::steady_clock::now();
    TermRef lhs = resolve_against(out.term_env, ed.lhs);
    TermRef rhs = resolve_against(out.term_env, ed.rhs);
    long fuel = ed.fuel > 0 ? ed.fuel : opts.fuel;
    NormalizeTermResult nl = normalize(lhs, fuel);
    NormalizeTermResult nr = normalize(rhs, fuel);
    ReportItem item{f.filename,
                    "expect#" + std::to_string(expect_index) + " (line " +
                        std::to_string(ed.line) + ")",
                    "expect", "reduced", "", "", 0, true};
    if (nl.fuel_exhausted || nr.fuel_exhausted) {
      item.ok = false;
      item.status = "fuel-exhausted";
      out.ok = false;
    } else if (!term_alpha_eq(nl.term, nr.term)) {
      item.ok = false;
      item.status = "mismatch";
      item.detail = "lhs normalizes to " + show_proof_term(nl.term) +
                    "; rhs normalizes to " + show_proof_term(nr.term);
      out.ok = false;
    } else {
      item.detail = std::to_string(nl.trace.size()) + " step(s) to " +
                    show_proof_term(nl.term);
    }
    item.time_ms = ms_since(t0);
    out.items.push_back(std::move(item));
  }
  return out;
}

CheckedFile check_file(const std::string& path, const DriverOptions& opts) {
  std::ifstream in(path);
  if (!in) {
    CheckedFile out;
    out.ok = false;
    out.items.push_back({path, "", "io", "error", "cannot open file", "", 0, false});
    return out;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return check_source(parse_source(ss.str(), path), opts);
}

TermRef resolve_term(const CheckedFile& f, const std::string& name) {
  auto it = f.term_env.find(name);
  return it == f.term_env.end() ? nullptr : it->second;
}

Report run_check(const std::vector<std::string>& paths, const DriverOptions& opts) {
  Report rep;
  rep.command = "check";
  // files are independent; check them concurrently, report in input order
  std::vector<std::future<CheckedFile>> futures;
  futures.reserve(paths.size());
  for (const auto& p : paths)
    futures.push_back(std::async(std::launch::async,
                                 [&opts, p] { return check_file(p, opts); }));
  for (auto& fu : futures) {
    CheckedFile cf = fu.get();
    bool unusable = !cf.source.diagnostics.empty();
    for (auto& it : cf.items) {
      if (it.kind == "io") unusable = true;
      rep.add(std::move(it));
    }
    for (const auto& [k, v] : cf.rule_coverage) rep.rule_coverage[k] += v;
    if (unusable) rep.exit_code = 2;
  }
  return rep;
}

Report run_eval(const std::string& path, const std::string& term_ref,
                const DriverOptions& opts) {
  Report rep;
  rep.command = "eval";
  CheckedFile cf = check_file(path, opts);
  for (auto& it : cf.items)
    if (!it.ok) rep.add(std::move(it));
  if (!cf.source.diagnostics.empty()) {
    rep.exit_code = 2;
    return rep;
  }
  TermRef t = resolve_term(cf, term_ref);
  if (!t) {
    rep.add({path, term_ref, "eval", "error", "unknown term reference", "", 0, false});
    rep.exit_code = 2;
    return rep;
  }
  auto t0 = std::chrono::steady_clock::now();
  NormalizeTermResult nr = normalize(t, opts.fuel);
  ReportItem item{path, term_ref, "eval",
                  nr.fuel_exhausted ? "fuel-exhausted" : "reduced",
                  std::to_string(nr.trace.size()) + " step(s); normal form: " +
                      show_proof_term(nr.term),
                  "", ms_since(t0), !nr.fuel_exhausted};
  rep.extras["trace"] = trace_to_json(t, nr.trace);
  rep.extras["normal_form"] = show_proof_term(nr.term);
  rep.add(std::move(item));
  return rep;
}

Report run_sn(const std::string& path, const std::string& term_ref,
              const DriverOptions& opts) {
  Report rep;
  rep.command = "sn";
  CheckedFile cf = check_file(path, opts);
  for (auto& it : cf.items)
    if (!it.ok) rep.add(std::move(it));
  if (!cf.source.diagnostics.empty()) {
    rep.exit_code = 2;
    return rep;
  }
  TermRef t = resolve_term(cf, term_ref);
  if (!t) {
    rep.add({path, term_ref, "sn", "error", "unknown term reference", "", 0, false});
    rep.exit_code = 2;
    return rep;
  }
  auto t0 = std::chrono::steady_clock::now();
  SNCertifyResult cert = sn_certify(t, opts.fuel);
  SNOracleResult oracle = sn_oracle(t, opts.oracle_budget);
  std::string status;
  bool ok = false;
  switch (oracle.verdict) {
    case SNVerdict::SN:
      status = "sn-verified";
      ok = true;
      break;
    case SNVerdict::NonSN:
      status = "non-sn";
      break;
    case SNVerdict::Inconclusive:
      status = "inconclusive";
      break;
  }
  std::string detail = "certifier: ";
  detail += cert.derivation ? "certified" : ("failed (" + cert.failure + ")");
  detail += "; oracle: " + status + " (graph size " +
            std::to_string(oracle.graph_size) + ")";
  if (oracle.verdict == SNVerdict::NonSN && !oracle.witness.empty()) {
    detail += "; cycle witness: ";
    for (size_t i = 0; i < oracle.witness.size(); ++i)
      detail += (i ? " -> " : "") + show_proof_term(oracle.witness[i]);
  }
  rep.add({path, term_ref, "sn", status, detail, "", ms_since(t0), ok});
  return rep;
}

Report run_corpus(const std::string& dir, const DriverOptions& opts) {
  Report rep;
  rep.command = "corpus";
  std::vector<std::string> paths;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec))
    if (entry.path().extension() == ".af2") paths.push_back(entry.path().string());
  if (ec || paths.empty()) {
    rep.add({dir, "", "io", "error",
             ec ? "cannot read directory" : "no .af2 files found", "", 0, false});
    rep.exit_code = 2;
    return rep;
  }
  std::sort(paths.begin(), paths.end());
  Report inner = run_check(paths, opts);
  rep.items = std::move(inner.items);
  rep.rule_coverage = inner.rule_coverage;
  rep.exit_code = inner.exit_code;
  return rep;
}

Report run_lattice_fuzz(int size, long trials, uint64_t seed,
                        const DriverOptions& opts) {
  (void)opts;
  Report rep;
  rep.command = "lattice-fuzz";
  auto t0 = std::chrono::steady_clock::now();
  lattice::CampaignResult res =
      lattice::run_campaign(size, trials, seed, /*exhaustive_small=*/false);
  for (const auto& [name, passes] : res.per_principle_pass)
    rep.add({"", name, "principle", std::to_string(passes) + " pass(es)", "", "", 0, true});
  for (const auto& cx : res.counterexamples)
    rep.add({"", "counterexample", "principle", "violated", cx, "", 0, false});
  rep.add({"", "campaign", "summary",
           std::to_string(res.trials) + " trial(s), " + std::to_string(res.checks) +
               " check(s)",
           res.ok() ? "" : "counterexamples found", "", ms_since(t0), res.ok()});
  return rep;
}

}  // namespace af2m
