#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "af2m/parser.hpp"
#include "af2m/reduction.hpp"

namespace af2m {

struct DriverOptions {
  long fuel = 100000;        // reduction fuel
  long eq_fuel = 10000;      // rewrite fuel per equational search
  uint64_t seed = 1;         // randomized components
  size_t oracle_budget = 200000;
  bool json = false;
  bool emit_traces = false;
};

struct ReportItem {
  std::string file, name, kind, status, detail;
  std::string judgment;  // rendered checked judgment, when the item has one
  double time_ms = 0;
  bool ok = true;
};

struct Report {
  std::string command;
  std::vector<ReportItem> items;
  std::map<std::string, long> rule_coverage;
  std::map<std::string, std::string> extras;  // free-form, stable keys
  int exit_code = 0;

  std::string to_json(const DriverOptions& opts) const;
  void print(std::ostream& os) const;
  void add(ReportItem item);
};

/// A parsed and fully checked source file: theorem judgments, a lemma
/// environment, and the term environment (extracts plus term definitions,
/// names resolved).
struct CheckedFile {
  SourceFile source;
  LemmaEnv lemmas;
  std::map<std::string, CheckResult> results;  // by theorem name
  std::map<std::string, TermRef> term_env;
  std::vector<ReportItem> items;
  std::map<std::string, long> rule_coverage;
  bool ok = true;
};

CheckedFile check_source(SourceFile source, const DriverOptions& opts);
CheckedFile check_file(const std::string& path, const DriverOptions& opts);

/// Resolves a name to a term: a `term` definition or a theorem extract.
TermRef resolve_term(const CheckedFile& f, const std::string& name);

Report run_check(const std::vector<std::string>& paths, const DriverOptions& opts);
Report run_eval(const std::string& path, const std::string& term_ref,
                const DriverOptions& opts);
Report run_sn(const std::string& path, const std::string& term_ref,
              const DriverOptions& opts);
Report run_corpus(const std::string& dir, const DriverOptions& opts);
Report run_lattice_fuzz(int size, long trials, uint64_t seed,
                        const DriverOptions& opts);

}  // namespace af2m
