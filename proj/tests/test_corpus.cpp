#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "af2m/driver.hpp"
#include "af2m/parser.hpp"

using namespace af2m;

#ifndef AF2M_CORPUS_DIR
#define AF2M_CORPUS_DIR "corpus"
#endif

namespace {

std::vector<std::string> corpus_paths() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(AF2M_CORPUS_DIR))
    if (e.path().extension() == ".af2") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("every corpus file checks clean") {
  DriverOptions opts;
  for (const auto& p : corpus_paths()) {
    CAPTURE(p);
    CheckedFile cf = check_file(p, opts);
    for (const auto& item : cf.items) {
      CAPTURE(item.name);
      CAPTURE(item.detail);
      CHECK(item.ok);
    }
  }
}

TEST_CASE("corpus files round-trip through the printer") {
  DriverOptions opts;
  for (const auto& p : corpus_paths()) {
    CAPTURE(p);
    SourceFile f1 = parse_source(slurp(p), p);
    REQUIRE(f1.ok());
    SourceFile f2 = parse_source(print_source(f1), p + "#printed");
    for (const auto& d : f2.diagnostics) {
      CAPTURE(d.line);
      CAPTURE(d.message);
    }
    REQUIRE(f2.ok());
    REQUIRE(f2.thms.size() == f1.thms.size());
    LemmaEnv env1, env2;
    for (size_t i = 0; i < f1.thms.size(); ++i) {
      CAPTURE(f1.thms[i].name);
      auto r1 = check_script(f1.thms[i].script, &env1);
      auto r2 = check_script(f2.thms[i].script, &env2);
      REQUIRE(r1.ok());
      REQUIRE(r2.ok());
      env1.lemmas[f1.thms[i].name] = {*r1.judgment, f1.thms[i].script.eqs};
      env2.lemmas[f2.thms[i].name] = {*r2.judgment, f2.thms[i].script.eqs};
      CHECK(alpha_eq(r1.judgment->formula, r2.judgment->formula));
      CHECK(term_alpha_eq(r1.judgment->term, r2.judgment->term));
    }
    REQUIRE(f2.expects.size() == f1.expects.size());
    for (size_t i = 0; i < f1.expects.size(); ++i) {
      CHECK(term_alpha_eq(f1.expects[i].lhs, f2.expects[i].lhs));
      CHECK(term_alpha_eq(f1.expects[i].rhs, f2.expects[i].rhs));
    }
  }
}

TEST_CASE("evidence serializes to json") {
  EqEvidence ev = EqEvidence::trans(
      EqEvidence::refl(ObjTerm::var("t")),
      EqEvidence::instance(0, {{"n", ObjTerm::var("a")}}, true), ObjTerm::var("t"));
  std::string js = evidence_to_json(ev);
  CHECK(js.find("\"rule\":\"trans\"") != std::string::npos);
  CHECK(js.find("\"orientation\":\"backward\"") != std::string::npos);
}
