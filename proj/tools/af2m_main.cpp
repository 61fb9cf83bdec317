// Command-line driver: check derivation scripts, evaluate extracted programs,
// certify strong normalization, and fuzz the finite-lattice principles.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "af2m/driver.hpp"

int main(int argc, char** argv) {
  CLI::App app{"af2m: proof checker and evaluator for second-order logic with "
               "Mendler-style (co)inductive definitions"};
  app.require_subcommand(1);
  app.fallthrough();

  af2m::DriverOptions opts;
  app.add_option("--fuel", opts.fuel, "reduction fuel")->capture_default_str();
  app.add_option("--seed", opts.seed, "random seed")->capture_default_str();
  app.add_flag("--json", opts.json, "emit a JSON report");

  std::vector<std::string> files;
  std::string file, term_ref, corpus_dir = "corpus";
  int lat_size = 32;
  long lat_trials = 1000;

  auto* check = app.add_subcommand("check", "check every script in the given files");
  check->add_option("files", files, "input .af2 files")->required();

  auto* eval = app.add_subcommand("eval", "normalize a term and print the trace");
  eval->add_option("file", file, "input .af2 file")->required();
  eval->add_option("term", term_ref, "term or theorem name")->required();

  auto* sn = app.add_subcommand("sn", "certify strong normalization of a term");
  sn->add_option("file", file, "input .af2 file")->required();
  sn->add_option("term", term_ref, "term or theorem name")->required();

  auto* fuzz = app.add_subcommand("lattice-fuzz",
                                  "randomized verification of the lattice principles");
  fuzz->add_option("--size", lat_size, "maximum lattice size")->capture_default_str();
  fuzz->add_option("--trials", lat_trials, "number of trials")->capture_default_str();

  auto* corpus = app.add_subcommand("corpus", "run the bundled example corpus");
  corpus->add_option("--dir", corpus_dir, "corpus directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  af2m::Report rep;
  if (check->parsed()) rep = af2m::run_check(files, opts);
  if (eval->parsed()) rep = af2m::run_eval(file, term_ref, opts);
  if (sn->parsed()) rep = af2m::run_sn(file, term_ref, opts);
  if (fuzz->parsed()) rep = af2m::run_lattice_fuzz(lat_size, lat_trials, opts.seed, opts);
  if (corpus->parsed()) rep = af2m::run_corpus(corpus_dir, opts);

  if (opts.json)
    std::cout << rep.to_json(opts) << "\n";
  else
    rep.print(std::cout);
  return rep.exit_code;
}
