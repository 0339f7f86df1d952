// stratt-proplab: executable metatheory for the checker.
//
//   stratt-proplab SUITE [--trials N] [--seed S]
//   stratt-proplab all [--trials N] [--seed S]
//   stratt-proplab generator [--trials N] [--seed S]
//   stratt-proplab paradoxes [--corpus DIR]
//   stratt-proplab blowup [--depth N]
//
// Prints a text report and one machine-readable JSON line per suite.

#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "stratt/proplab.hpp"

using namespace stratt;

int main(int argc, char** argv) {
  CLI::App app{"StraTT metatheory suites"};
  std::string suite;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  std::string corpusDir = "corpus";
  std::uint32_t depth = 8;
  app.add_option("suite", suite,
                 "one of: cumulativity displaceability restriction floating weakening "
                 "substitution preservation progress generator paradoxes blowup all")
      ->required();
  app.add_option("--trials", trials, "trials per suite");
  app.add_option("--seed", seed, "generator seed");
  app.add_option("--corpus", corpusDir, "corpus directory (paradoxes)");
  app.add_option("--depth", depth, "nesting depth (blowup)")->check(CLI::Range(1u, 12u));
  CLI11_PARSE(app, argc, argv);

  bool allOk = true;

  if (suite == "paradoxes") {
    auto results = runParadoxCorpus(corpusDir);
    for (const auto& r : results) {
      std::cout << (r.pass ? "pass " : "FAIL ") << r.file << ": " << r.detail << "\n";
      std::cout << "{\"suite\":\"paradox\",\"file\":\"" << r.file
                << "\",\"ok\":" << (r.pass ? "true" : "false") << "}\n";
      allOk &= r.pass;
    }
    return allOk ? 0 : 1;
  }

  if (suite == "blowup") {
    BlowupReport rep = runBlowupBench(depth);
    std::size_t prev = 0;
    bool linear = rep.ok;
    for (const auto& row : rep.rows) {
      std::cout << row.name << " constraints=" << row.constraints << " time_us=" << row.micros
                << "\n";
      if (prev && row.constraints > 8 * prev) linear = false;
      prev = row.constraints;
    }
    std::cout << (linear ? "pass" : "FAIL") << " blowup depth=" << depth
              << " total_us=" << rep.totalMicros << "\n";
    std::cout << "{\"suite\":\"blowup\",\"depth\":" << depth
              << ",\"ok\":" << (linear ? "true" : "false") << "}\n";
    return linear ? 0 : 1;
  }

  PropLab lab(seed);

  if (suite == "generator") {
    SuiteReport rep = lab.runGeneratorSoundness(trials);
    std::cout << suiteReportText(rep) << "\n";
    std::cout << "rule coverage:";
    for (const auto& [rule, n] : lab.coverage) std::cout << " " << rule << "=" << n;
    std::cout << "\n" << suiteReportJson(rep) << "\n";
    return rep.ok() ? 0 : 1;
  }

  std::vector<std::string> names;
  if (suite == "all")
    names = PropLab::suiteNames();
  else
    names.push_back(suite);

  for (const auto& name : names) {
    bool known = false;
    for (const auto& n : PropLab::suiteNames()) known |= n == name;
    if (!known) {
      std::cerr << "unknown suite: " << name << "\n";
      return 2;
    }
    SuiteReport rep = lab.run(name, trials);
    std::cout << suiteReportText(rep) << "\n" << suiteReportJson(rep) << "\n";
    allOk &= rep.ok();
  }
  return allOk ? 0 : 1;
}
