// stratt: check StraTT source files, reduce definitions, and run the nesting
// benchmark.
//
//   stratt check FILES... [--no-infer] [--print-levels] [--trace-constraints]
//                         [--keep-going] [--quiet] [--json] [--fuel N]
//   stratt reduce FILE NAME [--fuel N]
//   stratt bench blowup --depth N
//
// Exit codes: 0 all checked, 1 type or level error, 2 parse or IO error.

#include <CLI11.hpp>
#include <iostream>
#include <string>
#include <vector>

#include "stratt/driver.hpp"
#include "stratt/print.hpp"

using namespace stratt;

namespace {

void emitDiagnostics(const CheckOutcome& out, bool json) {
  for (const auto& d : out.diags) {
    if (json)
      std::cerr << diagnosticToJson(d, out.files) << "\n";
    else
      std::cerr << diagnosticToText(d, out.files) << "\n";
  }
}

int runCheck(const std::vector<std::string>& files, const DriverOptions& opts) {
  CheckOutcome out = checkFiles(files, opts, &std::cerr);
  emitDiagnostics(out, opts.json);
  if (out.exitCode == 0 && !opts.quiet && !opts.printLevels) printOkLines(out, std::cout);
  if (out.exitCode == 0 && opts.printLevels) std::cout << printSignature(out.sig);
  return out.exitCode;
}

int runReduce(const std::string& file, const std::string& name, const DriverOptions& opts) {
  CheckOutcome out = checkFiles({file}, opts, &std::cerr);
  if (out.exitCode != 0) {
    emitDiagnostics(out, opts.json);
    return out.exitCode;
  }
  try {
    TermPtr norm = reduceDefinition(out.sig, name, opts.fuel);
    std::cout << printTerm(norm) << "\n";
  } catch (const CheckError& e) {
    Diagnostic d = e.diag;
    if (opts.json)
      std::cerr << diagnosticToJson(d, out.files) << "\n";
    else
      std::cerr << diagnosticToText(d, out.files) << "\n";
    return 1;
  }
  return 0;
}

int runBench(std::uint32_t depth, const DriverOptions& opts) {
  BlowupReport rep = runBlowupBench(depth, opts);
  std::size_t prev = 0;
  for (const auto& row : rep.rows) {
    std::cout << row.name << " constraints=" << row.constraints << " time_us=" << row.micros;
    if (prev) std::cout << " ratio=" << (double)row.constraints / (double)prev;
    prev = row.constraints;
    std::cout << "\n";
  }
  std::cout << (rep.ok ? "bench ok" : "bench FAILED") << " total_us=" << rep.totalMicros << "\n";
  return rep.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"StraTT type checker"};
  app.require_subcommand(1);

  DriverOptions opts;

  auto* check = app.add_subcommand("check", "type check source files in order");
  std::vector<std::string> files;
  check->add_option("files", files, "source files (.stt)")->required()->expected(-1);
  check->add_flag("--no-infer", opts.noInfer, "reject omitted level or displacement annotations");
  check->add_flag("--print-levels", opts.printLevels, "re-print the program fully annotated");
  check->add_flag("--trace-constraints", opts.traceConstraints,
                  "print every collected level constraint");
  check->add_flag("--keep-going", opts.keepGoing, "collect diagnostics past the first error");
  check->add_flag("--quiet", opts.quiet, "suppress the per-definition OK lines");
  check->add_flag("--json", opts.json, "emit diagnostics as JSON objects");
  check->add_option("--fuel", opts.fuel, "reduction step budget per definition");

  auto* reduce = app.add_subcommand("reduce", "normalize a checked definition");
  std::string reduceFile, reduceName;
  reduce->add_option("file", reduceFile, "source file")->required();
  reduce->add_option("name", reduceName, "definition to normalize")->required();
  reduce->add_option("--fuel", opts.fuel, "reduction step budget");
  reduce->add_flag("--json", opts.json, "emit diagnostics as JSON objects");

  auto* bench = app.add_subcommand("bench", "benchmarks");
  auto* blowup = bench->add_subcommand("blowup", "nested arrow definitions T1..TN");
  std::uint32_t depth = 8;
  blowup->add_option("--depth", depth, "nesting depth (<= 12)")->check(CLI::Range(1u, 12u));

  // plain `stratt FILES...` behaves as `stratt check FILES...`
  std::vector<std::string> rawArgs(argv + 1, argv + argc);
  if (!rawArgs.empty() && rawArgs[0] != "check" && rawArgs[0] != "reduce" &&
      rawArgs[0] != "bench" && rawArgs[0][0] != '-') {
    rawArgs.insert(rawArgs.begin(), "check");
  }
  std::vector<const char*> argPtrs{argv[0]};
  for (const auto& a : rawArgs) argPtrs.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argPtrs.size()), argPtrs.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (check->parsed()) return runCheck(files, opts);
  if (reduce->parsed()) return runReduce(reduceFile, reduceName, opts);
  if (bench->parsed()) {
    if (blowup->parsed()) return runBench(depth, opts);
    std::cerr << "unknown benchmark\n";
    return 2;
  }
  return 2;
}
