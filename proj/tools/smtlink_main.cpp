#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "smtlink/error.hpp"
#include "smtlink/prover.hpp"

using namespace smtlink;

namespace {

constexpr int kUsageError = 4;

struct Flags {
  std::string file;
  std::optional<std::string> theorem;
  std::optional<std::string> solver_cmd;
  std::optional<double> timeout;
  bool ints_as_reals = false;
  bool realp_alias = false;
  std::vector<std::size_t> assume;
  std::size_t jobs = 1;
  bool emit_only = false;
  bool trace = false;
  std::optional<std::string> out;
  std::optional<std::string> report;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("file", f.file, "goal file")->required();
  cmd->add_option("--theorem", f.theorem, "theorem to use when the file has several");
  cmd->add_option("--solver-cmd", f.solver_cmd, "solver command line (default: z3 -in)");
  cmd->add_option("--timeout", f.timeout, "solver timeout in seconds (default 10)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--ints-as-reals", f.ints_as_reals, "lower integerp to Real");
  cmd->add_flag("--realp-as-rationalp", f.realp_alias, "accept realp as rationalp");
}

ProveOptions options_of(const Flags& f) {
  ProveOptions o;
  if (f.solver_cmd) o.solver_command = split_command(*f.solver_cmd);
  o.timeout_seconds = f.timeout;
  o.ints_as_reals = f.ints_as_reals;
  o.assume = f.assume;
  o.jobs = f.jobs;
  return o;
}

void write_text(const std::optional<std::string>& path, const std::string& text) {
  if (!path || *path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Contract, "cannot write " + *path);
  out << text;
}

int run_prove(const Flags& f) {
  GoalFile file = load_goal_file(f.file, {f.realp_alias});
  const Theorem& th = file.select(f.theorem);
  ProveOptions opts = options_of(f);
  if (f.emit_only) {
    write_text(f.out, emit(file, th, opts));
    return 0;
  }
  if (f.trace) std::cout << trace(file, th, opts) << "\n";
  ProveResult res = prove(file, th, opts);
  std::string report = write_report(res.report);
  std::cout << report;
  if (f.report) write_text(f.report, report);
  std::cerr << to_string(res.verdict.kind) << " " << th.name << ": "
            << res.verdict.reason << "\n";
  if (res.report.counterexample) {
    std::cerr << "counterexample: " << *res.report.counterexample << "\n";
  }
  for (auto id : res.verdict.assumed) {
    std::cerr << "assumed obligation " << id << ": " << res.state.ledger.at(id).note
              << "\n";
  }
  return exit_code(res.verdict.kind);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discharge ACL2-style goals with an SMT solver"};
  app.require_subcommand(1);
  Flags f;

  auto* prove_cmd = app.add_subcommand("prove", "prove a theorem and print the run report");
  add_common(prove_cmd, f);
  prove_cmd->add_option("--assume", f.assume, "mark an obligation id user-assumed (audited)");
  prove_cmd->add_option("--jobs", f.jobs, "parallel via-smt discharges")
      ->check(CLI::PositiveNumber);
  prove_cmd->add_flag("--emit-only", f.emit_only, "print the SMT-LIB2 script and stop");
  prove_cmd->add_flag("--trace", f.trace, "print the per-stage clauses first");
  prove_cmd->add_option("--report", f.report, "also write the report to a file");
  prove_cmd->add_option("-o,--out", f.out, "script output for --emit-only");

  auto* emit_cmd = app.add_subcommand("emit", "write the SMT-LIB2 script");
  add_common(emit_cmd, f);
  emit_cmd->add_option("-o,--out", f.out, "output file (default stdout)");

  auto* trace_cmd = app.add_subcommand("trace", "print the clause after each stage");
  add_common(trace_cmd, f);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsageError;
  }

  try {
    if (prove_cmd->parsed()) return run_prove(f);
    GoalFile file = load_goal_file(f.file, {f.realp_alias});
    const Theorem& th = file.select(f.theorem);
    if (emit_cmd->parsed()) {
      write_text(f.out, emit(file, th, options_of(f)));
    } else if (trace_cmd->parsed()) {
      std::cout << trace(file, th, options_of(f));
    }
    return 0;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.kind()) << ": " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  }
}
