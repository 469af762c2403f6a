#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "smtlink/discharge.hpp"
#include "smtlink/goalfile.hpp"
#include "smtlink/report.hpp"

namespace smtlink {

// Command-line settings.  Solver settings resolve as flag, then hint, then
// the SMTLINK_SOLVER environment variable.
struct ProveOptions {
  std::optional<std::vector<std::string>> solver_command;
  std::optional<double> timeout_seconds;
  bool ints_as_reals = false;
  // Obligation ids to mark user-assumed.
  std::vector<std::size_t> assume;
  std::size_t jobs = 1;
  PipelineFaults faults;
};

SolverConfig effective_solver(const HintSpec& hints, const ProveOptions& opts);
HintSpec effective_hints(const Theorem& th, const ProveOptions& opts);

struct ProveResult {
  Verdict verdict;
  RunReport report;
  PipelineState state;
  // Absent when the goal could not be lowered.
  std::optional<SmtCheck> check;
  std::optional<Counterexample> cex;
  std::optional<CexCheck> cex_check;
};

// Pipeline, solver, discharge and verdict.  Translation errors throw unless
// a failed obligation already accounts for them.
ProveResult prove(const GoalFile& file, const Theorem& th, const ProveOptions& opts);

// The SMT-LIB2 script for the theorem's final clause.
std::string emit(const GoalFile& file, const Theorem& th, const ProveOptions& opts);

// One labeled block per pipeline stage.
std::string trace(const GoalFile& file, const Theorem& th, const ProveOptions& opts);

}  // namespace smtlink
