#pragma once

#include <optional>
#include <string>
#include <vector>

#include "smtlink/backend.hpp"

namespace smtlink {

struct SolverConfig {
  enum class Input { Stdin, TempFile };

  std::vector<std::string> command{"z3", "-in"};
  double timeout_seconds = 10.0;
  Input input = Input::Stdin;
  // Address-space cap for the child, in megabytes.
  std::optional<std::size_t> memory_mb;

  // SMTLINK_SOLVER when set, else `z3 -in`.
  static SolverConfig from_environment();
};

struct SolverOutcome {
  enum class Kind { Unsat, Sat, Unknown, SolverError, Timeout };
  Kind kind = Kind::SolverError;
  // Raw model block for Sat.
  std::string model;
  // Reason for Unknown; error description for SolverError.
  std::string reason;
  int exit_code = 0;
  std::string stderr_excerpt;
  double millis = 0.0;
};

const char* to_string(SolverOutcome::Kind k);

// Never throws for solver misbehaviour; every interaction yields exactly
// one outcome.  Throws Contract for an invalid configuration.
SolverOutcome run_solver(const SmtScript& script, const SolverConfig& cfg);
SolverOutcome run_solver_text(const std::string& body, const SolverConfig& cfg);

}  // namespace smtlink
