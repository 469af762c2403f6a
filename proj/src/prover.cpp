#include "smtlink/prover.hpp"

#include <chrono>
#include <sstream>

#include "smtlink/error.hpp"

namespace smtlink {

SolverConfig effective_solver(const HintSpec& hints, const ProveOptions& opts) {
  SolverConfig cfg = SolverConfig::from_environment();
  if (hints.solver.command) cfg.command = *hints.solver.command;
  if (hints.solver.timeout_seconds) cfg.timeout_seconds = *hints.solver.timeout_seconds;
  if (opts.solver_command) cfg.command = *opts.solver_command;
  if (opts.timeout_seconds) cfg.timeout_seconds = *opts.timeout_seconds;
  if (cfg.command.empty()) throw Error(ErrorKind::Contract, "empty solver command");
  if (!(cfg.timeout_seconds > 0)) throw Error(ErrorKind::Contract, "timeout must be positive");
  return cfg;
}

HintSpec effective_hints(const Theorem& th, const ProveOptions& opts) {
  HintSpec h = th.hints;
  if (opts.ints_as_reals) h.ints_as_reals = true;
  return h;
}

namespace {

PipelineState run_theorem(const GoalFile& file, const Theorem& th,
                          const ProveOptions& opts) {
  return run_pipeline(th.goal, effective_hints(th, opts), file.reg,
                      ArchTable::standard(), opts.faults);
}

}  // namespace

ProveResult prove(const GoalFile& file, const Theorem& th, const ProveOptions& opts) {
  auto t0 = std::chrono::steady_clock::now();
  PipelineState st = run_theorem(file, th, opts);
  DischargeContext ctx;
  ctx.reg = &file.reg;
  ctx.hints = st.hints;
  ctx.solver = effective_solver(st.hints, opts);
  ctx.faults = opts.faults;
  ctx.jobs = opts.jobs;

  std::optional<SmtCheck> check;
  std::optional<Error> translation;
  try {
    check = check_state(st, ctx);
  } catch (const Error& e) {
    translation = e;
  }
  for (auto id : opts.assume) {
    if (id == 0 || id > st.ledger.size()) {
      throw Error(ErrorKind::Contract, "--assume: no obligation " + std::to_string(id));
    }
    st.ledger.assume(id, "assumed on the command line (--assume " +
                             std::to_string(id) + ")");
  }
  discharge_all(st.ledger, ctx);
  // A goal that cannot be lowered is an error unless the ledger already
  // explains it: a failed obligation means the pipeline itself went wrong.
  SolverOutcome outcome;
  if (translation) {
    bool failed = false;
    for (const auto& o : st.ledger.obligations()) failed |= o.status == Status::Failed;
    if (!failed) throw *translation;
    outcome.kind = SolverOutcome::Kind::SolverError;
    outcome.reason = std::string("not translated: ") + translation->what();
  } else {
    outcome = check->outcome;
  }

  std::optional<Counterexample> cex;
  std::optional<CexCheck> cex_check;
  std::optional<std::string> printed;
  if (outcome.kind == SolverOutcome::Kind::Sat) {
    try {
      cex = parse_model(outcome.model, check->script, file.reg, free_vars(st.goal));
      cex_check = check_counterexample(*cex, st.goal, file.reg);
      printed = print_counterexample(*cex, check->sorted.vars, file.reg);
    } catch (const Error& e) {
      cex.reset();
      cex_check = CexCheck{CexCheck::Kind::NotEvaluable,
                           std::string("model not liftable: ") + e.what()};
      printed = outcome.model;
    }
  }
  Verdict v = final_verdict(st.ledger, outcome, cex_check, cex);

  RunReport r;
  r.file = file.path;
  r.theorem = th.name;
  r.verdict = to_string(v.kind);
  r.reason = v.reason;
  r.solver = to_string(outcome.kind);
  r.solver_ms = outcome.millis;
  r.obligations = report_rows(st.ledger);
  r.counterexample = printed;
  if (cex_check) r.cex_check = to_string(cex_check->kind);
  r.total_ms = std::chrono::duration<double, std::milli>(
                   std::chrono::steady_clock::now() - t0)
                   .count();
  return ProveResult{std::move(v), std::move(r), std::move(st), std::move(check),
                     std::move(cex), std::move(cex_check)};
}

std::string emit(const GoalFile& file, const Theorem& th, const ProveOptions& opts) {
  PipelineState st = run_theorem(file, th, opts);
  SortedGoal sorted = infer_sorts(st.main, file.reg, st.hints);
  return emit_script(sorted, file.reg, intern_symbols(st.main)).text();
}

std::string trace(const GoalFile& file, const Theorem& th, const ProveOptions& opts) {
  PipelineState st = run_theorem(file, th, opts);
  std::ostringstream out;
  out << ";; theorem " << th.name << "\n";
  out << ";; input\n" << print_clause_pretty(st.goal) << "\n";
  std::size_t n = 0;
  for (const auto& e : st.trace) {
    out << "\n;; stage " << ++n << ": " << to_string(e.stage) << "\n"
        << print_clause_pretty(e.main) << "\n";
  }
  return out.str();
}

}  // namespace smtlink
