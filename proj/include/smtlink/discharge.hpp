#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smtlink/backend.hpp"
#include "smtlink/hints.hpp"
#include "smtlink/model.hpp"
#include "smtlink/obligation.hpp"
#include "smtlink/pipeline.hpp"
#include "smtlink/solver.hpp"

namespace smtlink {

// Lemmas "argument types imply result facts" proven once per run.
class LemmaCache {
 public:
  struct Result {
    bool proved = false;
    std::string detail;
  };
  std::optional<Result> find(const std::string& key) const;
  void store(const std::string& key, Result r);

 private:
  mutable std::mutex mu_;
  std::map<std::string, Result> results_;
};

struct DischargeContext {
  const TypeRegistry* reg = nullptr;
  // Hints in force for the run that produced the obligations.
  HintSpec hints;
  SolverConfig solver;
  PipelineFaults faults;
  std::size_t depth = 0;
  std::size_t depth_limit = 3;
  std::size_t jobs = 1;
  // Functions whose return lemma is being proven by induction right now.
  std::vector<std::string> inducting;
  std::shared_ptr<LemmaCache> lemmas = std::make_shared<LemmaCache>();
};

struct DischargeResult {
  Status status = Status::Pending;
  std::string detail;
};

// Pending means "not decided syntactically".
DischargeResult discharge_syntactic(const Obligation& ob,
                                    const DischargeContext& ctx);
// Discharged or Failed.
DischargeResult discharge_via_smt(const Obligation& ob,
                                  const DischargeContext& ctx);
// Settles every pending obligation: syntactic first, then via-smt (in
// parallel when ctx.jobs > 1).
void discharge_all(Ledger& ledger, const DischargeContext& ctx);

struct Verdict {
  enum class Kind { Proved, Refuted, Unknown, FailedObligation };
  Kind kind = Kind::Unknown;
  std::string reason;
  std::optional<Counterexample> cex;
  std::vector<std::size_t> failed;
  std::vector<std::size_t> assumed;
};

const char* to_string(Verdict::Kind k);
int exit_code(Verdict::Kind k);

Verdict final_verdict(const Ledger& ledger, const SolverOutcome& main,
                      const std::optional<CexCheck>& check,
                      const std::optional<Counterexample>& cex = std::nullopt);

// Everything the backend and solver produced for one pipeline state.
struct SmtCheck {
  SortedGoal sorted;
  SmtScript script;
  SolverOutcome outcome;
  std::size_t destructors = 0;
};

// Lowers st.main, adds precondition obligations to st.ledger and runs the
// solver.  Throws on translation errors.
SmtCheck check_state(PipelineState& st, const DischargeContext& ctx);

// Adds the precondition obligations for a sorted goal (honouring the
// drop_preconditions fault) plus an audit failure when the count is off.
// Returns the number of destructors.
std::size_t add_preconditions(PipelineState& st, const SortedGoal& sorted,
                              const DischargeContext& ctx);

}  // namespace smtlink
