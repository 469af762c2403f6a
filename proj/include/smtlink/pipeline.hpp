#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "smtlink/error.hpp"
#include "smtlink/hints.hpp"
#include "smtlink/obligation.hpp"
#include "smtlink/registry.hpp"
#include "smtlink/term.hpp"

namespace smtlink {

enum class Stage {
  Processed,
  HypoAdded,
  Expanded,
  TypeExtracted,
  UninterpDone,
  Lowered,
};

enum class PassId { AddHypo, Expand, TypeExtract, UninterpReturns };

const char* to_string(Stage s);
const char* to_string(PassId p);
Stage stage_after(PassId p);

// Ordered pass list; each entry's successor is the next entry, and the last
// one hands over to the backend (the lowering stage).
struct ArchTable {
  std::vector<PassId> passes;

  static ArchTable standard();
  // Stage the state must be in before `p` runs under this table.
  Stage predecessor(PassId p) const;
  std::optional<PassId> successor(PassId p) const;
  // Distinct entries, non-empty.  Throws Contract otherwise.
  void validate() const;
};

// Test-only corruptions used by negative controls.
struct PipelineFaults {
  // type_extract claims an extra (INTEGERP v) that was never a hypothesis.
  bool forge_extraction = false;
  // The backend silently skips precondition generation.
  bool drop_preconditions = false;
};

struct TraceEntry {
  Stage stage;
  Clause main;
};

struct PipelineState {
  Clause main;
  // Input goal as given, before any pass.
  Clause goal;
  Ledger ledger;
  Stage stage = Stage::Processed;
  std::vector<TraceEntry> trace;
  HintSpec hints;
  ArchTable arch;
  PipelineFaults faults;
};

// A pass failed; `stage` is the last completed stage.
class PipelineError : public Error {
 public:
  PipelineError(const Error& cause, Stage stage, PassId pass)
      : Error(cause.kind(),
              std::string("during ") + to_string(pass) + ": " + cause.what(),
              cause.offset()),
        stage_(stage),
        pass_(pass) {}
  Stage stage() const noexcept { return stage_; }
  PassId pass() const noexcept { return pass_; }

 private:
  Stage stage_;
  PassId pass_;
};

// (implies (and H...) C) becomes [(not H)..., C...]; OR flattens.
Clause clausify(const Term& goal);
std::vector<Term> flatten_and(const Term& t);

PipelineState process_hint(const Clause& goal, const HintSpec& user,
                           const HintSpec& defaults, const TypeRegistry& reg,
                           ArchTable arch = ArchTable::standard());

PipelineState add_hypo(PipelineState st, const TypeRegistry& reg);
PipelineState expand(PipelineState st, const TypeRegistry& reg);
PipelineState type_extract(PipelineState st, const TypeRegistry& reg);
PipelineState uninterp_returns(PipelineState st, const TypeRegistry& reg);
PipelineState run_pass(PassId pass, PipelineState st, const TypeRegistry& reg);

// Runs every pass of the table in order.  Throws PipelineError.
PipelineState run_pipeline(const Clause& goal, const HintSpec& hints,
                           const TypeRegistry& reg,
                           ArchTable arch = ArchTable::standard(),
                           PipelineFaults faults = {});

// Unfolding budget for one function under the hints; SIZE_MAX = unbounded.
std::size_t expansion_depth(const std::string& fn, const TypeRegistry& reg,
                            const HintSpec& hints);

// The expander itself, shared by the pass and by syntactic re-derivation.
Term expand_term(const Term& t, const TypeRegistry& reg, const HintSpec& hints);
Clause expand_clause(const Clause& c, const TypeRegistry& reg,
                     const HintSpec& hints);

// Recognizer applied to a variable, e.g. (RATIONALP X).
bool is_type_hypothesis(const Term& t, const TypeRegistry& reg);

// Calls of uninterpreted-spec functions in pre-order, structurally deduped.
std::vector<Term> uninterp_call_sites(const Clause& c, const HintSpec& hints);

// (resrec call) followed by the constraints instantiated at the call.
std::vector<Term> return_facts(const Term& call, const UninterpSpec& spec,
                               const TypeRegistry& reg);

}  // namespace smtlink
