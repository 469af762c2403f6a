#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smtlink/registry.hpp"
#include "smtlink/sexpr.hpp"
#include "smtlink/term.hpp"

namespace smtlink {

struct HypothesisHint {
  Term term;
  // Audit note; a hypothesis with a note is accepted on the user's word.
  std::optional<std::string> note;
};

struct ExpandOverride {
  enum class Kind { Depth, Uninterpreted };
  Kind kind = Kind::Depth;
  std::size_t depth = 1;

  static ExpandOverride with_depth(std::size_t n) { return {Kind::Depth, n}; }
  static ExpandOverride uninterpreted() { return {Kind::Uninterpreted, 0}; }
};

// Treat a function as an uninterpreted symbol constrained by recognizers.
struct UninterpSpec {
  std::vector<std::string> arg_recognizers;
  std::string result_recognizer;
  // Terms over the function's formals; each becomes an assumption at every
  // call site.
  std::vector<Term> constraints;
};

struct SolverOverrides {
  std::optional<std::vector<std::string>> command;
  std::optional<double> timeout_seconds;
};

inline constexpr std::size_t kDefaultExpansionCap = 100000;

struct HintSpec {
  std::vector<HypothesisHint> hypotheses;
  std::map<std::string, ExpandOverride> expand;
  std::map<std::string, UninterpSpec> uninterp;
  std::optional<bool> ints_as_reals;
  std::optional<std::size_t> expansion_cap;
  SolverOverrides solver;

  bool use_reals() const { return ints_as_reals.value_or(false); }
  std::size_t cap() const { return expansion_cap.value_or(kDefaultExpansionCap); }
};

// Field-wise merge: user values win, hypotheses concatenate (user's last),
// per-function maps merge with user entries replacing defaults.
HintSpec merge_hints(const HintSpec& defaults, const HintSpec& user);

// Checks that every named function and recognizer resolves and that
// uninterpreted specs match the function's arity.  Throws BadHint.
void validate_hints(const HintSpec& hints, const TypeRegistry& reg);

// Reads a hint property list such as
//   (:hypotheses ((< x 1) ((< y 1) :assume "by lemma"))
//    :expand ((len :depth 2) (g :uninterpreted))
//    :uninterp ((len (integer-list-p) integerp :constraints ((<= 0 (len l)))))
//    :ints-as-reals t :timeout 30 :solver-cmd "z3 -in")
// Throws BadHint.
HintSpec parse_hints(const SExpr& plist, const TypeRegistry& reg);

// Splits a command line on blanks, honoring double quotes.
std::vector<std::string> split_command(const std::string& text);

}  // namespace smtlink
