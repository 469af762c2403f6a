#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smtlink/backend.hpp"
#include "smtlink/number.hpp"
#include "smtlink/registry.hpp"
#include "smtlink/term.hpp"
#include "smtlink/value.hpp"

namespace smtlink {

struct RootObj {
  // Univariate polynomial in X.
  Term polynomial;
  BigInt index;

  friend bool operator==(const RootObj& a, const RootObj& b) {
    return a.polynomial == b.polynomial && a.index == b.index;
  }
};

struct CexValue {
  enum class Kind { Exact, Root, Opaque };
  Kind kind = Kind::Exact;
  Value value;
  std::optional<RootObj> root;
  // Solver text kept for values that cannot be lifted.
  std::string raw;

  static CexValue exact(Value v) { return {Kind::Exact, std::move(v), {}, {}}; }
  static CexValue root_obj(RootObj r) { return {Kind::Root, Value::nil(), std::move(r), {}}; }
  static CexValue opaque(std::string raw) { return {Kind::Opaque, Value::nil(), {}, std::move(raw)}; }

  friend bool operator==(const CexValue& a, const CexValue& b) {
    return a.kind == b.kind && a.value == b.value && a.root == b.root &&
           a.raw == b.raw;
  }
};

struct Counterexample {
  // Sorted by variable name.
  std::map<std::string, CexValue> bindings;
  // Variables the solver did not mention, bound to a default value.
  std::vector<std::string> defaulted;

  bool evaluable() const;
  friend bool operator==(const Counterexample& a, const Counterexample& b) {
    return a.bindings == b.bindings;
  }
};

// Lifts a model block against the script that produced it.  Every free
// variable in `goal_vars` is bound.  Throws ModelParseError.
Counterexample parse_model(const std::string& raw, const SmtScript& script,
                           const TypeRegistry& reg,
                           const std::set<std::string>& goal_vars = {});

// ((X -2) (Y (CEX-ROOT-OBJ Y (+ (^ X 2) (- 2)) 2)))
std::string print_value(const Value& v, const Sort& sort, const TypeRegistry& reg);
std::string print_counterexample(const Counterexample& cex,
                                 const std::map<std::string, Sort>& sorts,
                                 const TypeRegistry& reg);
// Inverse of print_counterexample.  Throws ModelParseError.
Counterexample parse_counterexample(const std::string& text,
                                    const std::map<std::string, Sort>& sorts,
                                    const TypeRegistry& reg);
Value value_from_sexpr(const SExpr& s, const Sort& sort, const TypeRegistry& reg);

struct CexCheck {
  enum class Kind { Confirmed, NotEvaluable, Spurious };
  Kind kind = Kind::NotEvaluable;
  std::string reason;
};

const char* to_string(CexCheck::Kind k);

CexCheck check_counterexample(const Counterexample& cex, const Clause& goal,
                              const TypeRegistry& reg);

}  // namespace smtlink
