#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "smtlink/registry.hpp"
#include "smtlink/term.hpp"
#include "smtlink/value.hpp"

namespace smtlink {

using Env = std::map<std::string, Value, std::less<>>;

// Bound on nested user-function unfoldings.
inline constexpr std::size_t kDefaultFuel = 64;

// Reference interpreter for the untyped logic (call by value, lazy `if`,
// `and`, `or`, `implies`).  Throws FuelExhausted or UnboundVar.
Value eval_term(const Term& t, const Env& env, const TypeRegistry& reg,
                std::size_t fuel = kDefaultFuel);

// True iff some disjunct evaluates to a non-nil value.
bool clause_eval(const Clause& c, const Env& env, const TypeRegistry& reg,
                 std::size_t fuel = kDefaultFuel);

// Membership test for a primitive or FTY recognizer.
bool recognizes(const TypeRegistry& reg, const std::string& recognizer,
                const Value& v);

// The value a fixing function returns for non-members.
Value default_value(const TypeRegistry& reg, const std::string& recognizer);

}  // namespace smtlink
