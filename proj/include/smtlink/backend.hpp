#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smtlink/hints.hpp"
#include "smtlink/number.hpp"
#include "smtlink/registry.hpp"
#include "smtlink/term.hpp"

namespace smtlink {

struct Sort {
  enum class Kind { Bool, Int, Real, Sym, Datatype, Array, Pair };
  Kind kind = Kind::Bool;
  // FTY type name for Datatype (prod, list, option); the alist type name for
  // Array and for Pair, the option-pair an alist lookup returns.
  std::string type;

  static Sort boolean() { return {Kind::Bool, {}}; }
  static Sort integer() { return {Kind::Int, {}}; }
  static Sort real() { return {Kind::Real, {}}; }
  static Sort symbol() { return {Kind::Sym, {}}; }
  static Sort datatype(std::string t) { return {Kind::Datatype, std::move(t)}; }
  static Sort array(std::string t) { return {Kind::Array, std::move(t)}; }
  static Sort pair(std::string t) { return {Kind::Pair, std::move(t)}; }

  bool numeric() const { return kind == Kind::Int || kind == Kind::Real; }
  std::string describe() const;

  friend bool operator==(const Sort& a, const Sort& b) {
    return a.kind == b.kind && a.type == b.type;
  }
  friend bool operator!=(const Sort& a, const Sort& b) { return !(a == b); }
  friend bool operator<(const Sort& a, const Sort& b) {
    return a.kind != b.kind ? a.kind < b.kind : a.type < b.type;
  }
};

// Sort denoted by a recognizer; Int becomes Real when `ints_as_reals`.
Sort sort_of_recognizer(const TypeRegistry& reg, const std::string& recognizer,
                        bool ints_as_reals);

struct TypedTerm {
  Term term;
  Sort sort;
  std::vector<TypedTerm> args;
};

struct FunctionSig {
  std::vector<Sort> args;
  Sort result;
};

struct TypedDisjunct {
  TypedTerm term;
  // Index of the main-clause disjunct it was read from.
  std::size_t disjunct = 0;
};

// The many-sorted reading of G_tcp.
struct SortedGoal {
  Clause clause;
  std::map<std::string, Sort> vars;
  // :return facts, asserted as assumptions.
  std::vector<TypedDisjunct> assumptions;
  // Remaining disjuncts; their disjunction is the goal body.
  std::vector<TypedDisjunct> body;
  std::map<std::string, FunctionSig> functions;
};

// Throws MissingTypeHyp, SortClash, AmbiguousNil or UnsupportedOp.
SortedGoal infer_sorts(const Clause& g, const TypeRegistry& reg,
                       const HintSpec& hints);

// Interning of quoted symbols onto 0..k-1 in first-occurrence order.
class SymbolIntern {
 public:
  // Existing index, or the next counter value.
  std::size_t intern(const std::string& name);
  std::optional<std::size_t> index(const std::string& name) const;
  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  // Name for a solver-side index; indices outside 0..k-1 get a generated
  // name distinct from every interned one.
  std::string lift(const BigInt& index) const;

 private:
  std::vector<std::string> names_;
  std::map<std::string, std::size_t> table_;
};

std::pair<SymbolIntern, std::size_t> intern_symbol(SymbolIntern si,
                                                   const std::string& name);

// Interns the quoted symbols of `c` left to right, pre-order.
SymbolIntern intern_symbols(const Clause& c);

struct ConstructorDecl {
  enum class Role { Symbol, Prod, ListCons, ListNil, OptionSome, OptionNil,
                    PairCons, PairNil };
  Role role = Role::Symbol;
  std::string name;
  // (accessor, field sort)
  std::vector<std::pair<std::string, Sort>> fields;
};

struct DatatypeDecl {
  // Sort this datatype implements: Sym, Datatype(T) or Pair(T).
  Sort sort;
  std::string smt_name;
  std::vector<ConstructorDecl> constructors;
};

// Datatypes needed by `sorts`, closed under field references, in
// dependency order.
std::vector<DatatypeDecl> lower_types(const TypeRegistry& reg,
                                      const std::vector<Sort>& sorts);

std::string datatype_declaration(const DatatypeDecl& d,
                                 const std::map<Sort, std::string>& sort_names);

// Destructor occurrence that needs a precondition.
struct Precondition {
  Clause clause;
  // (CONSP x) or (NOT (EQUAL x (AS NIL T))).
  Term literal;
  // Path conditions under which the destructor is evaluated.
  std::vector<Term> context;
  std::size_t disjunct = 0;
  std::string location;
};

std::vector<Precondition> gen_preconditions(const SortedGoal& g,
                                            const TypeRegistry& reg);

// Number of destructor nodes that require preconditions.
std::size_t count_destructors(const SortedGoal& g, const TypeRegistry& reg);

// Lower-case, '-' to '_', named escapes for the rest.
std::string mangle(const std::string& name);
bool is_reserved_smt_word(const std::string& word);

struct SmtScript {
  // Declarations and assertions, without the check and model directives.
  std::string body;
  std::vector<DatatypeDecl> datatypes;
  std::map<Sort, std::string> sort_names;
  std::map<std::string, std::string> var_names;
  std::map<std::string, Sort> var_sorts;
  std::map<std::string, std::string> function_names;
  SymbolIntern interns;

  std::string text() const { return body + "(check-sat)\n(get-model)\n"; }
  const ConstructorDecl* constructor(const std::string& smt_name,
                                     const DatatypeDecl** owner = nullptr) const;
  const DatatypeDecl* datatype(const Sort& s) const;
};

SmtScript emit_script(const SortedGoal& g, const TypeRegistry& reg,
                      const SymbolIntern& interns);

// infer_sorts, interning and emission in one step.
SmtScript lower_clause(const Clause& g, const TypeRegistry& reg,
                       const HintSpec& hints, SortedGoal* sorted = nullptr);

}  // namespace smtlink
