#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smtlink/sexpr.hpp"
#include "smtlink/term.hpp"

namespace smtlink {

struct Arity {
  std::size_t min = 0;
  std::optional<std::size_t> max;  // nullopt: variadic

  bool accepts(std::size_t n) const { return n >= min && (!max || n <= *max); }
};

// Arity of a built-in function after alias resolution, if `name` is one.
std::optional<Arity> builtin_arity(std::string_view name);
// BINARY-+ -> +, ASSOC -> ASSOC-EQUAL, ...; identity for everything else.
std::string builtin_alias(std::string_view name);

enum class Primitive { Booleanp, Integerp, Rationalp, Symbolp };

const char* primitive_name(Primitive p);

struct FnDef {
  std::string name;
  std::vector<std::string> formals;
  Term body = Term::nil();
  // Computed from the body: the name occurs in it.
  bool recursive = false;
};

struct ProdField {
  std::string accessor;
  std::string recognizer;
};

struct ProdDef {
  std::string name;
  std::string recognizer;
  std::string constructor;
  std::vector<ProdField> fields;
};

struct ListDef {
  std::string name;
  std::string recognizer;
  std::string element_recognizer;
  bool true_listp = true;
};

struct AlistDef {
  std::string name;
  std::string recognizer;
  std::string key_recognizer;
  std::string value_recognizer;
};

struct OptionDef {
  std::string name;
  std::string recognizer;
  std::string some_constructor;
  std::string val_accessor;
  std::string base_recognizer;
};

using FtyTypeDef = std::variant<ProdDef, ListDef, AlistDef, OptionDef>;

const std::string& type_name(const FtyTypeDef& def);
const std::string& type_recognizer(const FtyTypeDef& def);

// Conventional FTY names derived from a type name.
ProdDef make_prod(std::string_view name,
                  const std::vector<std::pair<std::string, std::string>>& fields);
ListDef make_list(std::string_view name, std::string_view element_recognizer);
AlistDef make_alist(std::string_view name, std::string_view key_recognizer,
                    std::string_view value_recognizer);
OptionDef make_option(std::string_view name, std::string_view base_recognizer);

struct RecognizerKind {
  enum class Tag { Primitive, Prod, List, Alist, Option, NotARecognizer };
  Tag tag = Tag::NotARecognizer;
  Primitive primitive = Primitive::Booleanp;
  const FtyTypeDef* def = nullptr;

  bool is_recognizer() const { return tag != Tag::NotARecognizer; }
};

// What an FTY-generated function name does.
struct FtyRole {
  enum class Tag { Recognizer, Constructor, Accessor, SomeConstructor, ValAccessor };
  Tag tag = Tag::Recognizer;
  std::string type;
  std::size_t field = 0;
};

struct DefunForm {
  std::string name;
  std::vector<std::string> formals;
  SExpr body;
};

// The logical world: user functions and FTY-style types.  Registration
// returns a new registry; instances are never mutated once built.
class TypeRegistry {
 public:
  struct Options {
    // Treat `realp` as `rationalp`.
    bool realp_alias = false;
  };

  TypeRegistry() = default;
  explicit TypeRegistry(Options options) : options_(options) {}

  const Options& options() const noexcept { return options_; }

  const FnDef* function(std::string_view name) const;
  const std::map<std::string, FnDef, std::less<>>& functions() const noexcept {
    return functions_;
  }
  const FtyTypeDef* type(std::string_view type_name) const;
  const FtyTypeDef* type_of_recognizer(std::string_view recognizer) const;
  std::optional<FtyRole> fty_role(std::string_view name) const;
  const std::map<std::string, FtyTypeDef, std::less<>>& types() const noexcept {
    return types_;
  }
  // Registration order of types (dependency order).
  const std::vector<std::string>& type_order() const noexcept {
    return type_order_;
  }

  RecognizerKind recognizer_kind(std::string_view name) const;
  // Arity of any callable name: builtin, FTY-generated or user function.
  std::optional<Arity> arity(std::string_view name) const;
  bool name_in_use(std::string_view name) const;

  // Accepts a recognizer name or an FTY type name; returns the recognizer.
  std::optional<std::string> resolve_recognizer(std::string_view name) const;

  // Re-checks closure and naming invariants; throws on violation.
  void validate() const;

  friend TypeRegistry register_defuns(const TypeRegistry&,
                                      const std::vector<DefunForm>&);
  friend TypeRegistry register_fty_group(const TypeRegistry&,
                                         const std::vector<FtyTypeDef>&);

 private:
  void add_fty_names(const FtyTypeDef& def);

  Options options_;
  std::map<std::string, FnDef, std::less<>> functions_;
  std::map<std::string, FtyTypeDef, std::less<>> types_;
  std::vector<std::string> type_order_;
  std::map<std::string, std::string, std::less<>> recognizers_;
  std::map<std::string, FtyRole, std::less<>> fty_names_;
};

TypeRegistry register_defun(const TypeRegistry& reg, const std::string& name,
                            const std::vector<std::string>& formals,
                            const SExpr& body);
// Registers a clique at once; a call cycle through two or more of the new
// functions is rejected with MutualRecursion.
TypeRegistry register_defuns(const TypeRegistry& reg,
                             const std::vector<DefunForm>& forms);
TypeRegistry register_fty(const TypeRegistry& reg, const FtyTypeDef& def);
TypeRegistry register_fty_group(const TypeRegistry& reg,
                                const std::vector<FtyTypeDef>& defs);

RecognizerKind recognizer_kind(const TypeRegistry& reg, std::string_view name);

// Resolves a raw s-expression into a term.  When `variables` is given, only
// those names may appear as free variables.
Term sexpr_to_term(const SExpr& s, const TypeRegistry& reg,
                   const std::set<std::string>* variables = nullptr);

}  // namespace smtlink
