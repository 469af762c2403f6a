#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "smtlink/number.hpp"

namespace smtlink {

// A literal in the untyped logic: t/nil, an exact number, or a quoted symbol.
class Constant {
 public:
  enum class Kind { Bool, Int, Rat, Sym };

  static Constant boolean(bool value);
  // Integral values become Int, everything else Rat.
  static Constant number(Rational value);
  static Constant symbol(std::string name);

  Kind kind() const noexcept { return kind_; }
  bool is_bool() const noexcept { return kind_ == Kind::Bool; }
  bool is_number() const noexcept {
    return kind_ == Kind::Int || kind_ == Kind::Rat;
  }
  bool bool_value() const noexcept { return bool_; }
  const Rational& number_value() const noexcept { return number_; }
  const std::string& symbol_name() const noexcept { return symbol_; }

  friend bool operator==(const Constant& a, const Constant& b);
  friend bool operator<(const Constant& a, const Constant& b);

 private:
  Kind kind_ = Kind::Bool;
  bool bool_ = false;
  Rational number_;
  std::string symbol_;
};

enum class MarkerTag { Type, Return };

const char* marker_keyword(MarkerTag tag);

// Immutable, structurally shared first-order term.
class Term {
 public:
  enum class Kind { Var, Const, App, TypeHyp, Fix };

  // nil
  Term();

  static Term var(std::string name);
  static Term constant(Constant c);
  static Term app(std::string fn, std::vector<Term> args);
  static Term type_hyp(std::vector<Term> items, MarkerTag tag);
  static Term fix(Term operand, std::string type_name);

  static Term t();
  static Term nil();
  static Term integer(long value);
  static Term number(Rational value);
  static Term quoted(std::string symbol);

  Kind kind() const noexcept;
  bool is_var() const noexcept { return kind() == Kind::Var; }
  bool is_const() const noexcept { return kind() == Kind::Const; }
  bool is_app() const noexcept { return kind() == Kind::App; }
  bool is_app(std::string_view fn) const noexcept;
  bool is_type_hyp() const noexcept { return kind() == Kind::TypeHyp; }
  bool is_type_hyp(MarkerTag tag) const noexcept;
  bool is_fix() const noexcept { return kind() == Kind::Fix; }
  bool is_nil() const noexcept;
  bool is_t() const noexcept;

  // Variable name, function name, or the fixing type of a Fix node.
  const std::string& name() const noexcept;
  const Constant& constant() const noexcept;
  // Application arguments or marker items.
  const std::vector<Term>& args() const noexcept;
  const Term& arg(std::size_t i) const { return args().at(i); }
  MarkerTag tag() const noexcept;
  const Term& operand() const noexcept;

  std::size_t node_count() const noexcept;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }
  friend bool operator<(const Term& a, const Term& b);

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

// A disjunction of terms; never empty.
class Clause {
 public:
  explicit Clause(std::vector<Term> disjuncts);

  const std::vector<Term>& disjuncts() const noexcept { return disjuncts_; }
  std::size_t size() const noexcept { return disjuncts_.size(); }
  const Term& operator[](std::size_t i) const { return disjuncts_.at(i); }

  friend bool operator==(const Clause& a, const Clause& b) {
    return a.disjuncts_ == b.disjuncts_;
  }

 private:
  std::vector<Term> disjuncts_;
};

// (not x), folding (not (not y)) to y.
Term negate(const Term& t);
Term make_not(const Term& t);
Term make_and(std::vector<Term> conjuncts);
Term make_or(std::vector<Term> disjuncts);
// The clause as a single term, (OR d1 ... dn).
Term clause_term(const Clause& c);
// ¬a ∨ b as a clause: [(not (or a...)), b...].
Clause implication_clause(const Clause& antecedent, const Clause& consequent);

std::set<std::string> free_vars(const Term& t);
std::set<std::string> free_vars(const Clause& c);
Term substitute(const Term& t, const std::map<std::string, Term>& binding);
// Pre-order visit; return false from the visitor to skip children.
void visit(const Term& t, const std::function<bool(const Term&)>& visitor);
bool occurs_fn(const Term& t, std::string_view fn);
std::size_t count_calls(const Term& t, std::string_view fn);

// Flat rendering with upper-case symbols, e.g. (< Y 1).
std::string print_term(const Term& t);
std::string print_clause(const Clause& c);
// Line-broken rendering for listings; re-parses to the same term.
std::string print_term_pretty(const Term& t, std::size_t width = 78);
std::string print_clause_pretty(const Clause& c, std::size_t width = 78);

inline std::ostream& operator<<(std::ostream& out, const Term& t) {
  return out << print_term(t);
}

// Upper-case canonical form of an identifier.
std::string canonical_name(std::string_view name);

}  // namespace smtlink
