#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "smtlink/number.hpp"

namespace smtlink {

// Evaluation domain of the reference interpreter.
//
// Several variants denote the same object of the untyped logic: typed nils,
// an empty option, and an empty alist are all `nil`; an alist is a chain of
// conses of pairs; a present option is its payload.  acl2_equal() compares
// modulo those identifications, operator== compares representations.
class Value {
 public:
  enum class Kind { Bool, Int, Rat, Sym, Cons, NilTyped, Prod, Option, Alist };
  using Pair = std::pair<Value, Value>;

  static Value boolean(bool b);
  static Value nil() { return boolean(false); }
  static Value t() { return boolean(true); }
  // Int when integral, Rat otherwise.
  static Value number(Rational q);
  static Value integer(long n) { return number(Rational(n)); }
  static Value symbol(std::string name);
  static Value cons(Value car, Value cdr);
  static Value nil_typed(std::string type);
  static Value prod(std::string type, std::vector<Value> fields);
  static Value option(std::string type, std::optional<Value> payload);
  static Value alist(std::vector<Pair> entries);
  // Proper list built from `items`, terminated by plain nil.
  static Value list(const std::vector<Value>& items);

  Kind kind() const noexcept { return kind_; }
  bool is_number() const noexcept {
    return kind_ == Kind::Int || kind_ == Kind::Rat;
  }
  // nil in any of its typed guises.
  bool is_nil() const;
  bool bool_value() const noexcept { return flag_; }
  const Rational& number_value() const noexcept { return number_; }
  // Symbol name, or the type name of NilTyped/Prod/Option.
  const std::string& name() const noexcept { return text_; }
  const Value& car() const { return children_->at(0); }
  const Value& cdr() const { return children_->at(1); }
  const std::vector<Value>& fields() const { return *children_; }
  bool option_present() const noexcept { return flag_; }
  const Value& option_payload() const { return children_->at(0); }
  const std::vector<Pair>& entries() const { return *entries_; }

  // Views the value as a cons when it is one (including non-empty alists).
  std::optional<Pair> as_cons() const;

  std::string to_string() const;

  friend bool operator==(const Value& a, const Value& b);
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }

 private:
  Kind kind_ = Kind::Bool;
  bool flag_ = false;
  Rational number_;
  std::string text_;
  std::shared_ptr<const std::vector<Value>> children_;
  std::shared_ptr<const std::vector<Pair>> entries_;
};

// Equality of the denoted objects of the untyped logic.
bool acl2_equal(const Value& a, const Value& b);

// The number a value denotes in arithmetic: non-numbers count as 0.
Rational arith_fix(const Value& v);

}  // namespace smtlink
