#include "smtlink/value.hpp"

namespace smtlink {

Value Value::boolean(bool b) {
  Value v;
  v.kind_ = Kind::Bool;
  v.flag_ = b;
  return v;
}

Value Value::number(Rational q) {
  Value v;
  v.kind_ = is_integral(q) ? Kind::Int : Kind::Rat;
  v.number_ = std::move(q);
  return v;
}

Value Value::symbol(std::string name) {
  Value v;
  v.kind_ = Kind::Sym;
  v.text_ = std::move(name);
  return v;
}

Value Value::cons(Value car, Value cdr) {
  Value v;
  v.kind_ = Kind::Cons;
  v.children_ = std::make_shared<const std::vector<Value>>(
      std::vector<Value>{std::move(car), std::move(cdr)});
  return v;
}

Value Value::nil_typed(std::string type) {
  Value v;
  v.kind_ = Kind::NilTyped;
  v.text_ = std::move(type);
  return v;
}

Value Value::prod(std::string type, std::vector<Value> fields) {
  Value v;
  v.kind_ = Kind::Prod;
  v.text_ = std::move(type);
  v.children_ = std::make_shared<const std::vector<Value>>(std::move(fields));
  return v;
}

Value Value::option(std::string type, std::optional<Value> payload) {
  Value v;
  v.kind_ = Kind::Option;
  v.text_ = std::move(type);
  v.flag_ = payload.has_value();
  std::vector<Value> kids;
  if (payload) kids.push_back(std::move(*payload));
  v.children_ = std::make_shared<const std::vector<Value>>(std::move(kids));
  return v;
}

Value Value::alist(std::vector<Pair> entries) {
  Value v;
  v.kind_ = Kind::Alist;
  v.entries_ = std::make_shared<const std::vector<Pair>>(std::move(entries));
  return v;
}

Value Value::list(const std::vector<Value>& items) {
  Value out = nil();
  for (auto it = items.rbegin(); it != items.rend(); ++it) out = cons(*it, out);
  return out;
}

bool Value::is_nil() const {
  switch (kind_) {
    case Kind::Bool: return !flag_;
    case Kind::NilTyped: return true;
    case Kind::Option: return !flag_ || option_payload().is_nil();
    case Kind::Alist: return entries_->empty();
    default: return false;
  }
}

std::optional<Value::Pair> Value::as_cons() const {
  if (kind_ == Kind::Cons) return Pair{car(), cdr()};
  if (kind_ == Kind::Option && flag_) return option_payload().as_cons();
  if (kind_ == Kind::Alist && !entries_->empty()) {
    std::vector<Pair> rest(entries_->begin() + 1, entries_->end());
    return Pair{cons(entries_->front().first, entries_->front().second),
                alist(std::move(rest))};
  }
  return std::nullopt;
}

namespace {

std::string list_text(const Value& v) {
  std::string out = "(";
  Value cur = v;
  bool first = true;
  for (;;) {
    auto c = cur.as_cons();
    if (!c) break;
    if (!first) out += ' ';
    first = false;
    out += c->first.to_string();
    cur = c->second;
  }
  if (!cur.is_nil()) out += " . " + cur.to_string();
  return out + ")";
}

}  // namespace

std::string Value::to_string() const {
  switch (kind_) {
    case Kind::Bool: return flag_ ? "T" : "NIL";
    case Kind::Int:
    case Kind::Rat: return rational_text(number_);
    case Kind::Sym: return text_;
    case Kind::NilTyped: return "NIL";
    case Kind::Cons:
    case Kind::Alist: return is_nil() ? "NIL" : list_text(*this);
    case Kind::Prod: {
      std::string out = "(" + text_;
      for (const auto& f : *children_) out += " " + f.to_string();
      return out + ")";
    }
    case Kind::Option:
      return flag_ ? option_payload().to_string() : "NIL";
  }
  return {};
}

bool operator==(const Value& a, const Value& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Value::Kind::Bool: return a.flag_ == b.flag_;
    case Value::Kind::Int:
    case Value::Kind::Rat: return a.number_ == b.number_;
    case Value::Kind::Sym:
    case Value::Kind::NilTyped: return a.text_ == b.text_;
    case Value::Kind::Cons:
    case Value::Kind::Prod:
      return a.text_ == b.text_ && *a.children_ == *b.children_;
    case Value::Kind::Option:
      return a.text_ == b.text_ && a.flag_ == b.flag_ &&
             *a.children_ == *b.children_;
    case Value::Kind::Alist: return *a.entries_ == *b.entries_;
  }
  return false;
}

bool acl2_equal(const Value& a, const Value& b) {
  if (a.is_nil() || b.is_nil()) return a.is_nil() && b.is_nil();
  if (a.kind() == Value::Kind::Option) {
    return acl2_equal(a.option_payload(), b);
  }
  if (b.kind() == Value::Kind::Option) {
    return acl2_equal(a, b.option_payload());
  }
  auto ca = a.as_cons();
  auto cb = b.as_cons();
  if (ca || cb) {
    return ca && cb && acl2_equal(ca->first, cb->first) &&
           acl2_equal(ca->second, cb->second);
  }
  if (a.kind() == Value::Kind::Prod || b.kind() == Value::Kind::Prod) {
    if (a.kind() != b.kind() || a.name() != b.name()) return false;
    if (a.fields().size() != b.fields().size()) return false;
    for (std::size_t i = 0; i < a.fields().size(); ++i) {
      if (!acl2_equal(a.fields()[i], b.fields()[i])) return false;
    }
    return true;
  }
  return a == b;
}

Rational arith_fix(const Value& v) {
  return v.is_number() ? v.number_value() : Rational(0);
}

}  // namespace smtlink
