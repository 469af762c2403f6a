#include "smtlink/eval.hpp"

#include "smtlink/error.hpp"

namespace smtlink {

namespace {

Value truth(bool b) { return Value::boolean(b); }

Rational reciprocal(const Rational& q) {
  return q == 0 ? Rational(0) : Rational(1) / q;
}

Value power(const Rational& base, const Value& exponent) {
  if (exponent.kind() != Value::Kind::Int) return Value::integer(1);
  BigInt e = numerator_of(exponent.number_value());
  Rational acc = 1;
  BigInt n = e < 0 ? BigInt(-e) : e;
  for (BigInt i = 0; i < n; ++i) acc *= base;
  return Value::number(e < 0 ? reciprocal(acc) : acc);
}

Value car_of(const Value& v) {
  auto c = v.as_cons();
  return c ? c->first : Value::nil();
}

Value cdr_of(const Value& v) {
  auto c = v.as_cons();
  return c ? c->second : Value::nil();
}

Value acons(const Value& key, const Value& val, const Value& alist) {
  if (alist.kind() == Value::Kind::Alist ||
      (alist.is_nil() && !alist.as_cons())) {
    std::vector<Value::Pair> entries{{key, val}};
    if (alist.kind() == Value::Kind::Alist) {
      entries.insert(entries.end(), alist.entries().begin(),
                     alist.entries().end());
    }
    return Value::alist(std::move(entries));
  }
  return Value::cons(Value::cons(key, val), alist);
}

Value assoc_equal(const Value& key, const Value& alist) {
  if (alist.kind() == Value::Kind::Alist) {
    for (const auto& [k, v] : alist.entries()) {
      if (acl2_equal(k, key)) return Value::cons(k, v);
    }
    return Value::nil();
  }
  Value cur = alist;
  while (auto c = cur.as_cons()) {
    if (acl2_equal(car_of(c->first), key)) return c->first;
    cur = c->second;
  }
  return Value::nil();
}

class Evaluator {
 public:
  Evaluator(const Env& env, const TypeRegistry& reg) : env_(env), reg_(reg) {}

  Value eval(const Term& t, std::size_t fuel) {
    switch (t.kind()) {
      case Term::Kind::Var: {
        auto it = env_.find(t.name());
        if (it == env_.end()) {
          throw Error(ErrorKind::UnboundVar, "unbound variable " + t.name());
        }
        return it->second;
      }
      case Term::Kind::Const: {
        const Constant& c = t.constant();
        switch (c.kind()) {
          case Constant::Kind::Bool: return truth(c.bool_value());
          case Constant::Kind::Int:
          case Constant::Kind::Rat: return Value::number(c.number_value());
          case Constant::Kind::Sym: return Value::symbol(c.symbol_name());
        }
        break;
      }
      case Term::Kind::TypeHyp: {
        for (const auto& item : t.args()) {
          if (eval(item, fuel).is_nil()) return Value::nil();
        }
        return Value::t();
      }
      case Term::Kind::Fix: {
        Value v = eval(t.operand(), fuel);
        if (v.is_nil()) return Value::nil();
        const FtyTypeDef* def = reg_.type(t.name());
        if (!def) return v;
        const std::string& rec = type_recognizer(*def);
        return recognizes(reg_, rec, v) ? v : default_value(reg_, rec);
      }
      case Term::Kind::App:
        return apply(t, fuel);
    }
    return Value::nil();
  }

 private:
  std::vector<Value> eval_args(const Term& t, std::size_t fuel) {
    std::vector<Value> out;
    out.reserve(t.args().size());
    for (const auto& a : t.args()) out.push_back(eval(a, fuel));
    return out;
  }

  Value apply(const Term& t, std::size_t fuel) {
    const std::string& fn = t.name();
    // Lazy forms first.
    if (fn == "IF") {
      return eval(t.arg(0), fuel).is_nil() ? eval(t.arg(2), fuel)
                                           : eval(t.arg(1), fuel);
    }
    if (fn == "AND") {
      Value last = Value::t();
      for (const auto& a : t.args()) {
        last = eval(a, fuel);
        if (last.is_nil()) return Value::nil();
      }
      return last;
    }
    if (fn == "OR") {
      for (const auto& a : t.args()) {
        Value v = eval(a, fuel);
        if (!v.is_nil()) return v;
      }
      return Value::nil();
    }
    if (fn == "IMPLIES") {
      if (eval(t.arg(0), fuel).is_nil()) return Value::t();
      return truth(!eval(t.arg(1), fuel).is_nil());
    }
    if (fn == "HINT-PLEASE") return Value::nil();

    if (const FnDef* def = reg_.function(fn)) {
      if (fuel == 0) {
        throw Error(ErrorKind::FuelExhausted, "fuel exhausted in " + fn);
      }
      std::vector<Value> args = eval_args(t, fuel);
      Env local;
      for (std::size_t i = 0; i < def->formals.size(); ++i) {
        local.emplace(def->formals[i], args[i]);
      }
      Evaluator inner(local, reg_);
      return inner.eval(def->body, fuel - 1);
    }

    std::vector<Value> a = eval_args(t, fuel);
    if (auto role = reg_.fty_role(fn)) return apply_fty(*role, fn, a);
    if (fn == "+") {
      Rational s = 0;
      for (const auto& v : a) s += arith_fix(v);
      return Value::number(s);
    }
    if (fn == "*") {
      Rational p = 1;
      for (const auto& v : a) p *= arith_fix(v);
      return Value::number(p);
    }
    if (fn == "-") {
      if (a.size() == 1) return Value::number(-arith_fix(a[0]));
      return Value::number(arith_fix(a[0]) - arith_fix(a[1]));
    }
    if (fn == "/") {
      if (a.size() == 1) return Value::number(reciprocal(arith_fix(a[0])));
      return Value::number(arith_fix(a[0]) * reciprocal(arith_fix(a[1])));
    }
    if (fn == "^") return power(arith_fix(a[0]), a[1]);
    if (fn == "<") return truth(arith_fix(a[0]) < arith_fix(a[1]));
    if (fn == "<=") return truth(arith_fix(a[0]) <= arith_fix(a[1]));
    if (fn == ">") return truth(arith_fix(a[0]) > arith_fix(a[1]));
    if (fn == ">=") return truth(arith_fix(a[0]) >= arith_fix(a[1]));
    if (fn == "=") return truth(arith_fix(a[0]) == arith_fix(a[1]));
    if (fn == "/=") return truth(arith_fix(a[0]) != arith_fix(a[1]));
    if (fn == "NOT") return truth(a[0].is_nil());
    if (fn == "IFF") return truth(a[0].is_nil() == a[1].is_nil());
    if (fn == "EQUAL") return truth(acl2_equal(a[0], a[1]));
    if (fn == "BOOLEANP" || fn == "INTEGERP" || fn == "RATIONALP" ||
        fn == "SYMBOLP") {
      return truth(recognizes(reg_, fn, a[0]));
    }
    if (fn == "CONS") return Value::cons(a[0], a[1]);
    if (fn == "CAR") return car_of(a[0]);
    if (fn == "CDR") return cdr_of(a[0]);
    if (fn == "CONSP") return truth(a[0].as_cons().has_value());
    if (fn == "ACONS") return acons(a[0], a[1], a[2]);
    if (fn == "ASSOC-EQUAL") return assoc_equal(a[0], a[1]);
    throw Error(ErrorKind::UnknownFunction, "cannot evaluate " + fn);
  }

  Value apply_fty(const FtyRole& role, const std::string& fn,
                  const std::vector<Value>& a) {
    const FtyTypeDef& def = *reg_.type(role.type);
    switch (role.tag) {
      case FtyRole::Tag::Recognizer:
        return truth(recognizes(reg_, fn, a[0]));
      case FtyRole::Tag::Constructor: {
        const auto& prod = std::get<ProdDef>(def);
        std::vector<Value> fields;
        for (std::size_t i = 0; i < prod.fields.size(); ++i) {
          const auto& rec = prod.fields[i].recognizer;
          fields.push_back(recognizes(reg_, rec, a[i]) ? a[i]
                                                       : default_value(reg_, rec));
        }
        return Value::prod(prod.name, std::move(fields));
      }
      case FtyRole::Tag::Accessor: {
        const auto& prod = std::get<ProdDef>(def);
        if (a[0].kind() == Value::Kind::Prod && a[0].name() == prod.name) {
          return a[0].fields()[role.field];
        }
        return default_value(reg_, prod.fields[role.field].recognizer);
      }
      case FtyRole::Tag::SomeConstructor: {
        const auto& opt = std::get<OptionDef>(def);
        Value payload = recognizes(reg_, opt.base_recognizer, a[0])
                            ? a[0]
                            : default_value(reg_, opt.base_recognizer);
        return Value::option(opt.name, payload);
      }
      case FtyRole::Tag::ValAccessor: {
        const auto& opt = std::get<OptionDef>(def);
        const Value& v = a[0];
        if (v.kind() == Value::Kind::Option) {
          if (v.option_present()) return v.option_payload();
        } else if (!v.is_nil() && recognizes(reg_, opt.base_recognizer, v)) {
          return v;
        }
        return default_value(reg_, opt.base_recognizer);
      }
    }
    return Value::nil();
  }

  const Env& env_;
  const TypeRegistry& reg_;
};

}  // namespace

Value eval_term(const Term& t, const Env& env, const TypeRegistry& reg,
                std::size_t fuel) {
  return Evaluator(env, reg).eval(t, fuel);
}

bool clause_eval(const Clause& c, const Env& env, const TypeRegistry& reg,
                 std::size_t fuel) {
  for (const auto& d : c.disjuncts()) {
    if (!eval_term(d, env, reg, fuel).is_nil()) return true;
  }
  return false;
}

bool recognizes(const TypeRegistry& reg, const std::string& recognizer,
                const Value& v) {
  RecognizerKind k = reg.recognizer_kind(recognizer);
  switch (k.tag) {
    case RecognizerKind::Tag::Primitive:
      switch (k.primitive) {
        case Primitive::Booleanp:
          return v.kind() == Value::Kind::Bool || v.is_nil();
        case Primitive::Integerp:
          return v.kind() == Value::Kind::Int;
        case Primitive::Rationalp:
          return v.is_number();
        case Primitive::Symbolp:
          return v.kind() == Value::Kind::Sym || v.kind() == Value::Kind::Bool ||
                 v.is_nil();
      }
      return false;
    case RecognizerKind::Tag::List: {
      const auto& def = std::get<ListDef>(*k.def);
      Value cur = v;
      while (auto c = cur.as_cons()) {
        if (!recognizes(reg, def.element_recognizer, c->first)) return false;
        cur = c->second;
      }
      return cur.is_nil();
    }
    case RecognizerKind::Tag::Alist: {
      const auto& def = std::get<AlistDef>(*k.def);
      Value cur = v;
      while (auto c = cur.as_cons()) {
        auto pair = c->first.as_cons();
        if (!pair || !recognizes(reg, def.key_recognizer, pair->first) ||
            !recognizes(reg, def.value_recognizer, pair->second)) {
          return false;
        }
        cur = c->second;
      }
      return cur.is_nil();
    }
    case RecognizerKind::Tag::Option: {
      const auto& def = std::get<OptionDef>(*k.def);
      if (v.is_nil()) return true;
      if (v.kind() == Value::Kind::Option) {
        return v.name() == def.name &&
               recognizes(reg, def.base_recognizer, v.option_payload());
      }
      return recognizes(reg, def.base_recognizer, v);
    }
    case RecognizerKind::Tag::Prod: {
      const auto& def = std::get<ProdDef>(*k.def);
      if (v.kind() != Value::Kind::Prod || v.name() != def.name ||
          v.fields().size() != def.fields.size()) {
        return false;
      }
      for (std::size_t i = 0; i < def.fields.size(); ++i) {
        if (!recognizes(reg, def.fields[i].recognizer, v.fields()[i])) {
          return false;
        }
      }
      return true;
    }
    case RecognizerKind::Tag::NotARecognizer:
      break;
  }
  throw Error(ErrorKind::UnknownRecognizer, "not a recognizer: " + recognizer);
}

Value default_value(const TypeRegistry& reg, const std::string& recognizer) {
  RecognizerKind k = reg.recognizer_kind(recognizer);
  switch (k.tag) {
    case RecognizerKind::Tag::Primitive:
      if (k.primitive == Primitive::Integerp ||
          k.primitive == Primitive::Rationalp) {
        return Value::integer(0);
      }
      return Value::nil();
    case RecognizerKind::Tag::Prod: {
      const auto& def = std::get<ProdDef>(*k.def);
      std::vector<Value> fields;
      for (const auto& f : def.fields) {
        fields.push_back(default_value(reg, f.recognizer));
      }
      return Value::prod(def.name, std::move(fields));
    }
    case RecognizerKind::Tag::List:
    case RecognizerKind::Tag::Alist:
    case RecognizerKind::Tag::Option:
      return Value::nil();
    case RecognizerKind::Tag::NotARecognizer:
      break;
  }
  throw Error(ErrorKind::UnknownRecognizer, "not a recognizer: " + recognizer);
}

}  // namespace smtlink
