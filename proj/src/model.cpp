#include "smtlink/model.hpp"

#include <set>

#include "smtlink/error.hpp"
#include "smtlink/eval.hpp"
#include "smtlink/sexpr.hpp"

namespace smtlink {

bool Counterexample::evaluable() const {
  for (const auto& [n, v] : bindings) {
    if (v.kind != CexValue::Kind::Exact) return false;
  }
  return true;
}

const char* to_string(CexCheck::Kind k) {
  switch (k) {
    case CexCheck::Kind::Confirmed: return "confirmed";
    case CexCheck::Kind::NotEvaluable: return "not-evaluable";
    case CexCheck::Kind::Spurious: return "spurious";
  }
  return "";
}

namespace {

[[noreturn]] void model_error(const std::string& what, const SExpr& at) {
  throw Error(ErrorKind::ModelParseError, what + " at " + at.to_string(),
              at.offset());
}

// Raised while lifting a value that has no finite alist reading.
struct Opaque {};

struct DefineFun {
  std::vector<std::string> params;
  SExpr body;
};

const FtyTypeDef& type_def(const TypeRegistry& reg, const std::string& type) {
  const FtyTypeDef* d = reg.type(type);
  if (!d) throw Error(ErrorKind::Contract, "unregistered type " + type);
  return *d;
}

Sort key_sort(const TypeRegistry& reg, const Sort& s) {
  return sort_of_recognizer(reg, std::get<AlistDef>(type_def(reg, s.type)).key_recognizer,
                            false);
}

Sort value_sort(const TypeRegistry& reg, const Sort& s) {
  return sort_of_recognizer(
      reg, std::get<AlistDef>(type_def(reg, s.type)).value_recognizer, false);
}

Rational lift_number(const SExpr& s) {
  if (s.is_number()) return s.value();
  if (s.head_is("-") && s.size() == 2) return -lift_number(s[1]);
  if (s.head_is("-") && s.size() == 3) return lift_number(s[1]) - lift_number(s[2]);
  if (s.head_is("/") && s.size() == 3) {
    Rational d = lift_number(s[2]);
    if (d == 0) model_error("division by zero in model value", s);
    return lift_number(s[1]) / d;
  }
  if (s.head_is("to_real") && s.size() == 2) return lift_number(s[1]);
  if (s.head_is("+")) {
    Rational sum = 0;
    for (std::size_t i = 1; i < s.size(); ++i) sum += lift_number(s[i]);
    return sum;
  }
  model_error("not an exact number", s);
}

class Lifter {
 public:
  Lifter(const SmtScript& script, const TypeRegistry& reg,
         const std::map<std::string, DefineFun>& defs)
      : script_(script), reg_(reg), defs_(defs) {}

  Value lift(const SExpr& raw, const Sort& sort) {
    const SExpr& s = strip(raw);
    switch (sort.kind) {
      case Sort::Kind::Bool:
        if (s.is_symbol("true")) return Value::t();
        if (s.is_symbol("false")) return Value::nil();
        model_error("not a Boolean", s);
      case Sort::Kind::Int:
      case Sort::Kind::Real:
        return Value::number(lift_number(s));
      case Sort::Kind::Sym: {
        if (s.is_list() && s.size() == 2 && s[0].is_symbol("sym_intern")) {
          Rational idx = lift_number(s[1]);
          if (!is_integral(idx)) model_error("fractional symbol index", s);
          return Value::symbol(script_.interns.lift(numerator_of(idx)));
        }
        model_error("not a symbol value", s);
      }
      case Sort::Kind::Array:
        return lift_array(s, sort);
      case Sort::Kind::Datatype:
      case Sort::Kind::Pair:
        return lift_datatype(s, sort);
    }
    model_error("unsupported sort", s);
  }

 private:
  static const SExpr& strip(const SExpr& s) {
    if (s.head_is("as") && s.size() == 3) return strip(s[1]);
    return s;
  }

  Value lift_datatype(const SExpr& s, const Sort& sort) {
    std::string name;
    std::vector<SExpr> args;
    if (s.is_symbol()) {
      name = s.text();
    } else if (s.is_list() && s.size() >= 1 && s[0].is_symbol()) {
      name = s[0].text();
      args.assign(s.items().begin() + 1, s.items().end());
    } else {
      model_error("not a constructor application", s);
    }
    const DatatypeDecl* owner = nullptr;
    const ConstructorDecl* c = script_.constructor(name, &owner);
    if (!c || c->fields.size() != args.size()) {
      model_error("unknown constructor " + name, s);
    }
    using Role = ConstructorDecl::Role;
    switch (c->role) {
      case Role::ListCons:
        return Value::cons(lift(args[0], c->fields[0].second), lift(args[1], sort));
      case Role::ListNil:
      case Role::PairNil:
        return Value::nil();
      case Role::OptionSome:
        return Value::option(sort.type, lift(args[0], c->fields[0].second));
      case Role::OptionNil:
        return Value::option(sort.type, std::nullopt);
      case Role::Prod: {
        std::vector<Value> fields;
        for (std::size_t i = 0; i < args.size(); ++i) {
          fields.push_back(lift(args[i], c->fields[i].second));
        }
        return Value::prod(sort.type, std::move(fields));
      }
      case Role::PairCons:
        return Value::cons(lift(args[0], c->fields[0].second),
                           lift(args[1], c->fields[1].second));
      case Role::Symbol:
        break;
    }
    model_error("unexpected constructor " + name, s);
  }

  bool is_pair_nil(const SExpr& raw) const {
    const SExpr& s = strip(raw);
    if (!s.is_symbol()) return false;
    const ConstructorDecl* c = script_.constructor(s.text());
    return c && c->role == ConstructorDecl::Role::PairNil;
  }

  // Entries most recent first, as an acons chain would hold them.
  Value lift_array(const SExpr& s, const Sort& sort) {
    std::vector<Value::Pair> entries;
    std::vector<Value> seen_keys;
    Sort pair = Sort::pair(sort.type);
    Sort key = key_sort(reg_, sort);
    auto add = [&](const SExpr& k, const SExpr& v) {
      Value kv = lift(k, key);
      for (const auto& seen : seen_keys) {
        if (seen == kv) return;
      }
      seen_keys.push_back(kv);
      if (is_pair_nil(v)) return;
      Value p = lift(v, pair);
      auto c = p.as_cons();
      if (!c) throw Opaque{};
      entries.emplace_back(c->first, c->second);
    };
    const SExpr* cur = &s;
    for (;;) {
      const SExpr& node = strip(*cur);
      if (node.head_is("store") && node.size() == 4) {
        add(node[2], node[3]);
        cur = &node[1];
        continue;
      }
      if (node.is_list() && node.size() == 2 && node[0].head_is("as") &&
          node[0].size() == 3 && node[0][1].is_symbol("const")) {
        if (!is_pair_nil(node[1])) throw Opaque{};
        break;
      }
      if (node.is_list() && node.size() == 3 && node[0].is_symbol("_") &&
          node[1].is_symbol("as-array") && node[2].is_symbol()) {
        auto it = defs_.find(node[2].text());
        if (it == defs_.end() || it->second.params.size() != 1) throw Opaque{};
        const std::string& param = it->second.params[0];
        const SExpr* body = &it->second.body;
        while (body->head_is("ite") && body->size() == 4) {
          const SExpr& test = (*body)[1];
          if (!test.head_is("=") || test.size() != 3) throw Opaque{};
          const SExpr& k = test[1].is_symbol(param) ? test[2] : test[1];
          if (!test[1].is_symbol(param) && !test[2].is_symbol(param)) throw Opaque{};
          add(k, (*body)[2]);
          body = &(*body)[3];
        }
        if (!is_pair_nil(*body)) throw Opaque{};
        break;
      }
      throw Opaque{};
    }
    return Value::alist(std::move(entries));
  }

  const SmtScript& script_;
  const TypeRegistry& reg_;
  const std::map<std::string, DefineFun>& defs_;
};

Value default_for(const Sort& s, const TypeRegistry& reg, const SymbolIntern& si) {
  switch (s.kind) {
    case Sort::Kind::Bool: return Value::nil();
    case Sort::Kind::Int:
    case Sort::Kind::Real: return Value::integer(0);
    case Sort::Kind::Sym: return Value::symbol(si.lift(BigInt(si.size())));
    case Sort::Kind::Array: return Value::alist({});
    case Sort::Kind::Pair: return Value::nil();
    case Sort::Kind::Datatype: {
      const FtyTypeDef& d = type_def(reg, s.type);
      if (std::holds_alternative<OptionDef>(d)) return Value::option(s.type, std::nullopt);
      return default_value(reg, type_recognizer(d));
    }
  }
  return Value::nil();
}

RootObj root_from(const SExpr& poly, const SExpr& index, const TypeRegistry& reg) {
  // Reading the polynomial back with case folding yields upper-case names.
  SExpr folded = parse_sexpr(poly.to_string()).expr;
  std::set<std::string> vars;
  {
    std::vector<const SExpr*> stack{&folded};
    while (!stack.empty()) {
      const SExpr* e = stack.back();
      stack.pop_back();
      if (e->is_symbol() && e->text() != "T" && e->text() != "NIL" &&
          !reg.arity(builtin_alias(e->text()))) {
        vars.insert(e->text());
      }
      if (e->is_list()) {
        for (std::size_t i = 1; i < e->size(); ++i) stack.push_back(&(*e)[i]);
      }
    }
  }
  if (vars.size() > 1) model_error("root object is not univariate", poly);
  Term t = sexpr_to_term(folded, reg, &vars);
  if (!index.is_number() || !is_integral(index.value())) {
    model_error("bad root index", index);
  }
  return RootObj{t, numerator_of(index.value())};
}

std::string quote_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

// Inlines (let ((a!1 e) ...) body) so the lifter only sees values.
SExpr expand_lets(const SExpr& s, const std::map<std::string, SExpr>& env) {
  if (s.is_symbol()) {
    auto it = env.find(s.text());
    return it == env.end() ? s : it->second;
  }
  if (!s.is_list()) return s;
  if (s.head_is("let") && s.size() == 3 && s[1].is_list()) {
    std::map<std::string, SExpr> inner = env;
    for (const auto& b : s[1].items()) {
      if (!b.is_list() || b.size() != 2 || !b[0].is_symbol()) {
        model_error("bad let binding", b);
      }
      inner.insert_or_assign(b[0].text(), expand_lets(b[1], env));
    }
    return expand_lets(s[2], inner);
  }
  std::vector<SExpr> items;
  for (const auto& i : s.items()) items.push_back(expand_lets(i, env));
  return SExpr::list(std::move(items), s.offset());
}

Counterexample parse_model(const std::string& raw, const SmtScript& script,
                           const TypeRegistry& reg,
                           const std::set<std::string>& goal_vars) {
  std::vector<SExpr> forms;
  try {
    forms = parse_all(raw, ReadOptions{false});
  } catch (const Error& e) {
    throw Error(ErrorKind::ModelParseError, std::string("unreadable model: ") + e.what(),
                e.offset());
  }
  std::vector<SExpr> items;
  for (const auto& f : forms) {
    if (f.head_is("define-fun")) {
      items.push_back(f);
    } else if (f.is_list()) {
      std::size_t start = f.head_is("model") ? 1 : 0;
      for (std::size_t i = start; i < f.size(); ++i) items.push_back(f[i]);
    } else {
      model_error("unexpected model text", f);
    }
  }
  std::map<std::string, DefineFun> defs;
  for (const auto& it : items) {
    if (it.head_is("declare-fun") || it.head_is("declare-sort") ||
        it.head_is("declare-datatypes")) {
      continue;
    }
    if (!it.head_is("define-fun") || it.size() != 5 || !it[1].is_symbol() ||
        !it[2].is_list()) {
      model_error("expected define-fun", it);
    }
    DefineFun d{{}, expand_lets(it[4], {})};
    for (const auto& p : it[2].items()) {
      if (!p.is_list() || p.size() != 2 || !p[0].is_symbol()) {
        model_error("bad parameter", p);
      }
      d.params.push_back(p[0].text());
    }
    defs.emplace(it[1].text(), std::move(d));
  }
  Counterexample cex;
  Lifter lifter(script, reg, defs);
  for (const auto& [var, smt] : script.var_names) {
    const Sort& sort = script.var_sorts.at(var);
    auto it = defs.find(smt);
    if (it == defs.end() || !it->second.params.empty()) {
      cex.bindings[var] = CexValue::exact(default_for(sort, reg, script.interns));
      cex.defaulted.push_back(var);
      continue;
    }
    const SExpr& body = it->second.body;
    if (body.head_is("root-obj") && body.size() == 3 &&
        sort.kind == Sort::Kind::Real) {
      cex.bindings[var] = CexValue::root_obj(root_from(body[1], body[2], reg));
      continue;
    }
    try {
      cex.bindings[var] = CexValue::exact(lifter.lift(body, sort));
    } catch (const Opaque&) {
      cex.bindings[var] = CexValue::opaque(body.to_string());
    }
  }
  for (const auto& v : goal_vars) {
    if (!cex.bindings.count(v)) {
      cex.bindings[v] = CexValue::exact(Value::nil());
      cex.defaulted.push_back(v);
    }
  }
  return cex;
}

std::string print_value(const Value& v, const Sort& sort, const TypeRegistry& reg) {
  switch (sort.kind) {
    case Sort::Kind::Bool:
      return v.is_nil() ? "NIL" : "T";
    case Sort::Kind::Int:
    case Sort::Kind::Real:
      return rational_text(v.is_number() ? v.number_value() : Rational(0));
    case Sort::Kind::Sym:
      return "'" + v.name();
    case Sort::Kind::Pair: {
      auto c = v.as_cons();
      if (!c) return "NIL";
      Sort a = Sort::array(sort.type);
      return "(CONS " + print_value(c->first, key_sort(reg, a), reg) + " " +
             print_value(c->second, value_sort(reg, a), reg) + ")";
    }
    case Sort::Kind::Array: {
      std::string out;
      std::string close;
      for (const auto& [k, val] : v.entries()) {
        out += "(ACONS " + print_value(k, key_sort(reg, sort), reg) + " " +
               print_value(val, value_sort(reg, sort), reg) + " ";
        close += ")";
      }
      return out + "NIL" + close;
    }
    case Sort::Kind::Datatype:
      break;
  }
  const FtyTypeDef& def = type_def(reg, sort.type);
  if (const auto* l = std::get_if<ListDef>(&def)) {
    Sort e = sort_of_recognizer(reg, l->element_recognizer, false);
    std::string out;
    std::string close;
    Value cur = v;
    while (auto c = cur.as_cons()) {
      out += "(CONS " + print_value(c->first, e, reg) + " ";
      close += ")";
      cur = c->second;
    }
    return out + "NIL" + close;
  }
  if (const auto* o = std::get_if<OptionDef>(&def)) {
    if (v.kind() != Value::Kind::Option || !v.option_present()) return "NIL";
    return "(" + o->some_constructor + " " +
           print_value(v.option_payload(),
                       sort_of_recognizer(reg, o->base_recognizer, false), reg) +
           ")";
  }
  const auto& p = std::get<ProdDef>(def);
  std::string out = "(" + p.constructor;
  for (std::size_t i = 0; i < p.fields.size(); ++i) {
    out += " " + print_value(v.fields().at(i),
                             sort_of_recognizer(reg, p.fields[i].recognizer, false),
                             reg);
  }
  return out + ")";
}

std::string print_counterexample(const Counterexample& cex,
                                 const std::map<std::string, Sort>& sorts,
                                 const TypeRegistry& reg) {
  std::string out = "(";
  bool first = true;
  for (const auto& [var, val] : cex.bindings) {
    if (!first) out += ' ';
    first = false;
    out += "(" + var + " ";
    switch (val.kind) {
      case CexValue::Kind::Root:
        out += "(CEX-ROOT-OBJ " + var + " " + print_term(val.root->polynomial) +
               " " + val.root->index.str() + ")";
        break;
      case CexValue::Kind::Opaque:
        out += "(CEX-OPAQUE " + quote_string(val.raw) + ")";
        break;
      case CexValue::Kind::Exact: {
        auto it = sorts.find(var);
        out += it == sorts.end() ? val.value.to_string()
                                 : print_value(val.value, it->second, reg);
        break;
      }
    }
    out += ")";
  }
  return out + ")";
}

Value value_from_sexpr(const SExpr& s, const Sort& sort, const TypeRegistry& reg) {
  auto nil = s.is_symbol("NIL") || (s.is_list() && s.size() == 0);
  switch (sort.kind) {
    case Sort::Kind::Bool:
      if (s.is_symbol("T")) return Value::t();
      if (nil) return Value::nil();
      model_error("not a Boolean", s);
    case Sort::Kind::Int:
    case Sort::Kind::Real:
      return Value::number(lift_number(s));
    case Sort::Kind::Sym:
      if (s.head_is("QUOTE") && s.size() == 2 && s[1].is_symbol()) {
        return Value::symbol(s[1].text());
      }
      model_error("not a quoted symbol", s);
    case Sort::Kind::Pair: {
      if (nil) return Value::nil();
      Sort a = Sort::array(sort.type);
      if (s.head_is("CONS") && s.size() == 3) {
        return Value::cons(value_from_sexpr(s[1], key_sort(reg, a), reg),
                           value_from_sexpr(s[2], value_sort(reg, a), reg));
      }
      model_error("not a pair", s);
    }
    case Sort::Kind::Array: {
      std::vector<Value::Pair> entries;
      const SExpr* cur = &s;
      while (cur->head_is("ACONS") && cur->size() == 4) {
        entries.emplace_back(value_from_sexpr((*cur)[1], key_sort(reg, sort), reg),
                             value_from_sexpr((*cur)[2], value_sort(reg, sort), reg));
        cur = &(*cur)[3];
      }
      if (!(cur->is_symbol("NIL") || (cur->is_list() && cur->size() == 0))) {
        model_error("not an alist", *cur);
      }
      return Value::alist(std::move(entries));
    }
    case Sort::Kind::Datatype:
      break;
  }
  const FtyTypeDef& def = type_def(reg, sort.type);
  if (const auto* l = std::get_if<ListDef>(&def)) {
    if (nil) return Value::nil();
    if (s.head_is("CONS") && s.size() == 3) {
      return Value::cons(
          value_from_sexpr(s[1], sort_of_recognizer(reg, l->element_recognizer, false),
                           reg),
          value_from_sexpr(s[2], sort, reg));
    }
    model_error("not a list", s);
  }
  if (const auto* o = std::get_if<OptionDef>(&def)) {
    if (nil) return Value::option(sort.type, std::nullopt);
    if (s.head_is(o->some_constructor) && s.size() == 2) {
      return Value::option(
          sort.type,
          value_from_sexpr(s[1], sort_of_recognizer(reg, o->base_recognizer, false),
                           reg));
    }
    model_error("not an option", s);
  }
  const auto& p = std::get<ProdDef>(def);
  if (!s.head_is(p.constructor) || s.size() != p.fields.size() + 1) {
    model_error("not a " + p.name, s);
  }
  std::vector<Value> fields;
  for (std::size_t i = 0; i < p.fields.size(); ++i) {
    fields.push_back(value_from_sexpr(
        s[i + 1], sort_of_recognizer(reg, p.fields[i].recognizer, false), reg));
  }
  return Value::prod(p.name, std::move(fields));
}

Counterexample parse_counterexample(const std::string& text,
                                    const std::map<std::string, Sort>& sorts,
                                    const TypeRegistry& reg) {
  SExpr s;
  try {
    s = parse_sexpr(text).expr;
  } catch (const Error& e) {
    throw Error(ErrorKind::ModelParseError, e.what(), e.offset());
  }
  Counterexample cex;
  if (s.is_symbol("NIL")) return cex;
  if (!s.is_list()) model_error("expected a binding list", s);
  for (const auto& b : s.items()) {
    if (!b.is_list() || b.size() != 2 || !b[0].is_symbol()) {
      model_error("expected (VAR VALUE)", b);
    }
    const std::string& var = b[0].text();
    const SExpr& form = b[1];
    if (form.head_is("CEX-ROOT-OBJ") && form.size() == 4) {
      cex.bindings[var] = CexValue::root_obj(root_from(form[2], form[3], reg));
    } else if (form.head_is("CEX-OPAQUE") && form.size() == 2 && form[1].is_string()) {
      cex.bindings[var] = CexValue::opaque(form[1].text());
    } else {
      auto it = sorts.find(var);
      if (it == sorts.end()) {
        if (form.is_symbol("NIL")) {
          cex.bindings[var] = CexValue::exact(Value::nil());
          continue;
        }
        model_error("no sort for " + var, b);
      }
      cex.bindings[var] = CexValue::exact(value_from_sexpr(form, it->second, reg));
    }
  }
  return cex;
}

CexCheck check_counterexample(const Counterexample& cex, const Clause& goal,
                              const TypeRegistry& reg) {
  for (const auto& [var, v] : cex.bindings) {
    if (v.kind == CexValue::Kind::Root) {
      return {CexCheck::Kind::NotEvaluable, var + " is an algebraic number"};
    }
    if (v.kind == CexValue::Kind::Opaque) {
      return {CexCheck::Kind::NotEvaluable, var + " has no finite value"};
    }
  }
  Env env;
  for (const auto& [var, v] : cex.bindings) env.emplace(var, v.value);
  for (const auto& var : free_vars(goal)) {
    if (!env.count(var)) env.emplace(var, Value::nil());
  }
  try {
    if (clause_eval(goal, env, reg)) {
      return {CexCheck::Kind::Spurious, "goal holds at the model"};
    }
    return {CexCheck::Kind::Confirmed, "goal is false at the model"};
  } catch (const Error& e) {
    return {CexCheck::Kind::NotEvaluable, std::string("evaluation failed: ") + e.what()};
  }
}

}  // namespace smtlink
