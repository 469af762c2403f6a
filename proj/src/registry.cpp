#include "smtlink/registry.hpp"

#include <algorithm>
#include <functional>

#include "smtlink/error.hpp"

namespace smtlink {

namespace {

constexpr std::size_t kVariadic = static_cast<std::size_t>(-1);

struct BuiltinEntry {
  const char* name;
  std::size_t min;
  std::size_t max;
};

constexpr BuiltinEntry kBuiltins[] = {
    {"+", 0, kVariadic},        {"*", 0, kVariadic},   {"-", 1, 2},
    {"/", 1, 2},                {"<", 2, 2},           {"<=", 2, 2},
    {">", 2, 2},                {">=", 2, 2},          {"=", 2, 2},
    {"/=", 2, 2},               {"NOT", 1, 1},         {"AND", 0, kVariadic},
    {"OR", 0, kVariadic},       {"IMPLIES", 2, 2},     {"IF", 3, 3},
    {"IFF", 2, 2},              {"EQUAL", 2, 2},       {"BOOLEANP", 1, 1},
    {"INTEGERP", 1, 1},         {"RATIONALP", 1, 1},   {"SYMBOLP", 1, 1},
    {"CONS", 2, 2},             {"CAR", 1, 1},         {"CDR", 1, 1},
    {"CONSP", 1, 1},            {"ACONS", 3, 3},       {"ASSOC-EQUAL", 2, 2},
    {"HINT-PLEASE", 1, 1},      {"^", 2, 2},
};

constexpr std::pair<const char*, const char*> kAliases[] = {
    {"BINARY-+", "+"}, {"BINARY-*", "*"},       {"UNARY--", "-"},
    {"UNARY-/", "/"},  {"ASSOC", "ASSOC-EQUAL"}, {"EQL", "EQUAL"},
    {"EQ", "EQUAL"},
};

// Names with special syntax that can never be user functions.
const std::set<std::string, std::less<>> kReserved = {
    "QUOTE", "LET", "LAMBDA", "AS", "TYPE-HYP", "LIST", "T", "NIL", "REALP"};

[[noreturn]] void fail(ErrorKind kind, const std::string& msg,
                       std::optional<std::size_t> offset = std::nullopt) {
  throw Error(kind, msg, offset);
}

}  // namespace

std::optional<Arity> builtin_arity(std::string_view name) {
  std::string canon = builtin_alias(name);
  for (const auto& b : kBuiltins) {
    if (canon == b.name) {
      return Arity{b.min, b.max == kVariadic ? std::nullopt
                                             : std::optional<std::size_t>(b.max)};
    }
  }
  return std::nullopt;
}

std::string builtin_alias(std::string_view name) {
  for (const auto& [from, to] : kAliases) {
    if (name == from) return to;
  }
  return std::string(name);
}

const char* primitive_name(Primitive p) {
  switch (p) {
    case Primitive::Booleanp: return "BOOLEANP";
    case Primitive::Integerp: return "INTEGERP";
    case Primitive::Rationalp: return "RATIONALP";
    case Primitive::Symbolp: return "SYMBOLP";
  }
  return "";
}

const std::string& type_name(const FtyTypeDef& def) {
  return std::visit([](const auto& d) -> const std::string& { return d.name; },
                    def);
}

const std::string& type_recognizer(const FtyTypeDef& def) {
  return std::visit(
      [](const auto& d) -> const std::string& { return d.recognizer; }, def);
}

ProdDef make_prod(std::string_view name,
                  const std::vector<std::pair<std::string, std::string>>& fields) {
  ProdDef d;
  d.name = canonical_name(name);
  d.recognizer = d.name + "-P";
  d.constructor = d.name;
  for (const auto& [field, rec] : fields) {
    d.fields.push_back({d.name + "->" + canonical_name(field), canonical_name(rec)});
  }
  return d;
}

ListDef make_list(std::string_view name, std::string_view element_recognizer) {
  ListDef d;
  d.name = canonical_name(name);
  d.recognizer = d.name + "-P";
  d.element_recognizer = canonical_name(element_recognizer);
  return d;
}

AlistDef make_alist(std::string_view name, std::string_view key_recognizer,
                    std::string_view value_recognizer) {
  AlistDef d;
  d.name = canonical_name(name);
  d.recognizer = d.name + "-P";
  d.key_recognizer = canonical_name(key_recognizer);
  d.value_recognizer = canonical_name(value_recognizer);
  return d;
}

OptionDef make_option(std::string_view name, std::string_view base_recognizer) {
  OptionDef d;
  d.name = canonical_name(name);
  d.recognizer = d.name + "-P";
  d.some_constructor = d.name + "-SOME";
  d.val_accessor = d.name + "-SOME->VAL";
  d.base_recognizer = canonical_name(base_recognizer);
  return d;
}

const FnDef* TypeRegistry::function(std::string_view name) const {
  auto it = functions_.find(name);
  return it == functions_.end() ? nullptr : &it->second;
}

const FtyTypeDef* TypeRegistry::type(std::string_view type_name) const {
  auto it = types_.find(type_name);
  return it == types_.end() ? nullptr : &it->second;
}

const FtyTypeDef* TypeRegistry::type_of_recognizer(
    std::string_view recognizer) const {
  auto it = recognizers_.find(recognizer);
  return it == recognizers_.end() ? nullptr : type(it->second);
}

std::optional<FtyRole> TypeRegistry::fty_role(std::string_view name) const {
  auto it = fty_names_.find(name);
  if (it == fty_names_.end()) return std::nullopt;
  return it->second;
}

RecognizerKind TypeRegistry::recognizer_kind(std::string_view name) const {
  RecognizerKind k;
  auto prim = [&](Primitive p) {
    k.tag = RecognizerKind::Tag::Primitive;
    k.primitive = p;
    return k;
  };
  if (name == "BOOLEANP") return prim(Primitive::Booleanp);
  if (name == "INTEGERP") return prim(Primitive::Integerp);
  if (name == "RATIONALP") return prim(Primitive::Rationalp);
  if (name == "SYMBOLP") return prim(Primitive::Symbolp);
  if (name == "REALP" && options_.realp_alias) return prim(Primitive::Rationalp);
  if (const auto* def = type_of_recognizer(name)) {
    k.def = def;
    switch (def->index()) {
      case 0: k.tag = RecognizerKind::Tag::Prod; break;
      case 1: k.tag = RecognizerKind::Tag::List; break;
      case 2: k.tag = RecognizerKind::Tag::Alist; break;
      default: k.tag = RecognizerKind::Tag::Option; break;
    }
  }
  return k;
}

RecognizerKind recognizer_kind(const TypeRegistry& reg, std::string_view name) {
  return reg.recognizer_kind(name);
}

std::optional<Arity> TypeRegistry::arity(std::string_view name) const {
  if (auto a = builtin_arity(name)) return a;
  if (name == "REALP" && options_.realp_alias) return Arity{1, 1};
  if (const auto* fn = function(name)) {
    return Arity{fn->formals.size(), fn->formals.size()};
  }
  if (auto role = fty_role(name)) {
    if (role->tag == FtyRole::Tag::Constructor) {
      const auto& prod = std::get<ProdDef>(*type(role->type));
      return Arity{prod.fields.size(), prod.fields.size()};
    }
    return Arity{1, 1};
  }
  return std::nullopt;
}

bool TypeRegistry::name_in_use(std::string_view name) const {
  return builtin_arity(name) || kReserved.count(name) || function(name) ||
         type(name) || fty_names_.count(name);
}

std::optional<std::string> TypeRegistry::resolve_recognizer(
    std::string_view name) const {
  std::string canon = canonical_name(name);
  if (recognizer_kind(canon).is_recognizer()) {
    return canon == "REALP" ? std::string("RATIONALP") : canon;
  }
  if (const auto* def = type(canon)) return type_recognizer(*def);
  return std::nullopt;
}

void TypeRegistry::add_fty_names(const FtyTypeDef& def) {
  const std::string& tn = type_name(def);
  recognizers_[type_recognizer(def)] = tn;
  fty_names_[type_recognizer(def)] = {FtyRole::Tag::Recognizer, tn, 0};
  if (const auto* p = std::get_if<ProdDef>(&def)) {
    fty_names_[p->constructor] = {FtyRole::Tag::Constructor, tn, 0};
    for (std::size_t i = 0; i < p->fields.size(); ++i) {
      fty_names_[p->fields[i].accessor] = {FtyRole::Tag::Accessor, tn, i};
    }
  } else if (const auto* o = std::get_if<OptionDef>(&def)) {
    fty_names_[o->some_constructor] = {FtyRole::Tag::SomeConstructor, tn, 0};
    fty_names_[o->val_accessor] = {FtyRole::Tag::ValAccessor, tn, 0};
  }
}

namespace {

std::vector<std::string> generated_names(const FtyTypeDef& def) {
  std::vector<std::string> out{type_recognizer(def)};
  if (const auto* p = std::get_if<ProdDef>(&def)) {
    if (p->constructor != p->name) out.push_back(p->constructor);
    for (const auto& f : p->fields) out.push_back(f.accessor);
  } else if (const auto* o = std::get_if<OptionDef>(&def)) {
    out.push_back(o->some_constructor);
    out.push_back(o->val_accessor);
  }
  return out;
}

std::vector<std::string> referenced_recognizers(const FtyTypeDef& def) {
  if (const auto* p = std::get_if<ProdDef>(&def)) {
    std::vector<std::string> out;
    for (const auto& f : p->fields) out.push_back(f.recognizer);
    return out;
  }
  if (const auto* l = std::get_if<ListDef>(&def)) return {l->element_recognizer};
  if (const auto* a = std::get_if<AlistDef>(&def)) {
    return {a->key_recognizer, a->value_recognizer};
  }
  return {std::get<OptionDef>(def).base_recognizer};
}

void set_referenced(FtyTypeDef& def, std::size_t i, std::string rec) {
  if (auto* p = std::get_if<ProdDef>(&def)) {
    p->fields[i].recognizer = std::move(rec);
  } else if (auto* l = std::get_if<ListDef>(&def)) {
    l->element_recognizer = std::move(rec);
  } else if (auto* a = std::get_if<AlistDef>(&def)) {
    (i == 0 ? a->key_recognizer : a->value_recognizer) = std::move(rec);
  } else {
    std::get<OptionDef>(def).base_recognizer = std::move(rec);
  }
}

}  // namespace

TypeRegistry register_fty(const TypeRegistry& reg, const FtyTypeDef& def) {
  return register_fty_group(reg, {def});
}

TypeRegistry register_fty_group(const TypeRegistry& reg,
                                const std::vector<FtyTypeDef>& defs) {
  TypeRegistry out = reg;
  std::set<std::string> fresh;
  std::map<std::string, std::string> group_recognizers;  // rec -> type
  for (const auto& def : defs) {
    if (const auto* l = std::get_if<ListDef>(&def); l && !l->true_listp) {
      fail(ErrorKind::BadGoalFile,
           "deflist " + l->name + " must be declared :true-listp t");
    }
    std::vector<std::string> names = generated_names(def);
    names.push_back(type_name(def));
    for (const auto& n : names) {
      if (reg.name_in_use(n) || !fresh.insert(n).second) {
        fail(ErrorKind::DuplicateName, "name already in use: " + n);
      }
    }
    group_recognizers[type_recognizer(def)] = type_name(def);
  }

  // Normalize references (type names become recognizers) and resolve them.
  std::vector<FtyTypeDef> normalized = defs;
  std::map<std::string, std::set<std::string>> edges;  // type -> group types
  for (auto& def : normalized) {
    auto refs = referenced_recognizers(def);
    for (std::size_t i = 0; i < refs.size(); ++i) {
      std::string rec = canonical_name(refs[i]);
      std::string resolved;
      if (auto r = reg.resolve_recognizer(rec)) {
        resolved = *r;
      } else if (group_recognizers.count(rec)) {
        resolved = rec;
      } else {
        bool is_group_type = false;
        for (const auto& [grec, gname] : group_recognizers) {
          if (gname == rec) {
            resolved = grec;
            is_group_type = true;
          }
        }
        if (!is_group_type) {
          fail(ErrorKind::UnknownRecognizer,
               "unknown recognizer " + rec + " in " + type_name(def));
        }
      }
      if (auto g = group_recognizers.find(resolved); g != group_recognizers.end()) {
        edges[type_name(def)].insert(g->second);
      }
      set_referenced(def, i, resolved);
    }
  }

  // Any reference cycle within the group (including self-reference) is
  // rejected; lists recur only through their own cdr, which is implicit.
  std::map<std::string, int> color;
  std::function<void(const std::string&)> dfs = [&](const std::string& n) {
    color[n] = 1;
    for (const auto& m : edges[n]) {
      if (color[m] == 1) {
        fail(ErrorKind::CyclicTypeReference,
             "cyclic type reference through " + n + " and " + m);
      }
      if (color[m] == 0) dfs(m);
    }
    color[n] = 2;
  };
  for (const auto& def : normalized) {
    if (color[type_name(def)] == 0) dfs(type_name(def));
  }

  // Dependency order: referenced group types first.
  std::vector<std::string> order;
  std::set<std::string> placed;
  std::function<void(const std::string&)> place = [&](const std::string& n) {
    if (!placed.insert(n).second) return;
    for (const auto& m : edges[n]) place(m);
    order.push_back(n);
  };
  for (const auto& def : normalized) place(type_name(def));

  for (const auto& def : normalized) {
    out.types_.emplace(type_name(def), def);
    out.add_fty_names(def);
  }
  for (const auto& n : order) out.type_order_.push_back(n);
  return out;
}

TypeRegistry register_defun(const TypeRegistry& reg, const std::string& name,
                            const std::vector<std::string>& formals,
                            const SExpr& body) {
  return register_defuns(reg, {DefunForm{name, formals, body}});
}

TypeRegistry register_defuns(const TypeRegistry& reg,
                             const std::vector<DefunForm>& forms) {
  TypeRegistry staged = reg;
  std::set<std::string> group;
  for (const auto& f : forms) {
    std::string name = canonical_name(f.name);
    if (reg.name_in_use(name) || !group.insert(name).second) {
      fail(ErrorKind::DuplicateName, "name already in use: " + name,
           f.body.offset());
    }
    std::set<std::string> seen;
    FnDef placeholder{name, {}, Term::nil(), false};
    for (const auto& formal : f.formals) {
      std::string fv = canonical_name(formal);
      if (!seen.insert(fv).second) {
        fail(ErrorKind::DuplicateName,
             "duplicate formal " + fv + " in " + name, f.body.offset());
      }
      placeholder.formals.push_back(fv);
    }
    staged.functions_[name] = placeholder;
  }

  std::map<std::string, std::set<std::string>> calls;
  for (const auto& f : forms) {
    std::string name = canonical_name(f.name);
    FnDef& def = staged.functions_[name];
    std::set<std::string> vars(def.formals.begin(), def.formals.end());
    def.body = sexpr_to_term(f.body, staged, &vars);
    def.recursive = occurs_fn(def.body, name);
    for (const auto& g : group) {
      if (g != name && occurs_fn(def.body, g)) calls[name].insert(g);
    }
  }

  std::map<std::string, int> color;
  std::function<void(const std::string&)> dfs = [&](const std::string& n) {
    color[n] = 1;
    for (const auto& m : calls[n]) {
      if (color[m] == 1) {
        fail(ErrorKind::MutualRecursion,
             "mutual recursion between " + n + " and " + m);
      }
      if (color[m] == 0) dfs(m);
    }
    color[n] = 2;
  };
  for (const auto& g : group) {
    if (color[g] == 0) dfs(g);
  }
  return staged;
}

void TypeRegistry::validate() const {
  for (const auto& [name, fn] : functions_) {
    std::set<std::string> formals(fn.formals.begin(), fn.formals.end());
    for (const auto& v : free_vars(fn.body)) {
      if (!formals.count(v)) {
        fail(ErrorKind::Contract, "free variable " + v + " in body of " + name);
      }
    }
    bool closed = true;
    visit(fn.body, [&](const Term& t) {
      if (t.is_app() && !arity(t.name())) closed = false;
      if (t.is_fix() && !type(t.name())) closed = false;
      return closed;
    });
    if (!closed) fail(ErrorKind::Contract, "body of " + name + " is not closed");
    if (fn.recursive != occurs_fn(fn.body, name)) {
      fail(ErrorKind::Contract, "stale recursive flag on " + name);
    }
  }
  std::set<std::string> names;
  for (const auto& [tn, def] : types_) {
    for (const auto& n : generated_names(def)) {
      if (!names.insert(n).second || functions_.count(n)) {
        fail(ErrorKind::Contract, "name clash on " + n);
      }
    }
    for (const auto& rec : referenced_recognizers(def)) {
      if (!recognizer_kind(rec).is_recognizer()) {
        fail(ErrorKind::Contract, "dangling recognizer " + rec + " in " + tn);
      }
    }
  }
}

namespace {

Term resolve(const SExpr& s, const TypeRegistry& reg,
             const std::set<std::string>* variables);

Term resolve_quote(const SExpr& s) {
  if (s.size() != 2) {
    fail(ErrorKind::ArityMismatch, "QUOTE takes one argument", s.offset());
  }
  const SExpr& q = s[1];
  if (q.is_number()) return Term::number(q.value());
  if (q.is_symbol("T")) return Term::t();
  if (q.is_symbol("NIL") || (q.is_list() && q.size() == 0 && !q.tail())) {
    return Term::nil();
  }
  if (q.is_symbol()) return Term::quoted(q.text());
  fail(ErrorKind::UnsupportedOp, "quoted structure " + q.to_string(),
       s.offset());
}

Term resolve_let(const SExpr& s, const TypeRegistry& reg,
                 const std::set<std::string>* variables) {
  if (s.size() != 3 || !s[1].is_list()) {
    fail(ErrorKind::BadToken, "malformed LET", s.offset());
  }
  std::map<std::string, Term> binding;
  std::set<std::string> inner;
  if (variables) inner = *variables;
  for (const auto& b : s[1].items()) {
    if (!b.is_list() || b.size() != 2 || !b[0].is_symbol() || b[0].is_keyword()) {
      fail(ErrorKind::BadToken, "malformed LET binding", b.offset());
    }
    binding[b[0].text()] = resolve(b[1], reg, variables);
    inner.insert(b[0].text());
  }
  Term body = resolve(s[2], reg, variables ? &inner : nullptr);
  return substitute(body, binding);
}

Term resolve_lambda_app(const SExpr& s, const TypeRegistry& reg,
                        const std::set<std::string>* variables) {
  const SExpr& lam = s[0];
  if (lam.size() != 3 || !lam[1].is_list()) {
    fail(ErrorKind::BadToken, "malformed LAMBDA", lam.offset());
  }
  if (lam[1].size() != s.size() - 1) {
    fail(ErrorKind::ArityMismatch, "LAMBDA arity mismatch", s.offset());
  }
  std::set<std::string> formals;
  std::map<std::string, Term> binding;
  for (std::size_t i = 0; i < lam[1].size(); ++i) {
    if (!lam[1][i].is_symbol()) {
      fail(ErrorKind::BadToken, "LAMBDA formal must be a symbol", lam.offset());
    }
    formals.insert(lam[1][i].text());
    binding[lam[1][i].text()] = resolve(s[i + 1], reg, variables);
  }
  // Lambda bodies are closed over their formals.
  Term body = resolve(lam[2], reg, &formals);
  return substitute(body, binding);
}

Term resolve(const SExpr& s, const TypeRegistry& reg,
             const std::set<std::string>* variables) {
  switch (s.kind()) {
    case SExpr::Kind::Integer:
    case SExpr::Kind::Rational:
      return Term::number(s.value());
    case SExpr::Kind::String:
      fail(ErrorKind::UnsupportedOp, "string literal", s.offset());
    case SExpr::Kind::Symbol: {
      if (s.is_symbol("T")) return Term::t();
      if (s.is_symbol("NIL")) return Term::nil();
      if (s.is_keyword() || (variables && !variables->count(s.text()))) {
        fail(ErrorKind::BareSymbol, "bare symbol " + s.text(), s.offset());
      }
      return Term::var(s.text());
    }
    case SExpr::Kind::List:
      break;
  }
  if (s.tail()) fail(ErrorKind::BadToken, "improper list in term", s.offset());
  if (s.size() == 0) return Term::nil();
  const SExpr& head = s[0];
  if (head.head_is("LAMBDA")) return resolve_lambda_app(s, reg, variables);
  if (!head.is_symbol() || head.is_keyword()) {
    fail(ErrorKind::BadToken, "bad function position " + head.to_string(),
         head.offset());
  }
  if (head.is_symbol("QUOTE")) return resolve_quote(s);
  if (head.is_symbol("LET")) return resolve_let(s, reg, variables);
  if (head.is_symbol("AS")) {
    if (s.size() != 3 || !s[2].is_symbol()) {
      fail(ErrorKind::BadToken, "expected (AS term type)", s.offset());
    }
    std::string tn = s[2].text();
    if (!reg.type(tn)) {
      const FtyTypeDef* def = reg.type_of_recognizer(tn);
      if (!def) {
        fail(ErrorKind::UnknownRecognizer, "unknown type " + tn, s[2].offset());
      }
      tn = type_name(*def);
    }
    return Term::fix(resolve(s[1], reg, variables), tn);
  }
  if (head.is_symbol("TYPE-HYP")) {
    if (s.size() != 3 || !s[1].head_is("LIST") || !s[2].is_keyword() ||
        (!s[2].is_symbol(":TYPE") && !s[2].is_symbol(":RETURN"))) {
      fail(ErrorKind::BadToken, "expected (TYPE-HYP (LIST ...) :TYPE|:RETURN)",
           s.offset());
    }
    std::vector<Term> items;
    for (std::size_t i = 1; i < s[1].size(); ++i) {
      items.push_back(resolve(s[1][i], reg, variables));
    }
    return Term::type_hyp(std::move(items), s[2].is_symbol(":TYPE")
                                                ? MarkerTag::Type
                                                : MarkerTag::Return);
  }
  std::string fn = builtin_alias(head.text());
  if (fn == "REALP") {
    if (!reg.options().realp_alias) {
      fail(ErrorKind::UnknownFunction, "unknown function REALP", head.offset());
    }
    fn = "RATIONALP";
  }
  auto arity = reg.arity(fn);
  if (!arity) {
    fail(ErrorKind::UnknownFunction, "unknown function " + fn, head.offset());
  }
  std::size_t got = s.size() - 1;
  if (!arity->accepts(got)) {
    std::string expected = std::to_string(arity->min);
    if (!arity->max) {
      expected += "+";
    } else if (*arity->max != arity->min) {
      expected += ".." + std::to_string(*arity->max);
    }
    fail(ErrorKind::ArityMismatch,
         fn + " expects " + expected + " arguments, got " + std::to_string(got),
         s.offset());
  }
  std::vector<Term> args;
  args.reserve(got);
  for (std::size_t i = 1; i < s.size(); ++i) {
    args.push_back(resolve(s[i], reg, variables));
  }
  return Term::app(std::move(fn), std::move(args));
}

}  // namespace

Term sexpr_to_term(const SExpr& s, const TypeRegistry& reg,
                   const std::set<std::string>* variables) {
  return resolve(s, reg, variables);
}

}  // namespace smtlink
