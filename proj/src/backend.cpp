#include "smtlink/backend.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <set>
#include <sstream>

#include "smtlink/error.hpp"
#include "smtlink/pipeline.hpp"

namespace smtlink {

std::string Sort::describe() const {
  switch (kind) {
    case Kind::Bool: return "Bool";
    case Kind::Int: return "Int";
    case Kind::Real: return "Real";
    case Kind::Sym: return "Symbol";
    case Kind::Datatype: return type;
    case Kind::Array: return type;
    case Kind::Pair: return "pair of " + type;
  }
  return "";
}

Sort sort_of_recognizer(const TypeRegistry& reg, const std::string& recognizer,
                        bool ints_as_reals) {
  RecognizerKind k = recognizer_kind(reg, recognizer);
  switch (k.tag) {
    case RecognizerKind::Tag::Primitive:
      switch (k.primitive) {
        case Primitive::Booleanp: return Sort::boolean();
        case Primitive::Integerp:
          return ints_as_reals ? Sort::real() : Sort::integer();
        case Primitive::Rationalp: return Sort::real();
        case Primitive::Symbolp: return Sort::symbol();
      }
      break;
    case RecognizerKind::Tag::Prod:
    case RecognizerKind::Tag::List:
    case RecognizerKind::Tag::Option:
      return Sort::datatype(type_name(*k.def));
    case RecognizerKind::Tag::Alist:
      return Sort::array(type_name(*k.def));
    case RecognizerKind::Tag::NotARecognizer:
      break;
  }
  throw Error(ErrorKind::UnknownRecognizer, "not a recognizer: " + recognizer);
}

namespace {

[[noreturn]] void clash(const Term& node, const std::string& expected,
                        const Sort& got) {
  throw Error(ErrorKind::SortClash, "in " + print_term(node) + ": expected " +
                                        expected + ", got " + got.describe());
}

[[noreturn]] void unsupported(const Term& node, const std::string& why) {
  throw Error(ErrorKind::UnsupportedOp, why + " in " + print_term(node));
}

bool bare_nil(const TypedTerm& t) { return t.term.is_nil(); }

std::optional<Sort> meet(const Sort& a, const Sort& b) {
  if (a == b) return a;
  auto has = [&](Sort::Kind x, Sort::Kind y) {
    return (a.kind == x && b.kind == y) || (a.kind == y && b.kind == x);
  };
  if (has(Sort::Kind::Int, Sort::Kind::Real)) return Sort::integer();
  if (has(Sort::Kind::Bool, Sort::Kind::Sym)) return Sort::boolean();
  return std::nullopt;
}

bool is_primitive_recognizer(const std::string& fn) {
  return fn == "BOOLEANP" || fn == "INTEGERP" || fn == "RATIONALP" ||
         fn == "SYMBOLP";
}

// Element sorts of an FTY type.
struct TypeShape {
  const TypeRegistry& reg;
  bool reals;

  Sort of(const std::string& rec) const {
    return sort_of_recognizer(reg, rec, reals);
  }
  const FtyTypeDef& def(const std::string& type) const {
    const FtyTypeDef* d = reg.type(type);
    if (!d) throw Error(ErrorKind::Contract, "unregistered type " + type);
    return *d;
  }
  const ListDef* list(const Sort& s) const {
    if (s.kind != Sort::Kind::Datatype) return nullptr;
    return std::get_if<ListDef>(&def(s.type));
  }
  const OptionDef* option(const Sort& s) const {
    if (s.kind != Sort::Kind::Datatype) return nullptr;
    return std::get_if<OptionDef>(&def(s.type));
  }
  const ProdDef* prod(const Sort& s) const {
    if (s.kind != Sort::Kind::Datatype) return nullptr;
    return std::get_if<ProdDef>(&def(s.type));
  }
  const AlistDef& alist(const Sort& s) const {
    return std::get<AlistDef>(def(s.type));
  }
  Sort key(const Sort& s) const { return of(alist(s).key_recognizer); }
  Sort value(const Sort& s) const { return of(alist(s).value_recognizer); }
};

class Inference {
 public:
  Inference(const TypeRegistry& reg, const HintSpec& hints)
      : reg_(reg), hints_(hints), shape_{reg, hints.use_reals()} {}

  void add_type_hyp(const Term& item) {
    const Term& v = item.arg(0);
    Sort s = sort_of_recognizer(reg_, item.name(), false);
    auto it = vars_.find(v.name());
    if (it == vars_.end()) {
      vars_.emplace(v.name(), s);
      return;
    }
    auto m = meet(it->second, s);
    if (!m) clash(item, it->second.describe(), s);
    it->second = *m;
  }

  void finish_vars() {
    if (!hints_.use_reals()) return;
    for (auto& [name, s] : vars_) {
      if (s.kind == Sort::Kind::Int) s = Sort::real();
    }
  }

  TypedTerm boolean(const Term& t) {
    TypedTerm tt = infer(t);
    if (tt.sort.kind != Sort::Kind::Bool) clash(t, "Bool", tt.sort);
    return tt;
  }

  TypedTerm infer(const Term& t) {
    TypedTerm out = infer_node(t);
    used_.insert(out.sort);
    return out;
  }

  const std::map<std::string, Sort>& vars() const { return vars_; }
  std::map<std::string, FunctionSig> functions() const { return functions_; }

  void check_used_sorts() const {
    std::set<Sort> all = used_;
    for (const auto& [n, s] : vars_) all.insert(s);
    for (const auto& s : all) check_sort(s, {});
  }

 private:
  // Options whose payload may be nil cannot be told apart from the empty
  // option by the untyped logic, so their datatype encoding is unsound.
  void check_sort(const Sort& s, std::set<std::string> seen) const {
    if (s.kind != Sort::Kind::Datatype && s.kind != Sort::Kind::Array &&
        s.kind != Sort::Kind::Pair) {
      return;
    }
    if (!seen.insert(s.type).second) return;
    if (const OptionDef* o = shape_.option(s)) {
      Sort base = shape_.of(o->base_recognizer);
      bool nil_member = base.kind == Sort::Kind::Bool ||
                        base.kind == Sort::Kind::Array || shape_.list(base) ||
                        shape_.option(base);
      if (nil_member) {
        throw Error(ErrorKind::UnsupportedOp,
                    "option " + s.type + " over a type containing nil");
      }
      check_sort(base, seen);
    } else if (const ProdDef* p = shape_.prod(s)) {
      for (const auto& f : p->fields) check_sort(shape_.of(f.recognizer), seen);
    } else if (const ListDef* l = shape_.list(s)) {
      check_sort(shape_.of(l->element_recognizer), seen);
    } else {
      check_sort(shape_.key(s), seen);
      check_sort(shape_.value(s), seen);
    }
  }

  // `a` must be usable where `want` is expected.
  void expect(const TypedTerm& a, const Sort& want, const Term& node) {
    if (a.sort == want) return;
    if (want.kind == Sort::Kind::Real && a.sort.kind == Sort::Kind::Int) return;
    if (bare_nil(a) && want.kind != Sort::Kind::Bool) {
      throw Error(ErrorKind::AmbiguousNil,
                  "nil needs (as nil TYPE) in " + print_term(node));
    }
    clash(node, want.describe(), a.sort);
  }

  Sort unify(const TypedTerm& a, const TypedTerm& b, const Term& node) {
    if (a.sort == b.sort) return a.sort;
    if (a.sort.numeric() && b.sort.numeric()) return Sort::real();
    if ((bare_nil(a) && b.sort.kind != Sort::Kind::Bool) ||
        (bare_nil(b) && a.sort.kind != Sort::Kind::Bool)) {
      throw Error(ErrorKind::AmbiguousNil,
                  "nil needs (as nil TYPE) in " + print_term(node));
    }
    clash(node, a.sort.describe(), b.sort);
  }

  Sort numeric(const std::vector<TypedTerm>& args, const Term& node) {
    Sort s = Sort::integer();
    for (const auto& a : args) {
      if (!a.sort.numeric()) clash(node, "Int or Real", a.sort);
      if (a.sort.kind == Sort::Kind::Real) s = Sort::real();
    }
    return s;
  }

  TypedTerm infer_node(const Term& t) {
    switch (t.kind()) {
      case Term::Kind::Var: {
        auto it = vars_.find(t.name());
        if (it == vars_.end()) {
          throw Error(ErrorKind::MissingTypeHyp,
                      "no type hypothesis for " + t.name());
        }
        return {t, it->second, {}};
      }
      case Term::Kind::Const:
        switch (t.constant().kind()) {
          case Constant::Kind::Bool: return {t, Sort::boolean(), {}};
          case Constant::Kind::Int: return {t, Sort::integer(), {}};
          case Constant::Kind::Rat: return {t, Sort::real(), {}};
          case Constant::Kind::Sym: return {t, Sort::symbol(), {}};
        }
        break;
      case Term::Kind::Fix: {
        const FtyTypeDef& def = shape_.def(t.name());
        Sort target = shape_.of(type_recognizer(def));
        if (t.operand().is_nil()) {
          if (std::holds_alternative<ProdDef>(def)) {
            unsupported(t, "nil of a product type");
          }
          return {t, target, {}};
        }
        TypedTerm a = infer(t.operand());
        expect(a, target, t);
        return {t, target, {a}};
      }
      case Term::Kind::TypeHyp: {
        std::vector<TypedTerm> items;
        for (const auto& i : t.args()) items.push_back(boolean(i));
        return {t, Sort::boolean(), std::move(items)};
      }
      case Term::Kind::App:
        break;
    }
    return infer_app(t);
  }

  TypedTerm infer_app(const Term& t) {
    const std::string& fn = t.name();
    if (fn == "HINT-PLEASE") return {t, Sort::boolean(), {}};
    std::vector<TypedTerm> a;
    for (const auto& x : t.args()) a.push_back(infer(x));
    auto done = [&](Sort s) { return TypedTerm{t, std::move(s), std::move(a)}; };

    if (fn == "+" || fn == "*" || fn == "-") return done(numeric(a, t));
    if (fn == "/") {
      numeric(a, t);
      return done(Sort::real());
    }
    if (fn == "^") {
      Sort s = numeric({a[0]}, t);
      const Term& e = t.arg(1);
      if (!e.is_const() || e.constant().kind() != Constant::Kind::Int ||
          e.constant().number_value() < 0) {
        unsupported(t, "non-constant or negative exponent");
      }
      return done(s);
    }
    if (fn == "<" || fn == "<=" || fn == ">" || fn == ">=" || fn == "=" ||
        fn == "/=") {
      numeric(a, t);
      return done(Sort::boolean());
    }
    if (fn == "NOT" || fn == "AND" || fn == "OR" || fn == "IMPLIES" ||
        fn == "IFF") {
      for (const auto& x : a) expect(x, Sort::boolean(), t);
      return done(Sort::boolean());
    }
    if (fn == "IF") {
      expect(a[0], Sort::boolean(), t);
      return done(unify(a[1], a[2], t));
    }
    if (fn == "EQUAL") {
      Sort s = unify(a[0], a[1], t);
      if (s.kind == Sort::Kind::Array) {
        unsupported(t, "equality of alists");
      }
      return done(Sort::boolean());
    }
    if (is_primitive_recognizer(fn)) return done(Sort::boolean());
    if (fn == "CONSP") {
      const Sort& s = a[0].sort;
      if (s.kind == Sort::Kind::Array || shape_.option(s) || shape_.prod(s)) {
        unsupported(t, "consp of " + s.describe());
      }
      return done(Sort::boolean());
    }
    if (fn == "CAR" || fn == "CDR") {
      const Sort s = a[0].sort;
      if (const ListDef* l = shape_.list(s)) {
        return done(fn == "CAR" ? shape_.of(l->element_recognizer) : s);
      }
      if (s.kind == Sort::Kind::Pair) {
        return done(fn == "CAR" ? shape_.key(s) : shape_.value(s));
      }
      if (bare_nil(a[0])) {
        throw Error(ErrorKind::AmbiguousNil,
                    "nil needs (as nil TYPE) in " + print_term(t));
      }
      unsupported(t, fn + " of " + s.describe());
    }
    if (fn == "CONS") {
      const Sort s = a[1].sort;
      const ListDef* l = shape_.list(s);
      if (!l) {
        if (bare_nil(a[1])) {
          throw Error(ErrorKind::AmbiguousNil,
                      "nil needs (as nil TYPE) in " + print_term(t));
        }
        clash(t, "a list type", s);
      }
      expect(a[0], shape_.of(l->element_recognizer), t);
      return done(s);
    }
    if (fn == "ACONS") {
      const Sort s = a[2].sort;
      if (s.kind != Sort::Kind::Array) {
        if (bare_nil(a[2])) {
          throw Error(ErrorKind::AmbiguousNil,
                      "nil needs (as nil TYPE) in " + print_term(t));
        }
        clash(t, "an alist type", s);
      }
      expect(a[0], shape_.key(s), t);
      expect(a[1], shape_.value(s), t);
      return done(s);
    }
    if (fn == "ASSOC-EQUAL") {
      const Sort s = a[1].sort;
      if (s.kind != Sort::Kind::Array) {
        if (bare_nil(a[1])) {
          throw Error(ErrorKind::AmbiguousNil,
                      "nil needs (as nil TYPE) in " + print_term(t));
        }
        clash(t, "an alist type", s);
      }
      expect(a[0], shape_.key(s), t);
      return done(Sort::pair(s.type));
    }
    if (auto role = reg_.fty_role(fn)) {
      const FtyTypeDef& def = shape_.def(role->type);
      Sort self = shape_.of(type_recognizer(def));
      switch (role->tag) {
        case FtyRole::Tag::Recognizer:
          return done(Sort::boolean());
        case FtyRole::Tag::Constructor: {
          const auto& p = std::get<ProdDef>(def);
          for (std::size_t i = 0; i < a.size(); ++i) {
            expect(a[i], shape_.of(p.fields[i].recognizer), t);
          }
          return done(self);
        }
        case FtyRole::Tag::Accessor: {
          const auto& p = std::get<ProdDef>(def);
          expect(a[0], self, t);
          return done(shape_.of(p.fields[role->field].recognizer));
        }
        case FtyRole::Tag::SomeConstructor: {
          const auto& o = std::get<OptionDef>(def);
          expect(a[0], shape_.of(o.base_recognizer), t);
          return done(self);
        }
        case FtyRole::Tag::ValAccessor: {
          const auto& o = std::get<OptionDef>(def);
          expect(a[0], self, t);
          return done(shape_.of(o.base_recognizer));
        }
      }
    }
    if (reg_.function(fn)) {
      auto spec = hints_.uninterp.find(fn);
      if (spec == hints_.uninterp.end()) {
        unsupported(t, "call to " + fn + " without an :uninterp signature");
      }
      FunctionSig sig;
      for (std::size_t i = 0; i < a.size(); ++i) {
        sig.args.push_back(shape_.of(spec->second.arg_recognizers.at(i)));
        expect(a[i], sig.args.back(), t);
      }
      sig.result = shape_.of(spec->second.result_recognizer);
      for (const auto& s : sig.args) used_.insert(s);
      functions_[fn] = sig;
      return done(sig.result);
    }
    unsupported(t, "function " + fn);
  }

  const TypeRegistry& reg_;
  const HintSpec& hints_;
  TypeShape shape_;
  std::map<std::string, Sort> vars_;
  std::map<std::string, FunctionSig> functions_;
  std::set<Sort> used_;
};

const Term* marker_of(const Term& d, MarkerTag tag) {
  if (d.is_app("NOT") && d.arg(0).is_type_hyp(tag)) return &d.arg(0);
  return nullptr;
}

}  // namespace

SortedGoal infer_sorts(const Clause& g, const TypeRegistry& reg,
                       const HintSpec& hints) {
  Inference inf(reg, hints);
  std::vector<std::pair<Term, std::size_t>> facts;
  std::vector<std::size_t> body;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (const Term* m = marker_of(g[i], MarkerTag::Type)) {
      for (const auto& item : m->args()) {
        if (is_type_hypothesis(item, reg)) {
          inf.add_type_hyp(item);
        } else {
          facts.emplace_back(item, i);
        }
      }
    } else if (const Term* r = marker_of(g[i], MarkerTag::Return)) {
      for (const auto& item : r->args()) facts.emplace_back(item, i);
    } else {
      body.push_back(i);
    }
  }
  inf.finish_vars();
  SortedGoal out{g, {}, {}, {}, {}};
  for (const auto& [fact, i] : facts) {
    out.assumptions.push_back({inf.boolean(fact), i});
  }
  for (std::size_t i : body) out.body.push_back({inf.boolean(g[i]), i});
  inf.check_used_sorts();
  // Only variables that occur are declared.
  std::set<std::string> occurring;
  for (const auto& td : out.assumptions) {
    for (const auto& v : free_vars(td.term.term)) occurring.insert(v);
  }
  for (const auto& td : out.body) {
    for (const auto& v : free_vars(td.term.term)) occurring.insert(v);
  }
  for (const auto& [name, s] : inf.vars()) {
    if (occurring.count(name)) out.vars.emplace(name, s);
  }
  out.functions = inf.functions();
  return out;
}

std::size_t SymbolIntern::intern(const std::string& name) {
  auto it = table_.find(name);
  if (it != table_.end()) return it->second;
  std::size_t idx = names_.size();
  names_.push_back(name);
  table_.emplace(name, idx);
  return idx;
}

std::optional<std::size_t> SymbolIntern::index(const std::string& name) const {
  auto it = table_.find(name);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

std::string SymbolIntern::lift(const BigInt& index) const {
  if (index >= 0 && index < names_.size()) {
    return names_[index.convert_to<std::size_t>()];
  }
  std::string base = "SYM" + std::string(index < 0 ? "-M" : "-") +
                     (index < 0 ? BigInt(-index) : index).str();
  std::string name = base;
  for (int n = 1; table_.count(name); ++n) name = base + "-" + std::to_string(n);
  return name;
}

std::pair<SymbolIntern, std::size_t> intern_symbol(SymbolIntern si,
                                                   const std::string& name) {
  std::size_t idx = si.intern(name);
  return {std::move(si), idx};
}

SymbolIntern intern_symbols(const Clause& c) {
  SymbolIntern si;
  for (const auto& d : c.disjuncts()) {
    visit(d, [&](const Term& t) {
      if (t.is_const() && t.constant().kind() == Constant::Kind::Sym) {
        si.intern(t.constant().symbol_name());
      }
      return true;
    });
  }
  return si;
}

std::string mangle(const std::string& name) {
  static const std::map<char, std::string> escapes = {
      {'?', "_p_"},   {'^', "_hat_"},  {'/', "_slash_"}, {'>', "_gt_"},
      {'<', "_lt_"},  {'=', "_eq_"},   {'*', "_star_"},  {'+', "_plus_"},
      {'!', "_bang_"}, {'.', "_dot_"}, {'%', "_pct_"},   {'&', "_amp_"},
      {'$', "_dollar_"}, {':', "_colon_"}, {'~', "_tilde_"}, {'@', "_at_"},
  };
  std::string out;
  for (char c : name) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      out += static_cast<char>(std::tolower(u));
    } else if (c == '-' || c == '_') {
      out += '_';
    } else if (auto it = escapes.find(c); it != escapes.end()) {
      out += it->second;
    } else {
      static const char* hex = "0123456789abcdef";
      out += "_x";
      out += hex[u >> 4];
      out += hex[u & 15];
      out += '_';
    }
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) {
    out = "v_" + out;
  }
  return out;
}

bool is_reserved_smt_word(const std::string& word) {
  static const std::set<std::string> reserved = {
      "and", "or", "not", "xor", "ite", "true", "false", "let", "forall",
      "exists", "match", "as", "par", "distinct", "assert", "check", "sat",
      "unsat", "unknown", "model", "int", "real", "bool", "array", "select",
      "store", "to_real", "to_int", "is_int", "div", "mod", "abs", "const",
      "root", "exit", "push", "pop", "reset", "echo", "numeral", "decimal",
      "string", "binary", "hexadecimal", "continued", "declare", "define",
      "sym", "sym_intern", "sym_index"};
  return reserved.count(word) > 0;
}

namespace {

class Namer {
 public:
  // Base names that would shadow solver built-ins get a suffix.
  std::string claim(const std::string& base) {
    std::string name = base;
    for (int n = 1; is_reserved_smt_word(name) || taken_.count(name); ++n) {
      name = base + "_" + std::to_string(n);
    }
    taken_.insert(name);
    return name;
  }
  void take(const std::string& name) { taken_.insert(name); }

 private:
  std::set<std::string> taken_;
};

struct Lowering {
  const TypeRegistry& reg;
  TypeShape shape;
  Namer& namer;
  std::vector<DatatypeDecl> out;
  std::map<Sort, std::string> names;
  std::set<Sort> visiting;

  std::string builtin_name(const Sort& s) const {
    switch (s.kind) {
      case Sort::Kind::Bool: return "Bool";
      case Sort::Kind::Int: return "Int";
      case Sort::Kind::Real: return "Real";
      default: return {};
    }
  }

  std::string names_or_builtin(const Sort& s) const {
    if (auto b = builtin_name(s); !b.empty()) return b;
    return names.at(s);
  }

  std::string name_of(const Sort& s) {
    if (auto b = builtin_name(s); !b.empty()) return b;
    need(s);
    return names.at(s);
  }

  // Lower-case short name used inside pair datatype names.
  std::string short_name(const Sort& s) {
    switch (s.kind) {
      case Sort::Kind::Bool: return "bool";
      case Sort::Kind::Int: return "int";
      case Sort::Kind::Real: return "real";
      case Sort::Kind::Array: return "array_" + mangle(s.type);
      default: return name_of(s);
    }
  }

  void need(const Sort& s) {
    if (!builtin_name(s).empty() || names.count(s) || visiting.count(s)) return;
    visiting.insert(s);
    switch (s.kind) {
      case Sort::Kind::Sym: {
        DatatypeDecl d{s, "sym", {}};
        names[s] = "sym";
        d.constructors.push_back({ConstructorDecl::Role::Symbol, "sym_intern",
                                  {{"sym_index", Sort::integer()}}});
        out.push_back(std::move(d));
        break;
      }
      case Sort::Kind::Array:
        need(shape.key(s));
        need(Sort::pair(s.type));
        names[s] = "(Array " + names_or_builtin(shape.key(s)) + " " +
                   names_or_builtin(Sort::pair(s.type)) + ")";
        break;
      case Sort::Kind::Pair: {
        Sort k = shape.key(Sort::array(s.type));
        Sort v = shape.value(Sort::array(s.type));
        need(k);
        need(v);
        std::string base = short_name(k) + "_" + short_name(v);
        // Alists with the same key and value sorts share one pair type.
        for (const auto& d : out) {
          if (d.sort.kind == Sort::Kind::Pair && d.constructors[0].fields[0].second == k &&
              d.constructors[0].fields[1].second == v) {
            names[s] = d.smt_name;
            visiting.erase(s);
            return;
          }
        }
        std::string n = namer.claim(base);
        names[s] = n;
        DatatypeDecl d{s, n, {}};
        d.constructors.push_back({ConstructorDecl::Role::PairCons,
                                  namer.claim(n + "_cons"),
                                  {{namer.claim(n + "_car"), k},
                                   {namer.claim(n + "_cdr"), v}}});
        d.constructors.push_back(
            {ConstructorDecl::Role::PairNil, namer.claim(n + "_nil"), {}});
        out.push_back(std::move(d));
        break;
      }
      case Sort::Kind::Datatype: {
        const FtyTypeDef& def = shape.def(s.type);
        std::string n = namer.claim(mangle(s.type));
        names[s] = n;
        DatatypeDecl d{s, n, {}};
        if (const auto* l = std::get_if<ListDef>(&def)) {
          Sort e = shape.of(l->element_recognizer);
          need(e);
          d.constructors.push_back({ConstructorDecl::Role::ListCons,
                                    namer.claim(n + "_cons"),
                                    {{namer.claim(n + "_car"), e},
                                     {namer.claim(n + "_cdr"), s}}});
          d.constructors.push_back(
              {ConstructorDecl::Role::ListNil, namer.claim(n + "_nil"), {}});
        } else if (const auto* o = std::get_if<OptionDef>(&def)) {
          Sort b = shape.of(o->base_recognizer);
          need(b);
          d.constructors.push_back({ConstructorDecl::Role::OptionSome,
                                    namer.claim(n + "_some"),
                                    {{namer.claim(n + "_val"), b}}});
          d.constructors.push_back(
              {ConstructorDecl::Role::OptionNil, namer.claim(n + "_nil"), {}});
        } else if (const auto* p = std::get_if<ProdDef>(&def)) {
          ConstructorDecl c{ConstructorDecl::Role::Prod, namer.claim(n + "_make"),
                            {}};
          for (const auto& f : p->fields) {
            Sort fs = shape.of(f.recognizer);
            need(fs);
            std::string field = f.accessor.substr(p->name.size() + 2);
            c.fields.emplace_back(namer.claim(n + "_" + mangle(field)), fs);
          }
          d.constructors.push_back(std::move(c));
        } else {
          throw Error(ErrorKind::Contract, "alist is not a datatype");
        }
        out.push_back(std::move(d));
        break;
      }
      default:
        break;
    }
    visiting.erase(s);
  }
};

}  // namespace

std::vector<DatatypeDecl> lower_types(const TypeRegistry& reg,
                                      const std::vector<Sort>& sorts) {
  Namer namer;
  Lowering low{reg, {reg, false}, namer, {}, {}, {}};
  std::set<Sort> ordered(sorts.begin(), sorts.end());
  for (const auto& s : ordered) low.need(s);
  return low.out;
}

std::string datatype_declaration(const DatatypeDecl& d,
                                 const std::map<Sort, std::string>& sort_names) {
  auto sort_text = [&](const Sort& s) -> std::string {
    switch (s.kind) {
      case Sort::Kind::Bool: return "Bool";
      case Sort::Kind::Int: return "Int";
      case Sort::Kind::Real: return "Real";
      default: return sort_names.at(s);
    }
  };
  std::string out = "(declare-datatypes ((" + d.smt_name + " 0)) ((";
  for (std::size_t i = 0; i < d.constructors.size(); ++i) {
    const auto& c = d.constructors[i];
    if (i) out += ' ';
    out += "(" + c.name;
    for (const auto& [acc, s] : c.fields) {
      out += " (" + acc + " " + sort_text(s) + ")";
    }
    out += ")";
  }
  return out + ")))";
}

namespace {

bool is_destructor(const TypedTerm& t, const TypeRegistry& reg) {
  if (!t.term.is_app() || t.args.size() != 1) return false;
  const std::string& fn = t.term.name();
  const Sort& s = t.args[0].sort;
  if (fn == "CAR" || fn == "CDR") {
    if (s.kind == Sort::Kind::Pair) return true;
    if (s.kind == Sort::Kind::Datatype) {
      const FtyTypeDef* d = reg.type(s.type);
      return d && std::holds_alternative<ListDef>(*d);
    }
    return false;
  }
  auto role = reg.fty_role(fn);
  return role && role->tag == FtyRole::Tag::ValAccessor;
}

Term destructor_literal(const TypedTerm& t) {
  const Term& x = t.args[0].term;
  if (t.term.is_app("CAR") || t.term.is_app("CDR")) {
    return Term::app("CONSP", {x});
  }
  return make_not(
      Term::app("EQUAL", {x, Term::fix(Term::nil(), t.args[0].sort.type)}));
}

void walk_destructors(
    const TypedTerm& t, std::vector<Term>& ctx, const TypeRegistry& reg,
    const std::function<void(const TypedTerm&, const std::vector<Term>&)>& f) {
  if (is_destructor(t, reg)) f(t, ctx);
  const Term& term = t.term;
  auto child = [&](std::size_t i, const std::vector<Term>& extra) {
    std::size_t mark = ctx.size();
    ctx.insert(ctx.end(), extra.begin(), extra.end());
    walk_destructors(t.args[i], ctx, reg, f);
    ctx.resize(mark);
  };
  if (term.is_app("IF") && t.args.size() == 3) {
    child(0, {});
    child(1, flatten_and(term.arg(0)));
    child(2, {negate(term.arg(0))});
    return;
  }
  if (term.is_app("AND")) {
    std::vector<Term> before;
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      child(i, before);
      auto conj = flatten_and(term.arg(i));
      before.insert(before.end(), conj.begin(), conj.end());
    }
    return;
  }
  if (term.is_app("OR")) {
    std::vector<Term> before;
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      child(i, before);
      before.push_back(negate(term.arg(i)));
    }
    return;
  }
  if (term.is_app("IMPLIES") && t.args.size() == 2) {
    child(0, {});
    child(1, flatten_and(term.arg(0)));
    return;
  }
  for (std::size_t i = 0; i < t.args.size(); ++i) child(i, {});
}

}  // namespace

std::vector<Precondition> gen_preconditions(const SortedGoal& g,
                                            const TypeRegistry& reg) {
  std::vector<Precondition> out;
  auto scan = [&](const TypedDisjunct& td) {
    std::vector<Term> ctx;
    walk_destructors(td.term, ctx, reg,
                     [&](const TypedTerm& node, const std::vector<Term>& path) {
                       std::vector<Term> lits;
                       for (std::size_t j = 0; j < g.clause.size(); ++j) {
                         if (j != td.disjunct) lits.push_back(g.clause[j]);
                       }
                       for (const auto& p : path) lits.push_back(negate(p));
                       Term lit = destructor_literal(node);
                       lits.push_back(lit);
                       out.push_back({Clause(std::move(lits)), lit, path,
                                      td.disjunct,
                                      "disjunct " + std::to_string(td.disjunct + 1) +
                                          ": " + print_term(node.term)});
                     });
  };
  for (const auto& td : g.assumptions) scan(td);
  for (const auto& td : g.body) scan(td);
  return out;
}

std::size_t count_destructors(const SortedGoal& g, const TypeRegistry& reg) {
  std::size_t n = 0;
  std::function<void(const TypedTerm&)> go = [&](const TypedTerm& t) {
    if (is_destructor(t, reg)) ++n;
    for (const auto& a : t.args) go(a);
  };
  for (const auto& td : g.assumptions) go(td.term);
  for (const auto& td : g.body) go(td.term);
  return n;
}

const ConstructorDecl* SmtScript::constructor(const std::string& smt_name,
                                              const DatatypeDecl** owner) const {
  for (const auto& d : datatypes) {
    for (const auto& c : d.constructors) {
      if (c.name == smt_name) {
        if (owner) *owner = &d;
        return &c;
      }
    }
  }
  return nullptr;
}

const DatatypeDecl* SmtScript::datatype(const Sort& s) const {
  auto it = sort_names.find(s);
  if (it == sort_names.end()) return nullptr;
  for (const auto& d : datatypes) {
    if (d.smt_name == it->second) return &d;
  }
  return nullptr;
}

namespace {

std::string int_text(const BigInt& n, bool real) {
  std::string digits = (n < 0 ? BigInt(-n) : n).str();
  if (real) digits += ".0";
  return n < 0 ? "(- " + digits + ")" : digits;
}

std::string number_text(const Rational& q, bool real) {
  if (is_integral(q)) return int_text(numerator_of(q), real);
  BigInt num = numerator_of(q);
  BigInt den = denominator_of(q);
  std::string body = "(/ " + (num < 0 ? BigInt(-num) : num).str() + ".0 " +
                     den.str() + ".0)";
  return num < 0 ? "(- " + body + ")" : body;
}

class Emitter {
 public:
  Emitter(const SortedGoal& g, const TypeRegistry& reg, const SymbolIntern& si,
          SmtScript& script)
      : g_(g), reg_(reg), si_(si), script_(script), shape_{reg, false} {}

  std::string expr(const TypedTerm& t, const Sort& want) {
    std::string e = raw(t);
    if (want.kind == Sort::Kind::Real && t.sort.kind == Sort::Kind::Int) {
      if (t.term.is_const() && t.term.constant().is_number()) {
        return number_text(t.term.constant().number_value(), true);
      }
      return "(to_real " + e + ")";
    }
    return e;
  }

 private:
  std::string sort_name(const Sort& s) const {
    switch (s.kind) {
      case Sort::Kind::Bool: return "Bool";
      case Sort::Kind::Int: return "Int";
      case Sort::Kind::Real: return "Real";
      case Sort::Kind::Array:
        return "(Array " + sort_name(shape_.key(s)) + " " +
               sort_name(Sort::pair(s.type)) + ")";
      default: return script_.sort_names.at(s);
    }
  }

  const DatatypeDecl& dt(const Sort& s) const {
    const DatatypeDecl* d = script_.datatype(s);
    if (!d) throw Error(ErrorKind::Contract, "no datatype for " + s.describe());
    return *d;
  }

  std::string nil_of(const Sort& s) const {
    if (s.kind == Sort::Kind::Array) {
      return "((as const " + sort_name(s) + ") " +
             dt(Sort::pair(s.type)).constructors[1].name + ")";
    }
    return dt(s).constructors.back().name;
  }

  std::string join(const std::string& op, const std::vector<TypedTerm>& args,
                   const Sort& want) {
    std::string out = "(" + op;
    for (const auto& a : args) out += " " + expr(a, want);
    return out + ")";
  }

  Sort common(const std::vector<TypedTerm>& args) const {
    Sort s = args.empty() ? Sort::integer() : args[0].sort;
    for (const auto& a : args) {
      if (a.sort.kind == Sort::Kind::Real) s = Sort::real();
    }
    return s;
  }

  std::string raw(const TypedTerm& t) {
    const Term& term = t.term;
    switch (term.kind()) {
      case Term::Kind::Var:
        return script_.var_names.at(term.name());
      case Term::Kind::Const: {
        const Constant& c = term.constant();
        switch (c.kind()) {
          case Constant::Kind::Bool: return c.bool_value() ? "true" : "false";
          case Constant::Kind::Int:
          case Constant::Kind::Rat:
            return number_text(c.number_value(), t.sort.kind == Sort::Kind::Real);
          case Constant::Kind::Sym:
            return "(sym_intern " +
                   std::to_string(*si_.index(c.symbol_name())) + ")";
        }
        break;
      }
      case Term::Kind::Fix:
        if (t.args.empty()) return nil_of(t.sort);
        return expr(t.args[0], t.sort);
      case Term::Kind::TypeHyp:
        if (t.args.empty()) return "true";
        if (t.args.size() == 1) return expr(t.args[0], Sort::boolean());
        return join("and", t.args, Sort::boolean());
      case Term::Kind::App:
        break;
    }
    return app(t);
  }

  std::string app(const TypedTerm& t) {
    const std::string& fn = t.term.name();
    const auto& a = t.args;
    const bool real = t.sort.kind == Sort::Kind::Real;
    if (fn == "+" || fn == "*") {
      if (a.empty()) return fn == "+" ? number_text(0, real) : number_text(1, real);
      if (a.size() == 1) return expr(a[0], t.sort);
      return join(fn, a, t.sort);
    }
    if (fn == "-") return join("-", a, t.sort);
    if (fn == "/") {
      if (a.size() == 1) return "(/ 1.0 " + expr(a[0], Sort::real()) + ")";
      return join("/", a, Sort::real());
    }
    if (fn == "^") {
      std::size_t n = numerator_of(t.term.arg(1).constant().number_value())
                          .convert_to<std::size_t>();
      if (n == 0) return number_text(1, real);
      std::string base = expr(a[0], t.sort);
      if (n == 1) return base;
      std::string out = "(*";
      for (std::size_t i = 0; i < n; ++i) out += " " + base;
      return out + ")";
    }
    if (fn == "<" || fn == "<=" || fn == ">" || fn == ">=" || fn == "=") {
      return join(fn, a, common(a));
    }
    if (fn == "/=") return "(not " + join("=", a, common(a)) + ")";
    if (fn == "NOT") return join("not", a, Sort::boolean());
    if (fn == "AND" || fn == "OR") {
      if (a.empty()) return fn == "AND" ? "true" : "false";
      if (a.size() == 1) return expr(a[0], Sort::boolean());
      return join(fn == "AND" ? "and" : "or", a, Sort::boolean());
    }
    if (fn == "IMPLIES") return join("=>", a, Sort::boolean());
    if (fn == "IFF") return join("=", a, Sort::boolean());
    if (fn == "IF") {
      return "(ite " + expr(a[0], Sort::boolean()) + " " + expr(a[1], t.sort) +
             " " + expr(a[2], t.sort) + ")";
    }
    if (fn == "EQUAL") {
      Sort s = a[0].sort.numeric() && a[1].sort.numeric() ? common(a) : a[0].sort;
      return join("=", a, s);
    }
    if (fn == "HINT-PLEASE") return "false";
    if (fn == "CONSP") {
      const Sort& s = a[0].sort;
      if (s.kind == Sort::Kind::Datatype || s.kind == Sort::Kind::Pair) {
        return "(not (= " + expr(a[0], s) + " " + nil_of(s) + "))";
      }
      return "false";
    }
    if (fn == "CAR" || fn == "CDR") {
      const auto& fields = dt(a[0].sort).constructors[0].fields;
      return "(" + fields[fn == "CAR" ? 0 : 1].first + " " + expr(a[0], a[0].sort) +
             ")";
    }
    if (fn == "CONS") {
      const auto& c = dt(t.sort).constructors[0];
      return "(" + c.name + " " + expr(a[0], c.fields[0].second) + " " +
             expr(a[1], t.sort) + ")";
    }
    if (fn == "ACONS") {
      const auto& c = dt(Sort::pair(t.sort.type)).constructors[0];
      std::string k = expr(a[0], c.fields[0].second);
      return "(store " + expr(a[2], t.sort) + " " + k + " (" + c.name + " " + k +
             " " + expr(a[1], c.fields[1].second) + "))";
    }
    if (fn == "ASSOC-EQUAL") {
      Sort key = shape_.key(a[1].sort);
      return "(select " + expr(a[1], a[1].sort) + " " + expr(a[0], key) + ")";
    }
    if (fn == "BOOLEANP" || fn == "INTEGERP" || fn == "RATIONALP" ||
        fn == "SYMBOLP" || (reg_.fty_role(fn) &&
                            reg_.fty_role(fn)->tag == FtyRole::Tag::Recognizer)) {
      return recognizer(fn, a[0]);
    }
    if (auto role = reg_.fty_role(fn)) {
      switch (role->tag) {
        case FtyRole::Tag::Constructor:
        case FtyRole::Tag::SomeConstructor: {
          const auto& c = dt(t.sort).constructors[0];
          std::string out = "(" + c.name;
          for (std::size_t i = 0; i < a.size(); ++i) {
            out += " " + expr(a[i], c.fields[i].second);
          }
          return out + ")";
        }
        case FtyRole::Tag::Accessor:
        case FtyRole::Tag::ValAccessor: {
          const auto& c = dt(a[0].sort).constructors[0];
          return "(" + c.fields[role->field].first + " " + expr(a[0], a[0].sort) +
                 ")";
        }
        default:
          break;
      }
    }
    auto sig = g_.functions.find(fn);
    if (sig != g_.functions.end()) {
      const std::string& name = script_.function_names.at(fn);
      if (a.empty()) return name;
      std::string out = "(" + name;
      for (std::size_t i = 0; i < a.size(); ++i) {
        out += " " + expr(a[i], sig->second.args[i]);
      }
      return out + ")";
    }
    throw Error(ErrorKind::UnsupportedOp, "cannot emit " + fn);
  }

  std::string recognizer(const std::string& fn, const TypedTerm& arg) {
    Sort want = sort_of_recognizer(reg_, fn, false);
    const Sort& got = arg.sort;
    if (want == got) return "true";
    if (want.kind == Sort::Kind::Real && got.kind == Sort::Kind::Int) return "true";
    if (want.kind == Sort::Kind::Int && got.kind == Sort::Kind::Real) {
      return "(is_int " + expr(arg, got) + ")";
    }
    if (want.kind == Sort::Kind::Sym && got.kind == Sort::Kind::Bool) return "true";
    return "false";
  }

  const SortedGoal& g_;
  const TypeRegistry& reg_;
  const SymbolIntern& si_;
  SmtScript& script_;
  TypeShape shape_;
};

void collect_sorts(const TypedTerm& t, std::set<Sort>& out) {
  out.insert(t.sort);
  for (const auto& a : t.args) collect_sorts(a, out);
}

}  // namespace

SmtScript emit_script(const SortedGoal& g, const TypeRegistry& reg,
                      const SymbolIntern& interns) {
  SmtScript script;
  script.interns = interns;
  std::set<Sort> used;
  for (const auto& [n, s] : g.vars) used.insert(s);
  for (const auto& [n, sig] : g.functions) {
    used.insert(sig.result);
    used.insert(sig.args.begin(), sig.args.end());
  }
  for (const auto& td : g.assumptions) collect_sorts(td.term, used);
  for (const auto& td : g.body) collect_sorts(td.term, used);
  if (interns.size() > 0) used.insert(Sort::symbol());

  Namer namer;
  Lowering low{reg, {reg, false}, namer, {}, {}, {}};
  for (const auto& s : used) low.need(s);
  script.datatypes = low.out;
  script.sort_names = low.names;

  for (const auto& [name, sig] : g.functions) {
    script.function_names[name] = namer.claim(mangle(name));
  }
  for (const auto& [name, s] : g.vars) {
    script.var_names[name] = namer.claim(mangle(name));
    script.var_sorts[name] = s;
  }

  std::ostringstream out;
  out << "(set-option :produce-models true)\n(set-logic ALL)\n";
  for (const auto& d : script.datatypes) {
    out << datatype_declaration(d, script.sort_names) << "\n";
  }
  Emitter em(g, reg, interns, script);
  auto sort_text = [&](const Sort& s) {
    if (s.kind == Sort::Kind::Array) {
      return "(Array " + low.name_of(TypeShape{reg, false}.key(s)) + " " +
             low.name_of(Sort::pair(s.type)) + ")";
    }
    return low.name_of(s);
  };
  for (const auto& [name, sig] : g.functions) {
    out << "(declare-fun " << script.function_names[name] << " (";
    for (std::size_t i = 0; i < sig.args.size(); ++i) {
      out << (i ? " " : "") << sort_text(sig.args[i]);
    }
    out << ") " << sort_text(sig.result) << ")\n";
  }
  for (const auto& [name, s] : g.vars) {
    out << "(declare-const " << script.var_names[name] << " " << sort_text(s)
        << ")\n";
  }
  for (const auto& td : g.assumptions) {
    out << "(assert " << em.expr(td.term, Sort::boolean()) << ")\n";
  }
  if (g.body.empty()) {
    out << "(assert (not false))\n";
  } else if (g.body.size() == 1) {
    out << "(assert (not " << em.expr(g.body[0].term, Sort::boolean()) << "))\n";
  } else {
    out << "(assert (not (or";
    for (const auto& td : g.body) out << "\n  " << em.expr(td.term, Sort::boolean());
    out << ")))\n";
  }
  script.body = out.str();
  return script;
}

SmtScript lower_clause(const Clause& g, const TypeRegistry& reg,
                       const HintSpec& hints, SortedGoal* sorted) {
  SortedGoal sg = infer_sorts(g, reg, hints);
  SymbolIntern si = intern_symbols(g);
  SmtScript script = emit_script(sg, reg, si);
  if (sorted) *sorted = std::move(sg);
  return script;
}

}  // namespace smtlink
