#include "smtlink/term.hpp"

#include <algorithm>
#include <cctype>

#include "smtlink/error.hpp"

namespace smtlink {

Constant Constant::boolean(bool value) {
  Constant c;
  c.kind_ = Kind::Bool;
  c.bool_ = value;
  return c;
}

Constant Constant::number(Rational value) {
  Constant c;
  c.kind_ = is_integral(value) ? Kind::Int : Kind::Rat;
  c.number_ = std::move(value);
  return c;
}

Constant Constant::symbol(std::string name) {
  Constant c;
  c.kind_ = Kind::Sym;
  c.symbol_ = std::move(name);
  return c;
}

bool operator==(const Constant& a, const Constant& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case Constant::Kind::Bool: return a.bool_ == b.bool_;
    case Constant::Kind::Int:
    case Constant::Kind::Rat: return a.number_ == b.number_;
    case Constant::Kind::Sym: return a.symbol_ == b.symbol_;
  }
  return false;
}

bool operator<(const Constant& a, const Constant& b) {
  if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
  switch (a.kind_) {
    case Constant::Kind::Bool: return a.bool_ < b.bool_;
    case Constant::Kind::Int:
    case Constant::Kind::Rat: return a.number_ < b.number_;
    case Constant::Kind::Sym: return a.symbol_ < b.symbol_;
  }
  return false;
}

const char* marker_keyword(MarkerTag tag) {
  return tag == MarkerTag::Type ? ":TYPE" : ":RETURN";
}

struct Term::Node {
  Kind kind;
  std::string name;
  Constant constant;
  std::vector<Term> args;
  MarkerTag tag = MarkerTag::Type;
  std::size_t nodes = 1;
};

namespace {

std::size_t sum_nodes(const std::vector<Term>& args) {
  std::size_t n = 1;
  for (const auto& a : args) n += a.node_count();
  return n;
}

}  // namespace

Term::Term() : Term(nil()) {}

Term Term::var(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->name = std::move(name);
  return Term(std::move(n));
}

Term Term::constant(Constant c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Const;
  n->constant = std::move(c);
  return Term(std::move(n));
}

Term Term::app(std::string fn, std::vector<Term> args) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::App;
  n->name = std::move(fn);
  n->nodes = sum_nodes(args);
  n->args = std::move(args);
  return Term(std::move(n));
}

Term Term::type_hyp(std::vector<Term> items, MarkerTag tag) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::TypeHyp;
  n->nodes = sum_nodes(items);
  n->args = std::move(items);
  n->tag = tag;
  return Term(std::move(n));
}

Term Term::fix(Term operand, std::string type_name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Fix;
  n->name = std::move(type_name);
  n->nodes = 1 + operand.node_count();
  n->args.push_back(std::move(operand));
  return Term(std::move(n));
}

Term Term::t() { return constant(Constant::boolean(true)); }
Term Term::nil() { return constant(Constant::boolean(false)); }
Term Term::integer(long value) { return constant(Constant::number(value)); }
Term Term::number(Rational value) {
  return constant(Constant::number(std::move(value)));
}
Term Term::quoted(std::string symbol) {
  return constant(Constant::symbol(std::move(symbol)));
}

Term::Kind Term::kind() const noexcept { return node_->kind; }
bool Term::is_app(std::string_view fn) const noexcept {
  return node_->kind == Kind::App && node_->name == fn;
}
bool Term::is_type_hyp(MarkerTag tag) const noexcept {
  return node_->kind == Kind::TypeHyp && node_->tag == tag;
}
bool Term::is_nil() const noexcept {
  return node_->kind == Kind::Const && node_->constant.is_bool() &&
         !node_->constant.bool_value();
}
bool Term::is_t() const noexcept {
  return node_->kind == Kind::Const && node_->constant.is_bool() &&
         node_->constant.bool_value();
}
const std::string& Term::name() const noexcept { return node_->name; }
const Constant& Term::constant() const noexcept { return node_->constant; }
const std::vector<Term>& Term::args() const noexcept { return node_->args; }
MarkerTag Term::tag() const noexcept { return node_->tag; }
const Term& Term::operand() const noexcept { return node_->args.front(); }
std::size_t Term::node_count() const noexcept { return node_->nodes; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind || x.nodes != y.nodes) return false;
  switch (x.kind) {
    case Term::Kind::Var: return x.name == y.name;
    case Term::Kind::Const: return x.constant == y.constant;
    case Term::Kind::App:
    case Term::Kind::Fix: return x.name == y.name && x.args == y.args;
    case Term::Kind::TypeHyp: return x.tag == y.tag && x.args == y.args;
  }
  return false;
}

bool operator<(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return x.kind < y.kind;
  switch (x.kind) {
    case Term::Kind::Var: return x.name < y.name;
    case Term::Kind::Const: return x.constant < y.constant;
    case Term::Kind::TypeHyp:
      if (x.tag != y.tag) return x.tag < y.tag;
      return x.args < y.args;
    case Term::Kind::App:
    case Term::Kind::Fix:
      if (x.name != y.name) return x.name < y.name;
      return x.args < y.args;
  }
  return false;
}

Clause::Clause(std::vector<Term> disjuncts) : disjuncts_(std::move(disjuncts)) {
  if (disjuncts_.empty()) {
    throw Error(ErrorKind::Contract, "a clause needs at least one disjunct");
  }
}

Term make_not(const Term& t) { return Term::app("NOT", {t}); }

Term negate(const Term& t) {
  if (t.is_app("NOT")) return t.arg(0);
  if (t.is_t()) return Term::nil();
  if (t.is_nil()) return Term::t();
  return make_not(t);
}

Term make_and(std::vector<Term> conjuncts) {
  if (conjuncts.empty()) return Term::t();
  if (conjuncts.size() == 1) return conjuncts.front();
  return Term::app("AND", std::move(conjuncts));
}

Term make_or(std::vector<Term> disjuncts) {
  if (disjuncts.empty()) return Term::nil();
  if (disjuncts.size() == 1) return disjuncts.front();
  return Term::app("OR", std::move(disjuncts));
}

Term clause_term(const Clause& c) { return make_or(c.disjuncts()); }

Clause implication_clause(const Clause& antecedent, const Clause& consequent) {
  std::vector<Term> out;
  out.push_back(make_not(clause_term(antecedent)));
  for (const auto& d : consequent.disjuncts()) out.push_back(d);
  return Clause(std::move(out));
}

void visit(const Term& t, const std::function<bool(const Term&)>& visitor) {
  if (!visitor(t)) return;
  for (const auto& a : t.args()) visit(a, visitor);
}

std::set<std::string> free_vars(const Term& t) {
  std::set<std::string> out;
  visit(t, [&](const Term& s) {
    if (s.is_var()) out.insert(s.name());
    return true;
  });
  return out;
}

std::set<std::string> free_vars(const Clause& c) {
  std::set<std::string> out;
  for (const auto& d : c.disjuncts()) out.merge(free_vars(d));
  return out;
}

Term substitute(const Term& t, const std::map<std::string, Term>& binding) {
  switch (t.kind()) {
    case Term::Kind::Var: {
      auto it = binding.find(t.name());
      return it == binding.end() ? t : it->second;
    }
    case Term::Kind::Const:
      return t;
    case Term::Kind::App:
    case Term::Kind::TypeHyp:
    case Term::Kind::Fix: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      bool changed = false;
      for (const auto& a : t.args()) {
        args.push_back(substitute(a, binding));
        changed = changed || !(args.back() == a);
      }
      if (!changed) return t;
      if (t.is_app()) return Term::app(t.name(), std::move(args));
      if (t.is_fix()) return Term::fix(std::move(args.front()), t.name());
      return Term::type_hyp(std::move(args), t.tag());
    }
  }
  return t;
}

bool occurs_fn(const Term& t, std::string_view fn) {
  return count_calls(t, fn) > 0;
}

std::size_t count_calls(const Term& t, std::string_view fn) {
  std::size_t n = 0;
  visit(t, [&](const Term& s) {
    if (s.is_app(fn)) ++n;
    return true;
  });
  return n;
}

namespace {

std::string print_constant(const Constant& c) {
  switch (c.kind()) {
    case Constant::Kind::Bool: return c.bool_value() ? "T" : "NIL";
    case Constant::Kind::Int:
    case Constant::Kind::Rat: return rational_text(c.number_value());
    case Constant::Kind::Sym: return "'" + c.symbol_name();
  }
  return {};
}

std::string print_list(const std::vector<Term>& items) {
  std::string out = "(LIST";
  for (const auto& i : items) out += " " + print_term(i);
  return out + ")";
}

std::string pretty(const Term& t, std::size_t indent, std::size_t width) {
  std::string flat = print_term(t);
  if (indent + flat.size() <= width || !t.is_app() || t.args().empty()) {
    return flat;
  }
  std::string head = "(" + t.name() + " ";
  std::size_t inner = indent + head.size();
  if (inner > width / 2) inner = indent + 2;
  std::string out = head;
  for (std::size_t i = 0; i < t.args().size(); ++i) {
    if (i == 0 && inner == indent + head.size()) {
      out += pretty(t.arg(i), inner, width);
    } else {
      if (i == 0) out.pop_back();
      out += "\n" + std::string(inner, ' ') + pretty(t.arg(i), inner, width);
    }
  }
  return out + ")";
}

}  // namespace

std::string print_term(const Term& t) {
  switch (t.kind()) {
    case Term::Kind::Var: return t.name();
    case Term::Kind::Const: return print_constant(t.constant());
    case Term::Kind::App: {
      std::string out = "(" + t.name();
      for (const auto& a : t.args()) out += " " + print_term(a);
      return out + ")";
    }
    case Term::Kind::TypeHyp:
      return "(TYPE-HYP " + print_list(t.args()) + " " +
             marker_keyword(t.tag()) + ")";
    case Term::Kind::Fix:
      return "(AS " + print_term(t.operand()) + " " + t.name() + ")";
  }
  return {};
}

std::string print_clause(const Clause& c) {
  std::string out = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += " ";
    out += print_term(c[i]);
  }
  return out + ")";
}

std::string print_term_pretty(const Term& t, std::size_t width) {
  return pretty(t, 0, width);
}

std::string print_clause_pretty(const Clause& c, std::size_t width) {
  std::string out = "(";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += "\n ";
    out += pretty(c[i], 1, width);
  }
  return out + ")";
}

std::string canonical_name(std::string_view name) {
  std::string out(name);
  std::transform(out.begin(), out.end(), out.begin(), [](char ch) {
    return static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  });
  return out;
}

}  // namespace smtlink
