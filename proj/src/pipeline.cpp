#include "smtlink/pipeline.hpp"

#include <algorithm>
#include <limits>

namespace smtlink {

const char* to_string(Stage s) {
  switch (s) {
    case Stage::Processed: return "processed";
    case Stage::HypoAdded: return "hypo-added";
    case Stage::Expanded: return "expanded";
    case Stage::TypeExtracted: return "type-extracted";
    case Stage::UninterpDone: return "uninterp-done";
    case Stage::Lowered: return "lowered";
  }
  return "";
}

const char* to_string(PassId p) {
  switch (p) {
    case PassId::AddHypo: return "add-hypo";
    case PassId::Expand: return "expand";
    case PassId::TypeExtract: return "type-extract";
    case PassId::UninterpReturns: return "uninterp-returns";
  }
  return "";
}

Stage stage_after(PassId p) {
  switch (p) {
    case PassId::AddHypo: return Stage::HypoAdded;
    case PassId::Expand: return Stage::Expanded;
    case PassId::TypeExtract: return Stage::TypeExtracted;
    case PassId::UninterpReturns: return Stage::UninterpDone;
  }
  return Stage::Processed;
}

ArchTable ArchTable::standard() {
  return {{PassId::AddHypo, PassId::Expand, PassId::TypeExtract,
           PassId::UninterpReturns}};
}

Stage ArchTable::predecessor(PassId p) const {
  auto it = std::find(passes.begin(), passes.end(), p);
  if (it == passes.end()) {
    throw Error(ErrorKind::Contract,
                std::string("pass ") + to_string(p) + " not in the table");
  }
  if (it == passes.begin()) return Stage::Processed;
  return stage_after(*(it - 1));
}

std::optional<PassId> ArchTable::successor(PassId p) const {
  auto it = std::find(passes.begin(), passes.end(), p);
  if (it == passes.end() || it + 1 == passes.end()) return std::nullopt;
  return *(it + 1);
}

void ArchTable::validate() const {
  if (passes.empty()) throw Error(ErrorKind::Contract, "empty pass table");
  std::set<PassId> seen;
  for (auto p : passes) {
    if (!seen.insert(p).second) {
      throw Error(ErrorKind::Contract,
                  std::string("pass ") + to_string(p) + " listed twice");
    }
  }
}

std::vector<Term> flatten_and(const Term& t) {
  if (t.is_app("AND")) {
    std::vector<Term> out;
    for (const auto& a : t.args()) {
      auto sub = flatten_and(a);
      out.insert(out.end(), sub.begin(), sub.end());
    }
    return out;
  }
  if (t.is_t()) return {};
  return {t};
}

namespace {

void clausify_into(const Term& t, std::vector<Term>& out) {
  if (t.is_app("IMPLIES")) {
    for (const auto& h : flatten_and(t.arg(0))) out.push_back(negate(h));
    clausify_into(t.arg(1), out);
  } else if (t.is_app("OR")) {
    for (const auto& a : t.args()) clausify_into(a, out);
  } else if (t.is_nil() && !out.empty()) {
    // A nil disjunct adds nothing.
  } else {
    out.push_back(t);
  }
}

void require_stage(const PipelineState& st, PassId pass) {
  Stage want = st.arch.predecessor(pass);
  if (st.stage != want) {
    throw Error(ErrorKind::Contract,
                std::string(to_string(pass)) + " requires stage " +
                    to_string(want) + ", found " + to_string(st.stage));
  }
}

void finish(PipelineState& st, PassId pass) {
  st.stage = stage_after(pass);
  st.trace.push_back({st.stage, st.main});
}

constexpr std::size_t kUnbounded = std::numeric_limits<std::size_t>::max();

class Expander {
 public:
  Expander(const TypeRegistry& reg, const HintSpec& hints)
      : reg_(reg), hints_(hints), cap_(hints.cap()) {}

  Term run(const Term& t) {
    std::map<std::string, std::size_t> budget;
    return go(t, budget);
  }

 private:
  std::size_t remaining(const std::string& fn,
                        const std::map<std::string, std::size_t>& budget) {
    auto it = budget.find(fn);
    if (it != budget.end()) return it->second;
    return expansion_depth(fn, reg_, hints_);
  }

  void check(const Term& t) {
    if (t.node_count() > cap_) {
      throw Error(ErrorKind::ExpansionBlowup,
                  "expanded term exceeds " + std::to_string(cap_) + " nodes");
    }
  }

  Term go(const Term& t, const std::map<std::string, std::size_t>& budget) {
    switch (t.kind()) {
      case Term::Kind::Var:
      case Term::Kind::Const:
        return t;
      case Term::Kind::Fix:
        return Term::fix(go(t.operand(), budget), t.name());
      case Term::Kind::TypeHyp: {
        std::vector<Term> items;
        for (const auto& a : t.args()) items.push_back(go(a, budget));
        return Term::type_hyp(std::move(items), t.tag());
      }
      case Term::Kind::App:
        break;
    }
    std::vector<Term> args;
    args.reserve(t.args().size());
    for (const auto& a : t.args()) args.push_back(go(a, budget));
    const FnDef* fn = reg_.function(t.name());
    std::size_t left = fn ? remaining(t.name(), budget) : 0;
    if (!fn || left == 0) {
      Term out = Term::app(t.name(), std::move(args));
      check(out);
      return out;
    }
    auto inner = budget;
    inner[t.name()] = left == kUnbounded ? kUnbounded : left - 1;
    Term body = go(fn->body, inner);
    std::map<std::string, Term> binding;
    for (std::size_t i = 0; i < fn->formals.size(); ++i) {
      binding[fn->formals[i]] = args[i];
    }
    Term out = substitute(body, binding);
    check(out);
    return out;
  }

  const TypeRegistry& reg_;
  const HintSpec& hints_;
  std::size_t cap_;
};

}  // namespace

Clause clausify(const Term& goal) {
  std::vector<Term> out;
  clausify_into(goal, out);
  if (out.empty()) out.push_back(Term::nil());
  return Clause(std::move(out));
}

PipelineState process_hint(const Clause& goal, const HintSpec& user,
                           const HintSpec& defaults, const TypeRegistry& reg,
                           ArchTable arch) {
  arch.validate();
  HintSpec merged = merge_hints(defaults, user);
  validate_hints(merged, reg);
  return PipelineState{goal, goal, Ledger{}, Stage::Processed, {},
                       std::move(merged), std::move(arch), {}};
}

PipelineState add_hypo(PipelineState st, const TypeRegistry&) {
  require_stage(st, PassId::AddHypo);
  std::vector<Term> main;
  for (const auto& h : st.hints.hypotheses) main.push_back(negate(h.term));
  const auto& g = st.main.disjuncts();
  main.insert(main.end(), g.begin(), g.end());
  for (std::size_t i = 0; i < st.hints.hypotheses.size(); ++i) {
    const auto& h = st.hints.hypotheses[i];
    std::vector<Term> ob{h.term};
    ob.insert(ob.end(), g.begin(), g.end());
    Evidence ev;
    ev.before = st.main;
    st.ledger.add(Clause(std::move(ob)), Origin::AddHypo,
                  h.note ? Strategy::UserAssumed : Strategy::Syntactic,
                  h.note.value_or(""), "hint :hypotheses " + std::to_string(i + 1),
                  std::move(ev));
  }
  st.main = Clause(std::move(main));
  finish(st, PassId::AddHypo);
  return st;
}

std::size_t expansion_depth(const std::string& fn, const TypeRegistry& reg,
                            const HintSpec& hints) {
  const FnDef* def = reg.function(fn);
  if (!def) return 0;
  auto ov = hints.expand.find(fn);
  if (ov != hints.expand.end()) {
    if (ov->second.kind == ExpandOverride::Kind::Uninterpreted) return 0;
    if (!def->recursive && ov->second.depth > 0) return kUnbounded;
    return ov->second.depth;
  }
  if (hints.uninterp.count(fn)) return 0;
  return def->recursive ? 1 : kUnbounded;
}

Term expand_term(const Term& t, const TypeRegistry& reg, const HintSpec& hints) {
  return Expander(reg, hints).run(t);
}

Clause expand_clause(const Clause& c, const TypeRegistry& reg,
                     const HintSpec& hints) {
  Expander ex(reg, hints);
  std::vector<Term> out;
  std::size_t total = 0;
  for (const auto& d : c.disjuncts()) {
    out.push_back(ex.run(d));
    total += out.back().node_count();
    if (total > hints.cap()) {
      throw Error(ErrorKind::ExpansionBlowup,
                  "expanded clause exceeds " + std::to_string(hints.cap()) +
                      " nodes");
    }
  }
  return Clause(std::move(out));
}

PipelineState expand(PipelineState st, const TypeRegistry& reg) {
  require_stage(st, PassId::Expand);
  Clause before = st.main;
  Clause after = expand_clause(before, reg, st.hints);
  Evidence ev;
  ev.before = before;
  ev.after = after;
  st.ledger.add(implication_clause(after, before), Origin::Expand,
                Strategy::Syntactic, {}, "expand", std::move(ev));
  st.main = std::move(after);
  finish(st, PassId::Expand);
  return st;
}

bool is_type_hypothesis(const Term& t, const TypeRegistry& reg) {
  return t.is_app() && t.args().size() == 1 && t.arg(0).is_var() &&
         recognizer_kind(reg, t.name()).is_recognizer();
}

PipelineState type_extract(PipelineState st, const TypeRegistry& reg) {
  require_stage(st, PassId::TypeExtract);
  std::vector<Term> extracted;
  std::vector<Term> rest;
  for (const auto& d : st.main.disjuncts()) {
    if (d.is_app("NOT") && is_type_hypothesis(d.arg(0), reg)) {
      if (std::find(extracted.begin(), extracted.end(), d.arg(0)) ==
          extracted.end()) {
        extracted.push_back(d.arg(0));
      }
    } else {
      rest.push_back(d);
    }
  }
  if (st.faults.forge_extraction) {
    auto vars = free_vars(st.main);
    Term forged = Term::app("INTEGERP", {Term::var(vars.empty() ? "X" : *vars.begin())});
    if (std::find(extracted.begin(), extracted.end(), forged) == extracted.end()) {
      extracted.push_back(forged);
    }
  }
  std::vector<Term> main{make_not(Term::type_hyp(extracted, MarkerTag::Type))};
  main.insert(main.end(), rest.begin(), rest.end());
  Clause after(std::move(main));
  Evidence ev;
  ev.before = st.main;
  ev.after = after;
  ev.extracted = extracted;
  st.ledger.add(implication_clause(after, st.main), Origin::TypeExtract,
                Strategy::Syntactic, {}, "type-extract", std::move(ev));
  st.main = std::move(after);
  finish(st, PassId::TypeExtract);
  return st;
}

std::vector<Term> uninterp_call_sites(const Clause& c, const HintSpec& hints) {
  std::vector<Term> out;
  for (const auto& d : c.disjuncts()) {
    visit(d, [&](const Term& t) {
      if (t.is_app() && hints.uninterp.count(t.name()) &&
          std::find(out.begin(), out.end(), t) == out.end()) {
        out.push_back(t);
      }
      return true;
    });
  }
  return out;
}

std::vector<Term> return_facts(const Term& call, const UninterpSpec& spec,
                               const TypeRegistry& reg) {
  std::vector<Term> out{Term::app(spec.result_recognizer, {call})};
  const FnDef* fn = reg.function(call.name());
  if (!fn) return out;
  std::map<std::string, Term> binding;
  for (std::size_t i = 0; i < fn->formals.size(); ++i) {
    binding[fn->formals[i]] = call.arg(i);
  }
  for (const auto& c : spec.constraints) out.push_back(substitute(c, binding));
  return out;
}

PipelineState uninterp_returns(PipelineState st, const TypeRegistry& reg) {
  require_stage(st, PassId::UninterpReturns);
  auto calls = uninterp_call_sites(st.main, st.hints);
  if (!calls.empty()) {
    const auto& g = st.main.disjuncts();
    std::vector<Term> markers;
    for (const auto& call : calls) {
      auto facts = return_facts(call, st.hints.uninterp.at(call.name()), reg);
      for (std::size_t i = 0; i < facts.size(); ++i) {
        Term marker = Term::type_hyp({facts[i]}, MarkerTag::Return);
        markers.push_back(make_not(marker));
        std::vector<Term> ob{marker};
        ob.insert(ob.end(), g.begin(), g.end());
        Evidence ev;
        ev.before = st.main;
        ev.function = call.name();
        ev.fact = i;
        ev.literal = facts[i];
        st.ledger.add(Clause(std::move(ob)),
                      i == 0 ? Origin::UninterpReturn : Origin::UninterpConstraint,
                      Strategy::ViaSmt, {}, print_term(call), std::move(ev));
      }
    }
    std::vector<Term> main;
    std::size_t lead = (!g.empty() && g[0].is_app("NOT") &&
                        g[0].arg(0).is_type_hyp(MarkerTag::Type))
                           ? 1
                           : 0;
    main.insert(main.end(), g.begin(), g.begin() + lead);
    main.insert(main.end(), markers.begin(), markers.end());
    main.insert(main.end(), g.begin() + lead, g.end());
    st.main = Clause(std::move(main));
  }
  finish(st, PassId::UninterpReturns);
  return st;
}

PipelineState run_pass(PassId pass, PipelineState st, const TypeRegistry& reg) {
  switch (pass) {
    case PassId::AddHypo: return add_hypo(std::move(st), reg);
    case PassId::Expand: return expand(std::move(st), reg);
    case PassId::TypeExtract: return type_extract(std::move(st), reg);
    case PassId::UninterpReturns: return uninterp_returns(std::move(st), reg);
  }
  return st;
}

PipelineState run_pipeline(const Clause& goal, const HintSpec& hints,
                           const TypeRegistry& reg, ArchTable arch,
                           PipelineFaults faults) {
  PipelineState st = process_hint(goal, hints, HintSpec{}, reg, std::move(arch));
  st.faults = faults;
  const auto passes = st.arch.passes;
  for (auto p : passes) {
    Stage before = st.stage;
    try {
      st = run_pass(p, std::move(st), reg);
    } catch (const PipelineError&) {
      throw;
    } catch (const Error& e) {
      throw PipelineError(e, before, p);
    }
  }
  return st;
}

}  // namespace smtlink
