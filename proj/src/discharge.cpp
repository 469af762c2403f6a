#include "smtlink/discharge.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <thread>
#include <variant>

namespace smtlink {

std::optional<LemmaCache::Result> LemmaCache::find(const std::string& key) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = results_.find(key);
  if (it == results_.end()) return std::nullopt;
  return it->second;
}

void LemmaCache::store(const std::string& key, Result r) {
  std::lock_guard<std::mutex> lock(mu_);
  results_.emplace(key, std::move(r));
}

namespace {

bool contains(const std::vector<Term>& ts, const Term& t) {
  return std::find(ts.begin(), ts.end(), t) != ts.end();
}

DischargeResult settled(Status s, std::string detail) {
  return DischargeResult{s, std::move(detail)};
}

DischargeResult check_type_extract(const Obligation& ob) {
  const auto& ev = ob.evidence;
  if (!ev.before || !ev.after) return settled(Status::Failed, "missing evidence");
  const auto& before = ev.before->disjuncts();
  std::vector<Term> rest;
  for (const auto& t : ev.extracted) {
    if (!contains(before, make_not(t))) {
      return settled(Status::Failed,
                     print_term(t) + " was not a hypothesis of the goal");
    }
  }
  for (const auto& d : before) {
    if (d.is_app("NOT") && contains(ev.extracted, d.arg(0))) continue;
    rest.push_back(d);
  }
  std::vector<Term> expect{make_not(Term::type_hyp(ev.extracted, MarkerTag::Type))};
  expect.insert(expect.end(), rest.begin(), rest.end());
  if (!(Clause(expect) == *ev.after)) {
    return settled(Status::Failed, "extracted clause does not match its source");
  }
  if (!(ob.clause == implication_clause(*ev.after, *ev.before))) {
    return settled(Status::Failed, "obligation is not after => before");
  }
  return settled(Status::Discharged, "every extracted literal was a hypothesis");
}

DischargeResult check_expand(const Obligation& ob, const DischargeContext& ctx) {
  const auto& ev = ob.evidence;
  if (!ev.before || !ev.after) return settled(Status::Failed, "missing evidence");
  Clause again = expand_clause(*ev.before, *ctx.reg, ctx.hints);
  if (!(again == *ev.after)) {
    return settled(Status::Failed, "re-expansion gives a different clause");
  }
  if (!(ob.clause == implication_clause(*ev.after, *ev.before))) {
    return settled(Status::Failed, "obligation is not after => before");
  }
  return settled(Status::Discharged, "re-expansion reproduces the clause");
}

// A destructor argument that is syntactically a constructor application.
bool literal_trivially_true(const Term& lit) {
  if (lit.is_app("CONSP") && lit.arg(0).is_app("CONS")) return true;
  if (lit.is_app("NOT") && lit.arg(0).is_app("EQUAL")) {
    const Term& eq = lit.arg(0);
    auto nonnil = [](const Term& t) { return t.is_app("CONS") || t.is_t(); };
    if ((eq.arg(1).is_nil() && nonnil(eq.arg(0))) ||
        (eq.arg(0).is_nil() && nonnil(eq.arg(1)))) {
      return true;
    }
  }
  return false;
}

Stage final_stage(const PipelineState& st) {
  return stage_after(st.arch.passes.back());
}

// A state whose main clause is already in backend shape.
PipelineState ready_state(const Clause& c, const DischargeContext& ctx) {
  HintSpec hints = ctx.hints;
  hints.hypotheses.clear();
  PipelineState st = process_hint(c, hints, HintSpec{}, *ctx.reg);
  st.faults = ctx.faults;
  st.stage = final_stage(st);
  st.trace.push_back({st.stage, st.main});
  return st;
}

DischargeContext nested(const DischargeContext& ctx) {
  DischargeContext sub = ctx;
  sub.depth = ctx.depth + 1;
  sub.jobs = 1;
  return sub;
}

DischargeResult solve(PipelineState& st, const DischargeContext& ctx) {
  SmtCheck c = check_state(st, ctx);
  discharge_all(st.ledger, ctx);
  std::size_t failed = 0, open = 0;
  std::string first_failure;
  for (const auto& o : st.ledger.obligations()) {
    if (o.status == Status::Failed) {
      if (!failed++) first_failure = std::to_string(o.id) + ": " + o.detail;
    } else if (o.status == Status::Pending) {
      ++open;
    }
  }
  using K = SolverOutcome::Kind;
  if (c.outcome.kind != K::Unsat) {
    std::string why = std::string("solver said ") + to_string(c.outcome.kind);
    if (!c.outcome.reason.empty()) why += " (" + c.outcome.reason + ")";
    return settled(Status::Failed, why);
  }
  if (failed) {
    return settled(Status::Failed, "unsat but sub-obligation " + first_failure);
  }
  if (open) return settled(Status::Failed, "sub-obligations left pending");
  return settled(Status::Discharged,
                 "unsat; " + std::to_string(st.ledger.size()) + " sub-obligations");
}

// Argument types imply every return fact of `fn`, proven by one unfolding
// with the inner calls covered by the induction hypothesis.
LemmaCache::Result prove_lemma(const std::string& fn, const DischargeContext& ctx) {
  if (auto hit = ctx.lemmas->find(fn)) return *hit;
  const FnDef* def = ctx.reg->function(fn);
  const UninterpSpec& spec = ctx.hints.uninterp.at(fn);
  LemmaCache::Result r{true, {}};
  if (!def) {
    r = {false, "no definition for " + fn};
    ctx.lemmas->store(fn, r);
    return r;
  }
  std::vector<Term> formals;
  for (const auto& v : def->formals) formals.push_back(Term::var(v));
  Term call = Term::app(fn, formals);
  auto facts = return_facts(call, spec, *ctx.reg);

  HintSpec hints = ctx.hints;
  hints.hypotheses.clear();
  std::size_t depth = 1;
  auto ov = hints.expand.find(fn);
  if (ov != hints.expand.end() && ov->second.kind == ExpandOverride::Kind::Depth) {
    depth = std::max<std::size_t>(1, ov->second.depth);
  }
  hints.expand[fn] = ExpandOverride::with_depth(depth);

  DischargeContext sub = ctx;
  sub.hints = hints;
  sub.inducting.push_back(fn);
  for (std::size_t k = 0; k < facts.size() && r.proved; ++k) {
    std::vector<Term> goal;
    for (std::size_t i = 0; i < formals.size(); ++i) {
      goal.push_back(make_not(Term::app(spec.arg_recognizers[i], {formals[i]})));
    }
    goal.push_back(facts[k]);
    try {
      PipelineState st = run_pipeline(Clause(goal), hints, *ctx.reg,
                                      ArchTable::standard(), ctx.faults);
      auto res = solve(st, sub);
      if (res.status != Status::Discharged) {
        r = {false, "fact " + print_term(facts[k]) + ": " + res.detail};
      }
    } catch (const Error& e) {
      r = {false, "fact " + print_term(facts[k]) + " not translatable: " +
                      to_string(e.kind()) + ": " + e.what()};
    }
  }
  if (r.proved) r.detail = "return lemma for " + fn + " proven by induction";
  ctx.lemmas->store(fn, r);
  return r;
}

// Recognizer facts that hold by construction, e.g. (INTEGER-LIST-P (CDR L))
// given (INTEGER-LIST-P L), since the cdr of nil is nil.
bool typed_by_construction(const Term& t, const std::string& rec,
                           const std::vector<Term>& known, const TypeRegistry& reg) {
  if (contains(known, Term::app(rec, {t}))) return true;
  if (rec == "RATIONALP" && contains(known, Term::app("INTEGERP", {t}))) return true;
  if (t.is_const()) {
    const Constant& c = t.constant();
    if (rec == "INTEGERP") return c.kind() == Constant::Kind::Int;
    if (rec == "RATIONALP") return c.is_number();
    if (rec == "BOOLEANP") return c.is_bool();
  }
  const FtyTypeDef* def = reg.type_of_recognizer(rec);
  if (!def) return false;
  if (const auto* list = std::get_if<ListDef>(def)) {
    if (t.is_nil()) return true;
    if (t.is_app("CDR")) return typed_by_construction(t.arg(0), rec, known, reg);
    if (t.is_app("CONS")) {
      return typed_by_construction(t.arg(0), list->element_recognizer, known, reg) &&
             typed_by_construction(t.arg(1), rec, known, reg);
    }
  }
  if (std::holds_alternative<OptionDef>(*def) && t.is_nil()) return true;
  return false;
}

// The call's arguments satisfy the argument recognizers wherever the goal
// could fail.
DischargeResult check_call_arguments(const Obligation& ob, const Term& call,
                                     const DischargeContext& ctx) {
  const UninterpSpec& spec = ctx.hints.uninterp.at(call.name());
  std::vector<Term> g(ob.clause.disjuncts().begin() + 1, ob.clause.disjuncts().end());
  std::vector<Term> known;
  if (!g.empty() && g[0].is_app("NOT") && g[0].arg(0).is_type_hyp(MarkerTag::Type)) {
    known = g[0].arg(0).args();
  }
  for (std::size_t i = 0; i < call.args().size(); ++i) {
    Term need = Term::app(spec.arg_recognizers[i], {call.arg(i)});
    if (contains(g, need) ||
        typed_by_construction(call.arg(i), spec.arg_recognizers[i], known, *ctx.reg)) {
      continue;
    }
    std::vector<Term> c = g;
    c.push_back(need);
    PipelineState st = ready_state(Clause(c), ctx);
    auto res = solve(st, ctx);
    if (res.status != Status::Discharged) {
      return settled(Status::Failed,
                     "argument " + print_term(need) + ": " + res.detail);
    }
  }
  return settled(Status::Discharged, "arguments typed");
}

Term call_of(const Obligation& ob, const DischargeContext& ctx) {
  // The location holds the printed call; re-find it among the call sites.
  Clause rest(std::vector<Term>(ob.clause.disjuncts().begin() + 1,
                                ob.clause.disjuncts().end()));
  for (const auto& c : uninterp_call_sites(rest, ctx.hints)) {
    if (print_term(c) == ob.location) return c;
  }
  throw Error(ErrorKind::Contract, "call " + ob.location + " not found in its goal");
}

DischargeResult discharge_uninterp(const Obligation& ob, const DischargeContext& ctx) {
  const std::string& fn = ob.evidence.function;
  if (!ctx.hints.uninterp.count(fn)) {
    return settled(Status::Failed, "no uninterpreted spec for " + fn);
  }
  Term call = call_of(ob, ctx);
  std::string lemma;
  if (!ctx.inducting.empty() && ctx.inducting.back() == fn) {
    lemma = "induction hypothesis for " + fn;
  } else if (std::find(ctx.inducting.begin(), ctx.inducting.end(), fn) !=
                 ctx.inducting.end()) {
    return settled(Status::Failed, "circular return lemma for " + fn);
  } else {
    auto r = prove_lemma(fn, ctx);
    if (!r.proved) return settled(Status::Failed, r.detail);
    lemma = r.detail;
  }
  auto args = check_call_arguments(ob, call, ctx);
  if (args.status != Status::Discharged) return args;
  return settled(Status::Discharged, lemma + "; arguments typed");
}

}  // namespace

DischargeResult discharge_syntactic(const Obligation& ob, const DischargeContext& ctx) {
  try {
    switch (ob.origin) {
      case Origin::TypeExtract:
        return check_type_extract(ob);
      case Origin::Expand:
        return check_expand(ob, ctx);
      case Origin::AddHypo: {
        if (!ob.note.empty()) return {};
        const auto& d = ob.clause.disjuncts();
        if (d[0].is_t()) return settled(Status::Discharged, "hypothesis is T");
        std::vector<Term> g(d.begin() + 1, d.end());
        if (contains(g, negate(d[0]))) {
          return settled(Status::Discharged, "hypothesis already assumed by the goal");
        }
        return {};
      }
      case Origin::SmtPrecondition: {
        if (!ob.evidence.literal) return {};
        const Term& lit = *ob.evidence.literal;
        const auto& d = ob.clause.disjuncts();
        std::vector<Term> hyps(d.begin(), d.end() - 1);
        if (contains(hyps, negate(lit))) {
          return settled(Status::Discharged, "guarded by " + print_term(lit));
        }
        if (literal_trivially_true(lit)) {
          return settled(Status::Discharged, "argument is a constructor");
        }
        return {};
      }
      case Origin::UninterpReturn:
      case Origin::UninterpConstraint:
        return {};
    }
  } catch (const Error& e) {
    return settled(Status::Failed, e.what());
  }
  return {};
}

DischargeResult discharge_via_smt(const Obligation& ob, const DischargeContext& ctx) {
  if (ctx.depth >= ctx.depth_limit) {
    return settled(Status::Failed, "nesting limit reached");
  }
  DischargeContext sub = nested(ctx);
  try {
    switch (ob.origin) {
      case Origin::AddHypo: {
        HintSpec hints = ctx.hints;
        hints.hypotheses.clear();
        PipelineState st = run_pipeline(ob.clause, hints, *ctx.reg,
                                        ArchTable::standard(), ctx.faults);
        return solve(st, sub);
      }
      case Origin::SmtPrecondition: {
        PipelineState st = ready_state(ob.clause, sub);
        return solve(st, sub);
      }
      case Origin::UninterpReturn:
      case Origin::UninterpConstraint:
        return discharge_uninterp(ob, sub);
      case Origin::Expand:
      case Origin::TypeExtract:
        return discharge_syntactic(ob, ctx);
    }
  } catch (const Error& e) {
    return settled(Status::Failed, std::string("not translatable: ") + to_string(e.kind()) +
                                       ": " + e.what());
  }
  return settled(Status::Failed, "unhandled origin");
}

void discharge_all(Ledger& ledger, const DischargeContext& ctx) {
  std::vector<std::size_t> smt;
  for (const auto& ob : ledger.obligations()) {
    if (ob.status != Status::Pending) continue;
    if (ob.strategy == Strategy::UserAssumed) {
      ledger.resolve(ob.id, Status::Assumed, "assumed: " + ob.note);
      continue;
    }
    if (ob.strategy == Strategy::Syntactic) {
      auto r = discharge_syntactic(ob, ctx);
      if (r.status != Status::Pending) {
        ledger.resolve(ob.id, r.status, r.detail);
        continue;
      }
      ledger.set_strategy(ob.id, Strategy::ViaSmt);
    }
    smt.push_back(ob.id);
  }
  if (smt.empty()) return;

  std::vector<DischargeResult> results(smt.size());
  std::vector<double> millis(smt.size(), 0.0);
  std::vector<Obligation> work;
  for (auto id : smt) work.push_back(ledger.at(id));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < work.size(); i = next++) {
      auto t0 = std::chrono::steady_clock::now();
      results[i] = discharge_via_smt(work[i], ctx);
      millis[i] = std::chrono::duration<double, std::milli>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    }
  };
  std::size_t n = std::min(std::max<std::size_t>(ctx.jobs, 1), work.size());
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (std::size_t i = 0; i < smt.size(); ++i) {
    auto st = results[i].status == Status::Pending ? Status::Failed : results[i].status;
    ledger.resolve(smt[i], st, results[i].detail, millis[i]);
  }
}

const char* to_string(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Proved: return "PROVED";
    case Verdict::Kind::Refuted: return "REFUTED";
    case Verdict::Kind::Unknown: return "UNKNOWN";
    case Verdict::Kind::FailedObligation: return "FAILED-OBLIGATION";
  }
  return "UNKNOWN";
}

int exit_code(Verdict::Kind k) {
  switch (k) {
    case Verdict::Kind::Proved: return 0;
    case Verdict::Kind::Refuted: return 1;
    case Verdict::Kind::Unknown: return 2;
    case Verdict::Kind::FailedObligation: return 3;
  }
  return 2;
}

Verdict final_verdict(const Ledger& ledger, const SolverOutcome& main,
                      const std::optional<CexCheck>& check,
                      const std::optional<Counterexample>& cex) {
  Verdict v;
  std::size_t pending = 0;
  for (const auto& o : ledger.obligations()) {
    if (o.status == Status::Failed) v.failed.push_back(o.id);
    if (o.status == Status::Assumed) v.assumed.push_back(o.id);
    if (o.status == Status::Pending) ++pending;
  }
  using K = SolverOutcome::Kind;
  if (main.kind == K::Sat && check && check->kind == CexCheck::Kind::Confirmed) {
    v.kind = Verdict::Kind::Refuted;
    v.reason = "counterexample confirmed by evaluation";
    v.cex = cex;
    return v;
  }
  if (!v.failed.empty()) {
    v.kind = Verdict::Kind::FailedObligation;
    v.reason = std::to_string(v.failed.size()) + " obligation(s) failed";
    return v;
  }
  if (main.kind == K::Unsat && pending == 0) {
    v.kind = Verdict::Kind::Proved;
    v.reason = v.assumed.empty()
                   ? "unsat; every obligation discharged"
                   : "unsat; " + std::to_string(v.assumed.size()) +
                         " obligation(s) assumed";
    return v;
  }
  v.kind = Verdict::Kind::Unknown;
  v.cex = cex;
  switch (main.kind) {
    case K::Unsat:
      v.reason = std::to_string(pending) + " obligation(s) pending";
      break;
    case K::Sat:
      if (check) {
        v.reason = std::string("counterexample ") + to_string(check->kind);
        if (!check->reason.empty()) v.reason += ": " + check->reason;
      } else {
        v.reason = "solver model could not be checked";
      }
      break;
    case K::Unknown:
      v.reason = "solver unknown" + (main.reason.empty() ? "" : ": " + main.reason);
      break;
    case K::Timeout:
      v.reason = "solver timeout";
      break;
    case K::SolverError:
      v.reason = "solver error" + (main.reason.empty() ? "" : ": " + main.reason);
      break;
  }
  return v;
}

std::size_t add_preconditions(PipelineState& st, const SortedGoal& sorted,
                              const DischargeContext& ctx) {
  std::size_t destructors = count_destructors(sorted, *ctx.reg);
  std::size_t added = 0;
  if (!st.faults.drop_preconditions) {
    for (auto& p : gen_preconditions(sorted, *ctx.reg)) {
      Evidence ev;
      ev.literal = p.literal;
      ev.context = p.context;
      st.ledger.add(p.clause, Origin::SmtPrecondition, Strategy::Syntactic, {},
                    p.location, std::move(ev));
      ++added;
    }
  }
  if (added != destructors) {
    auto id = st.ledger.add(Clause({Term::nil()}), Origin::SmtPrecondition,
                            Strategy::Syntactic, {}, "precondition audit");
    st.ledger.resolve(id, Status::Failed,
                      std::to_string(destructors) + " destructor(s) but " +
                          std::to_string(added) + " precondition(s)");
  }
  return destructors;
}

SmtCheck check_state(PipelineState& st, const DischargeContext& ctx) {
  if (st.stage != final_stage(st)) {
    throw Error(ErrorKind::Contract, std::string("backend requires stage ") +
                                         to_string(final_stage(st)) + ", found " +
                                         to_string(st.stage));
  }
  SortedGoal sorted = infer_sorts(st.main, *ctx.reg, st.hints);
  std::size_t destructors = add_preconditions(st, sorted, ctx);
  SmtScript script = emit_script(sorted, *ctx.reg, intern_symbols(st.main));
  st.stage = Stage::Lowered;
  st.trace.push_back({st.stage, st.main});
  SolverOutcome outcome = run_solver(script, ctx.solver);
  return SmtCheck{std::move(sorted), std::move(script), std::move(outcome), destructors};
}

}  // namespace smtlink
