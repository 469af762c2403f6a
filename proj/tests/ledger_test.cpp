#include <gtest/gtest.h>

#include "smtlink/prover.hpp"
#include "support.hpp"

using namespace smtlink;
using namespace smtlink::testing;

namespace {

DischargeContext context(const TypeRegistry& reg, const HintSpec& hints = {}) {
  DischargeContext ctx;
  ctx.reg = &reg;
  ctx.hints = hints;
  ctx.solver = z3_config();
  return ctx;
}

const Obligation& first_of(const Ledger& l, Origin o) {
  for (const auto& ob : l.obligations()) {
    if (ob.origin == o) return ob;
  }
  throw std::runtime_error("no obligation of that origin");
}

ProveResult prove_corpus(const std::string& name, PipelineFaults faults = {},
                         std::size_t jobs = 1) {
  GoalFile f = load_goal_file(corpus(name));
  ProveOptions opts;
  opts.solver_command = z3_config().command;
  opts.faults = faults;
  opts.jobs = jobs;
  return prove(f, f.select(std::nullopt), opts);
}

SolverOutcome outcome(SolverOutcome::Kind k) {
  SolverOutcome o;
  o.kind = k;
  return o;
}

#define REQUIRE_Z3() \
  if (!have_z3()) GTEST_SKIP() << "z3 not found"

}  // namespace

TEST(Ledger, IdsAndTransitions) {
  Ledger l;
  EXPECT_EQ(l.add(clause({"t"}), Origin::Expand, Strategy::Syntactic), 1u);
  EXPECT_THROW(l.add(clause({"t"}), Origin::AddHypo, Strategy::UserAssumed), Error);
  EXPECT_EQ(l.add(clause({"t"}), Origin::AddHypo, Strategy::UserAssumed, "by lemma"), 2u);
  EXPECT_EQ(l.add(clause({"t"}), Origin::AddHypo, Strategy::ViaSmt), 3u);
  l.resolve(1, Status::Discharged, "ok");
  EXPECT_EQ(l.at(1).status, Status::Discharged);
  EXPECT_THROW(l.resolve(1, Status::Failed, "again"), Error);
  EXPECT_THROW(l.resolve(3, Status::Pending, "no-op"), Error);
  EXPECT_THROW(l.assume(3, ""), Error);
  l.assume(2, "by lemma");
  EXPECT_EQ(l.at(2).status, Status::Assumed);
  EXPECT_EQ(l.at(2).note, "by lemma");
  EXPECT_THROW(l.at(4), Error);
  EXPECT_EQ(l.count(Origin::AddHypo), 2u);
}

TEST(DischargeSyntactic, Program1TypeExtraction) {
  GoalFile f = load_goal_file(corpus("poly.lisp"));
  const Theorem& th = f.select(std::nullopt);
  PipelineState st = run_pipeline(th.goal, th.hints, f.reg);
  auto ctx = context(f.reg, st.hints);
  EXPECT_EQ(discharge_syntactic(first_of(st.ledger, Origin::TypeExtract), ctx).status,
            Status::Discharged);
  EXPECT_EQ(discharge_syntactic(first_of(st.ledger, Origin::Expand), ctx).status,
            Status::Discharged);
}

TEST(DischargeSyntactic, ForgedExtractionFails) {
  GoalFile f = load_goal_file(corpus("poly.lisp"));
  const Theorem& th = f.select(std::nullopt);
  PipelineFaults faults;
  faults.forge_extraction = true;
  PipelineState st = run_pipeline(th.goal, th.hints, f.reg, ArchTable::standard(), faults);
  auto ctx = context(f.reg, st.hints);
  const Obligation& ob = first_of(st.ledger, Origin::TypeExtract);
  ASSERT_EQ(ob.evidence.extracted.size(), 3u);
  EXPECT_EQ(discharge_syntactic(ob, ctx).status, Status::Failed);
}

TEST(DischargeSyntactic, TamperedExpansionFails) {
  GoalFile f = load_goal_file(corpus("poly.lisp"));
  const Theorem& th = f.select(std::nullopt);
  PipelineState st = run_pipeline(th.goal, th.hints, f.reg);
  Obligation ob = first_of(st.ledger, Origin::Expand);
  ob.evidence.after = clause({"(< y 0)"});
  EXPECT_NE(discharge_syntactic(ob, context(f.reg, st.hints)).status, Status::Discharged);
}

TEST(DischargeViaSmt, TrivialImplication) {
  REQUIRE_Z3();
  Ledger l;
  l.add(clause({"(not (rationalp x))", "(rationalp x)"}), Origin::AddHypo, Strategy::ViaSmt);
  const Obligation& ob = l.at(1);
  TypeRegistry reg;
  EXPECT_EQ(discharge_via_smt(ob, context(reg)).status, Status::Discharged);
}

TEST(DischargeViaSmt, NonTranslatableFails) {
  REQUIRE_Z3();
  Ledger l;
  l.add(clause({"(not (rationalp x))", "(< (+ t 1) x)"}), Origin::AddHypo, Strategy::ViaSmt);
  const Obligation& ob = l.at(1);
  TypeRegistry reg;
  DischargeResult r = discharge_via_smt(ob, context(reg));
  EXPECT_EQ(r.status, Status::Failed);
  EXPECT_NE(r.detail.find("SortClash"), std::string::npos) << r.detail;
}

TEST(DischargeViaSmt, LenLikeReturnFacts) {
  REQUIRE_Z3();
  ProveResult r = prove_corpus("len.lisp");
  EXPECT_EQ(r.verdict.kind, Verdict::Kind::Proved) << r.verdict.reason;
  EXPECT_EQ(r.state.ledger.count(Origin::UninterpReturn), 1u);
  for (const auto& ob : r.state.ledger.obligations()) {
    EXPECT_EQ(ob.status, Status::Discharged) << ob.id << " " << ob.detail;
  }
}

TEST(DischargeViaSmt, FalseReturnFactFails) {
  REQUIRE_Z3();
  GoalFile f = load_goal_text(R"(
(deflist integer-list :elt-type integerp :true-listp t)
(defun len-of (l) (if (consp l) (+ 1 (len-of (cdr l))) 0))
(defthm len-of-bounded
  (implies (integer-list-p l) (< (len-of l) 10))
  :hints (:expand ((len-of :depth 1))
          :uninterp ((len-of (integer-list-p) integerp
                             :constraints ((< (len-of l) 10))))))
)", "<test>");
  ProveOptions opts;
  opts.solver_command = z3_config().command;
  ProveResult r = prove(f, f.select(std::nullopt), opts);
  EXPECT_NE(r.verdict.kind, Verdict::Kind::Proved);
}

TEST(FinalVerdict, Examples) {
  Ledger empty;
  EXPECT_EQ(final_verdict(empty, outcome(SolverOutcome::Kind::Unsat), std::nullopt).kind,
            Verdict::Kind::Proved);

  Counterexample cex;
  cex.bindings["X"] = CexValue::exact(Value::integer(1));
  CexCheck confirmed{CexCheck::Kind::Confirmed, ""};
  Verdict refuted = final_verdict(empty, outcome(SolverOutcome::Kind::Sat), confirmed, cex);
  EXPECT_EQ(refuted.kind, Verdict::Kind::Refuted);
  ASSERT_TRUE(refuted.cex);
  EXPECT_EQ(*refuted.cex, cex);

  Ledger failed;
  failed.add(clause({"t"}), Origin::Expand, Strategy::Syntactic);
  failed.resolve(1, Status::Failed, "tampered");
  Verdict v = final_verdict(failed, outcome(SolverOutcome::Kind::Unsat), std::nullopt);
  EXPECT_EQ(v.kind, Verdict::Kind::FailedObligation);
  EXPECT_EQ(v.failed, std::vector<std::size_t>{1});

  CexCheck spurious{CexCheck::Kind::Spurious, ""};
  EXPECT_EQ(final_verdict(empty, outcome(SolverOutcome::Kind::Sat), spurious, cex).kind,
            Verdict::Kind::Unknown);
  EXPECT_EQ(final_verdict(empty, outcome(SolverOutcome::Kind::Timeout), std::nullopt).kind,
            Verdict::Kind::Unknown);

  Ledger pending;
  pending.add(clause({"t"}), Origin::Expand, Strategy::Syntactic);
  EXPECT_EQ(final_verdict(pending, outcome(SolverOutcome::Kind::Unsat), std::nullopt).kind,
            Verdict::Kind::Unknown);

  Ledger assumed;
  assumed.add(clause({"t"}), Origin::AddHypo, Strategy::UserAssumed, "by lemma");
  assumed.assume(1, "by lemma");
  Verdict a = final_verdict(assumed, outcome(SolverOutcome::Kind::Unsat), std::nullopt);
  EXPECT_EQ(a.kind, Verdict::Kind::Proved);
  EXPECT_EQ(a.assumed, std::vector<std::size_t>{1});
}

TEST(FinalVerdict, ExitCodes) {
  EXPECT_EQ(exit_code(Verdict::Kind::Proved), 0);
  EXPECT_EQ(exit_code(Verdict::Kind::Refuted), 1);
  EXPECT_EQ(exit_code(Verdict::Kind::Unknown), 2);
  EXPECT_EQ(exit_code(Verdict::Kind::FailedObligation), 3);
}

TEST(NegativeControls, ProgramOneProvedWithoutFaults) {
  REQUIRE_Z3();
  ProveResult r = prove_corpus("poly.lisp");
  EXPECT_EQ(r.verdict.kind, Verdict::Kind::Proved);
  EXPECT_EQ(r.state.ledger.size(), 2u);
}

TEST(NegativeControls, DroppedPreconditions) {
  REQUIRE_Z3();
  PipelineFaults faults;
  faults.drop_preconditions = true;
  ProveResult r = prove_corpus("integer-list.lisp", faults);
  EXPECT_EQ(r.verdict.kind, Verdict::Kind::FailedObligation);
  ProveResult clean = prove_corpus("integer-list.lisp");
  EXPECT_EQ(clean.verdict.kind, Verdict::Kind::Proved);
  EXPECT_EQ(clean.state.ledger.count(Origin::SmtPrecondition), clean.check->destructors);
  EXPECT_EQ(clean.check->destructors, 4u);
}

TEST(NegativeControls, ForgedExtraction) {
  REQUIRE_Z3();
  PipelineFaults faults;
  faults.forge_extraction = true;
  for (const char* name : {"poly.lisp", "integer-list.lisp", "symbols.lisp"}) {
    ProveResult r = prove_corpus(name, faults);
    EXPECT_EQ(r.verdict.kind, Verdict::Kind::FailedObligation) << name;
  }
}

TEST(DischargeAll, ParallelMatchesSerial) {
  REQUIRE_Z3();
  ProveResult serial = prove_corpus("ringosc.lisp", {}, 1);
  ProveResult parallel = prove_corpus("ringosc.lisp", {}, 4);
  EXPECT_EQ(serial.verdict.kind, Verdict::Kind::Proved);
  ASSERT_EQ(serial.state.ledger.size(), parallel.state.ledger.size());
  for (std::size_t i = 1; i <= serial.state.ledger.size(); ++i) {
    EXPECT_EQ(serial.state.ledger.at(i).status, parallel.state.ledger.at(i).status);
    EXPECT_EQ(serial.state.ledger.at(i).clause, parallel.state.ledger.at(i).clause);
  }
}

TEST(DischargeAll, AssumedHypothesisIsReported) {
  REQUIRE_Z3();
  GoalFile f = load_goal_text(R"(
(defthm with-assumption
  (implies (rationalp x) (< x (+ x 1)))
  :hints (:hypotheses (((< 0 1) :assume "arithmetic fact"))))
)", "<test>");
  ProveOptions opts;
  opts.solver_command = z3_config().command;
  ProveResult r = prove(f, f.select(std::nullopt), opts);
  EXPECT_EQ(r.verdict.kind, Verdict::Kind::Proved);
  EXPECT_EQ(r.verdict.assumed, std::vector<std::size_t>{1});
  EXPECT_EQ(r.state.ledger.at(1).note, "arithmetic fact");
}
