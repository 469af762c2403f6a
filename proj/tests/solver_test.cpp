#include <gtest/gtest.h>

#include <chrono>

#include "oracles.hpp"
#include "smtlink/model.hpp"
#include "smtlink/prover.hpp"

using namespace smtlink;
using namespace smtlink::testing;

namespace {

class SolverTest : public ::testing::Test {
 protected:
  void SetUp() override {
    if (!have_z3()) GTEST_SKIP() << "z3 not found";
  }
};

Clause typed(std::vector<std::string> types, std::vector<std::string> rest,
             const TypeRegistry& reg = {}) {
  std::vector<Term> items;
  for (const auto& t : types) items.push_back(term(t, reg));
  std::vector<Term> ds{make_not(Term::type_hyp(items, MarkerTag::Type))};
  for (const auto& r : rest) ds.push_back(term(r, reg));
  return Clause(ds);
}

ProveResult prove_text(const std::string& text) {
  GoalFile f = load_goal_text(text, "<test>");
  ProveOptions opts;
  opts.solver_command = z3_config().command;
  return prove(f, f.select(std::nullopt), opts);
}

ProveResult prove_corpus(const std::string& name) {
  GoalFile f = load_goal_file(corpus(name));
  ProveOptions opts;
  opts.solver_command = z3_config().command;
  return prove(f, f.select(std::nullopt), opts);
}

SolverConfig shell(const std::string& script, double timeout = 5.0) {
  SolverConfig cfg;
  cfg.command = {"/bin/sh", "-c", script};
  cfg.timeout_seconds = timeout;
  return cfg;
}

}  // namespace

TEST_F(SolverTest, NegatedTrueIsUnsat) {
  auto out = run_solver(lower_clause(Clause({Term::t()}), {}, {}), z3_config());
  EXPECT_EQ(out.kind, SolverOutcome::Kind::Unsat);
}

TEST_F(SolverTest, NegatedFalseIsSatWithModel) {
  auto out = run_solver(lower_clause(Clause({Term::nil()}), {}, {}), z3_config());
  EXPECT_EQ(out.kind, SolverOutcome::Kind::Sat);
  EXPECT_NE(out.model.find('('), std::string::npos);
}

TEST_F(SolverTest, Program1IsUnsat) {
  GoalFile f = load_goal_file(corpus("poly.lisp"));
  SolverConfig cfg = z3_config();
  std::string script = emit(f, f.select(std::nullopt), {});
  std::string body = script.substr(0, script.find("(check-sat)"));
  auto out = run_solver_text(body, cfg);
  EXPECT_EQ(out.kind, SolverOutcome::Kind::Unsat);
  EXPECT_LT(out.millis, cfg.timeout_seconds * 1000);
}

TEST_F(SolverTest, ParseModelNegativeReal) {
  SmtScript script = lower_clause(typed({"(rationalp x)"}, {"(< x 1)"}), {}, {});
  Counterexample cex =
      parse_model("(\n  (define-fun x () Real\n    (- 2.0))\n)", script, {}, {"X"});
  ASSERT_EQ(cex.bindings.count("X"), 1u);
  EXPECT_EQ(cex.bindings.at("X"), CexValue::exact(Value::integer(-2)));
  EXPECT_EQ(print_counterexample(cex, script.var_sorts, {}), "((X -2))");
}

TEST_F(SolverTest, ParseModelRootObject) {
  SmtScript script = lower_clause(typed({"(rationalp x)"}, {"(< x 1)"}), {}, {});
  Counterexample cex = parse_model(
      "((define-fun x () Real (root-obj (+ (^ x 2) (- 2)) 2)))", script, {}, {"X"});
  const CexValue& v = cex.bindings.at("X");
  ASSERT_EQ(v.kind, CexValue::Kind::Root);
  EXPECT_EQ(v.root->index, BigInt(2));
  EXPECT_EQ(v.root->polynomial, term("(+ (^ x 2) (- 2))"));
  std::string printed = print_counterexample(cex, script.var_sorts, {});
  EXPECT_EQ(printed, "((X (CEX-ROOT-OBJ X (+ (^ X 2) (- 2)) 2)))");
  EXPECT_EQ(parse_counterexample(printed, script.var_sorts, {}), cex);
}

TEST_F(SolverTest, ParseModelSymbolIndex) {
  SmtScript script =
      lower_clause(typed({"(symbolp s)"}, {"(equal s 'a)", "(equal s 'b)"}), {}, {});
  ASSERT_EQ(script.interns.names(), (std::vector<std::string>{"A", "B"}));
  Counterexample cex =
      parse_model("((define-fun s () sym (sym_intern 1)))", script, {}, {"S"});
  EXPECT_EQ(cex.bindings.at("S"), CexValue::exact(Value::symbol("B")));
}

TEST_F(SolverTest, MalformedModel) {
  SmtScript script = lower_clause(typed({"(rationalp x)"}, {"(< x 1)"}), {}, {});
  EXPECT_THROW(parse_model("((define-fun x () Real", script, {}, {"X"}), Error);
}

TEST_F(SolverTest, WeakenedProgram1IsConfirmed) {
  ProveResult r = prove_corpus("poly-weakened.lisp");
  ASSERT_TRUE(r.cex_check);
  EXPECT_EQ(r.cex_check->kind, CexCheck::Kind::Confirmed);
  ASSERT_TRUE(r.cex);
  EXPECT_FALSE(clause_eval(r.state.goal, [&] {
    Env env;
    for (const auto& [k, v] : r.cex->bindings) env[k] = v.value;
    return env;
  }(), load_goal_file(corpus("poly-weakened.lisp")).reg));
}

TEST_F(SolverTest, CheckCounterexampleKinds) {
  Clause goal = clausify(term("(implies (rationalp x) (< x 1))"));
  Counterexample bad;
  bad.bindings["X"] = CexValue::exact(Value::integer(3));
  EXPECT_EQ(check_counterexample(bad, goal, {}).kind, CexCheck::Kind::Confirmed);
  Counterexample fine;
  fine.bindings["X"] = CexValue::exact(Value::integer(0));
  EXPECT_EQ(check_counterexample(fine, goal, {}).kind, CexCheck::Kind::Spurious);
  Counterexample root;
  root.bindings["X"] = CexValue::root_obj({term("(+ (^ x 2) (- 2))"), BigInt(2)});
  EXPECT_EQ(check_counterexample(root, goal, {}).kind, CexCheck::Kind::NotEvaluable);
}

TEST_F(SolverTest, RootCounterexampleRoundTrips) {
  ProveResult r = prove_corpus("root.lisp");
  EXPECT_EQ(r.verdict.kind, Verdict::Kind::Unknown);
  ASSERT_TRUE(r.report.counterexample);
  const std::string& printed = *r.report.counterexample;
  EXPECT_NE(printed.find("(CEX-ROOT-OBJ X "), std::string::npos) << printed;
  Counterexample back = parse_counterexample(printed, r.check->sorted.vars, {});
  EXPECT_EQ(print_counterexample(back, r.check->sorted.vars, {}), printed);
  ASSERT_TRUE(r.cex);
  EXPECT_EQ(back, *r.cex);
}

TEST_F(SolverTest, SymbolCounterexample) {
  ProveResult r = prove_corpus("symbols-refuted.lisp");
  EXPECT_EQ(r.verdict.kind, Verdict::Kind::Refuted);
  ASSERT_TRUE(r.cex);
  const Value& s = r.cex->bindings.at("S").value;
  ASSERT_EQ(s.kind(), Value::Kind::Sym);
  EXPECT_NE(s.name(), "RED");
  EXPECT_NE(s.name(), "GREEN");
}

TEST_F(SolverTest, ListConstructorEquations) {
  ProveResult r = prove_text(R"(
(deflist integer-list :elt-type integerp :true-listp t)
(defthm list-equations
  (implies (and (integerp a) (integer-list-p l))
           (and (equal (car (cons a l)) a)
                (equal (cdr (cons a l)) l)
                (consp (cons a l))
                (not (consp (as nil integer-list)))
                (integer-list-p (cons a l)))))
)");
  EXPECT_EQ(r.verdict.kind, Verdict::Kind::Proved) << r.verdict.reason;
}

TEST_F(SolverTest, ProductAndOptionEquations) {
  ProveResult r = prove_text(R"(
(defprod point ((x integerp) (y integerp)))
(defoption maybe-integer integerp)
(defthm prod-equations
  (implies (and (integerp a) (integerp b))
           (and (equal (point->x (point a b)) a)
                (equal (point->y (point a b)) b)
                (point-p (point a b))
                (equal (maybe-integer-some->val (maybe-integer-some a)) a))))
)");
  EXPECT_EQ(r.verdict.kind, Verdict::Kind::Proved) << r.verdict.reason;
}

TEST_F(SolverTest, AlistArrayBruteForce) {
  auto start = std::chrono::steady_clock::now();
  AlistTally t = alist_bruteforce(z3_config());
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_EQ(t.queries, 820u);
  EXPECT_EQ(t.discrepancies, 0u) << t.first_discrepancy;
  EXPECT_LE(secs, 60.0);
}

// Every interaction yields exactly one outcome, whatever the child does.
TEST(SolverTotality, MisbehavingChildren) {
  std::string body = "(assert true)\n";
  auto slow = run_solver_text(body, shell("sleep 5", 0.3));
  EXPECT_EQ(slow.kind, SolverOutcome::Kind::Timeout);
  EXPECT_LT(slow.millis, 3000);
  EXPECT_EQ(run_solver_text(body, shell("exit 3")).kind, SolverOutcome::Kind::SolverError);
  EXPECT_EQ(run_solver_text(body, shell("echo banana")).kind,
            SolverOutcome::Kind::SolverError);
  auto unknown = run_solver_text(body, shell("echo unknown"));
  EXPECT_EQ(unknown.kind, SolverOutcome::Kind::Unknown);
  SolverConfig missing;
  missing.command = {"/nonexistent/solver"};
  EXPECT_EQ(run_solver_text(body, missing).kind, SolverOutcome::Kind::SolverError);
  SolverConfig bad;
  bad.timeout_seconds = 0;
  EXPECT_THROW(run_solver_text(body, bad), Error);
}

TEST_F(SolverTest, SmallTimeoutOnRealProblem) {
  SolverConfig cfg = z3_config();
  cfg.timeout_seconds = 0.001;
  auto out = run_solver(lower_clause(Clause({Term::t()}), {}, {}), cfg);
  EXPECT_TRUE(out.kind == SolverOutcome::Kind::Unsat ||
              out.kind == SolverOutcome::Kind::Timeout);
}
