#include <gtest/gtest.h>

#include "oracles.hpp"
#include "smtlink/prover.hpp"

using namespace smtlink;
using namespace smtlink::testing;

namespace {

const char* kProgram1 = R"(
(defun x^2-y^2 (x y) (+ (* x x) (- (* y y))))
)";

Clause program1(const TypeRegistry& reg) {
  return clausify(term(
      "(implies (and (rationalp x) (rationalp y)"
      "              (<= (+ (* 9/8 x x) (* y y)) 1)"
      "              (<= (x^2-y^2 x y) 1))"
      "         (< y (- (* 3 (- x 17/8) (- x 17/8)) 3)))",
      reg));
}

PipelineState at_stage(const Clause& g, const HintSpec& h, const TypeRegistry& reg,
                       PassId pass) {
  PipelineState st = process_hint(g, h, {}, reg);
  st.stage = st.arch.predecessor(pass);
  return st;
}

void expect_sound(const SoundnessTally& t) {
  EXPECT_GE(t.trials, 1000u);
  EXPECT_EQ(t.violations, 0u) << t.first_violation;
  EXPECT_GT(t.assignments, t.discards);
}

}  // namespace

TEST(ProcessHint, EmptyHintsLeaveGoalUnchanged) {
  auto reg = registry(kProgram1);
  PipelineState st = process_hint(program1(reg), {}, {}, reg);
  EXPECT_EQ(st.main, program1(reg));
  EXPECT_EQ(st.stage, Stage::Processed);
  EXPECT_TRUE(st.ledger.empty());
}

TEST(ProcessHint, UserOverridesDefaults) {
  HintSpec defaults, user;
  defaults.ints_as_reals = false;
  user.ints_as_reals = true;
  PipelineState st = process_hint(Clause({Term::t()}), user, defaults, {});
  EXPECT_TRUE(st.hints.use_reals());
}

TEST(ProcessHint, UnknownExpansionTarget) {
  HintSpec h;
  h.expand["NO-SUCH-FN"] = ExpandOverride::with_depth(1);
  try {
    process_hint(Clause({Term::t()}), h, {}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BadHint);
  }
}

TEST(AddHypo, NoHypotheses) {
  Clause g = clause({"(< x 1)"});
  PipelineState st = add_hypo(process_hint(g, {}, {}, {}), {});
  EXPECT_EQ(st.main, g);
  EXPECT_TRUE(st.ledger.empty());
}

TEST(AddHypo, OneHypothesis) {
  HintSpec h;
  h.hypotheses.push_back({term("(< 0 y)"), {}});
  PipelineState st = add_hypo(process_hint(clause({"(< x 1)"}), h, {}, {}), {});
  EXPECT_EQ(st.main, clause({"(not (< 0 y))", "(< x 1)"}));
  ASSERT_EQ(st.ledger.size(), 1u);
  EXPECT_EQ(st.ledger.at(1).clause, clause({"(< 0 y)", "(< x 1)"}));
  EXPECT_EQ(st.ledger.at(1).origin, Origin::AddHypo);
}

TEST(AddHypo, TwoHypothesesPreserveTheGoal) {
  HintSpec h;
  h.hypotheses.push_back({term("(< 0 y)"), {}});
  h.hypotheses.push_back({term("(integerp x)"), {}});
  Clause g = clause({"(< x y)"});
  PipelineState st = add_hypo(process_hint(g, h, {}, {}), {});
  EXPECT_EQ(st.main, clause({"(not (< 0 y))", "(not (integerp x))", "(< x y)"}));
  ASSERT_EQ(st.ledger.size(), 2u);
  EXPECT_EQ(st.ledger.at(1).clause, clause({"(< 0 y)", "(< x y)"}));
  EXPECT_EQ(st.ledger.at(2).clause, clause({"(integerp x)", "(< x y)"}));
  Carriers gen(21);
  for (int i = 0; i < 1000; ++i) {
    Env env = gen.env({"X", "Y"});
    bool premises = clause_eval(st.main, env, {}) &&
                    clause_eval(st.ledger.at(1).clause, env, {}) &&
                    clause_eval(st.ledger.at(2).clause, env, {});
    if (premises) {
      EXPECT_TRUE(clause_eval(g, env, {}));
    }
  }
}

TEST(Expand, BetaReducesWithoutLet) {
  auto reg = registry(kProgram1);
  Term out = expand_term(term("(x^2-y^2 x y)", reg), reg, {});
  EXPECT_EQ(out, term("(+ (* x x) (- (* y y)))"));
  EXPECT_EQ(print_term(out).find("LET"), std::string::npos);
}

TEST(Expand, NoDefinedFunctions) {
  Clause g = clause({"(< x 1)", "(consp y)"});
  PipelineState st = expand(at_stage(g, {}, {}, PassId::Expand), {});
  EXPECT_EQ(st.main, g);
  ASSERT_EQ(st.ledger.size(), 1u);
  EXPECT_EQ(st.ledger.at(1).origin, Origin::Expand);
  // G => G is valid: true under every assignment.
  Carriers gen(2);
  for (int i = 0; i < 200; ++i) {
    EXPECT_TRUE(clause_eval(st.ledger.at(1).clause, gen.env({"X", "Y"}), {}));
  }
}

TEST(Expand, RecursiveFunctionUnfoldsOnce) {
  GoalFile f = load_goal_file(corpus("len.lisp"));
  const Theorem& th = f.select(std::nullopt);
  PipelineState st = run_pipeline(th.goal, th.hints, f.reg);
  const Clause& expanded = st.trace.at(1).main;
  std::size_t before = 0, after = 0;
  for (const auto& d : th.goal.disjuncts()) before += count_calls(d, "LEN-OF");
  for (const auto& d : expanded.disjuncts()) after += count_calls(d, "LEN-OF");
  EXPECT_EQ(before, 1u);
  EXPECT_EQ(after, 1u);
  std::string text = print_clause(expanded);
  EXPECT_NE(text.find("(LEN-OF (CDR L))"), std::string::npos);
  EXPECT_EQ(text.find("(CDR (CDR L))"), std::string::npos);
  // Value preservation on random lists.
  Carriers gen(8);
  Term call = term("(len-of l)", f.reg);
  Term unfolded = expand_term(call, f.reg, th.hints);
  for (int i = 0; i < 500; ++i) {
    Env env{{"L", gen.list()}};
    EXPECT_EQ(eval_term(unfolded, env, f.reg), eval_term(call, env, f.reg));
  }
}

TEST(Expand, BlowupCap) {
  auto reg = registry("(defun dbl (x) (+ x x)) (defun d4 (x) (dbl (dbl (dbl (dbl x)))))");
  HintSpec h;
  h.expansion_cap = 20;
  try {
    expand(at_stage(clause({"(< (d4 (d4 x)) 1)"}, reg), h, reg, PassId::Expand), reg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ExpansionBlowup);
  }
}

TEST(TypeExtract, Program1Marker) {
  auto reg = registry(kProgram1);
  PipelineState st = run_pipeline(program1(reg), {}, reg);
  EXPECT_EQ(print_term(st.trace.at(2).main[0]),
            "(NOT (TYPE-HYP (LIST (RATIONALP X) (RATIONALP Y)) :TYPE))");
}

TEST(TypeExtract, NoRecognizerHypotheses) {
  Clause g = clause({"(not (< x 1))", "(< y 2)"});
  PipelineState st = type_extract(at_stage(g, {}, {}, PassId::TypeExtract), {});
  ASSERT_EQ(st.main.size(), 3u);
  EXPECT_EQ(st.main[0], make_not(Term::type_hyp({}, MarkerTag::Type)));
  EXPECT_EQ(st.main[1], g[0]);
  EXPECT_EQ(st.main[2], g[1]);
}

TEST(TypeExtract, NonVariableArgumentStays) {
  auto reg = registry("(defun f (x) (+ x 1))");
  Clause g = clause({"(not (integerp (f x)))", "(< x 2)"}, reg);
  PipelineState st = type_extract(at_stage(g, {}, reg, PassId::TypeExtract), reg);
  EXPECT_TRUE(st.main[0].arg(0).args().empty());
  EXPECT_EQ(st.main[1], g[0]);
  // The stored direction holds on random assignments.
  Carriers gen(4);
  for (int i = 0; i < 1000; ++i) {
    Env env = gen.env({"X"});
    if (clause_eval(st.main, env, reg)) {
      EXPECT_TRUE(clause_eval(g, env, reg));
    }
  }
}

TEST(UninterpReturns, NoUninterpretedFunctions) {
  auto reg = registry(kProgram1);
  PipelineState st = run_pipeline(program1(reg), {}, reg);
  EXPECT_EQ(st.trace.at(3).main, st.trace.at(2).main);
}

TEST(UninterpReturns, OneCallSite) {
  const auto& reg = oracle_registry();
  HintSpec h;
  h.uninterp["LEN"] = UninterpSpec{{"INTEGER-LIST-P"}, "INTEGERP", {}};
  Clause g = clause({"(< (len l) 3)"}, reg);
  PipelineState st = uninterp_returns(at_stage(g, h, reg, PassId::UninterpReturns), reg);
  ASSERT_EQ(st.main.size(), 2u);
  EXPECT_EQ(st.main[0],
            make_not(Term::type_hyp({term("(integerp (len l))", reg)}, MarkerTag::Return)));
  ASSERT_EQ(st.ledger.size(), 1u);
  EXPECT_EQ(st.ledger.at(1).origin, Origin::UninterpReturn);
}

TEST(UninterpReturns, TwoCallSites) {
  const auto& reg = oracle_registry();
  HintSpec h;
  h.uninterp["LEN"] = UninterpSpec{{"INTEGER-LIST-P"}, "INTEGERP", {}};
  Clause g = clause({"(< (len l) (len (cdr l)))"}, reg);
  PipelineState st = uninterp_returns(at_stage(g, h, reg, PassId::UninterpReturns), reg);
  ASSERT_EQ(st.main.size(), 3u);
  EXPECT_NE(st.main[0], st.main[1]);
  EXPECT_EQ(st.ledger.size(), 2u);
  Carriers gen(9);
  for (int i = 0; i < 1000; ++i) {
    Env env = random_env(gen);
    bool premises = clause_eval(st.main, env, reg);
    for (const auto& o : st.ledger.obligations()) {
      premises = premises && clause_eval(o.clause, env, reg);
    }
    if (premises) {
      EXPECT_TRUE(clause_eval(g, env, reg));
    }
  }
}

TEST(RunPipeline, Program1Trace) {
  auto reg = registry(kProgram1);
  Clause g = program1(reg);
  PipelineState st = run_pipeline(g, {}, reg);
  ASSERT_EQ(st.trace.size(), 4u);
  EXPECT_EQ(st.trace[0].stage, Stage::HypoAdded);
  EXPECT_EQ(st.trace[0].main, g);
  EXPECT_EQ(count_calls(clause_term(st.trace[1].main), "X^2-Y^2"), 0u);
  EXPECT_TRUE(st.trace[2].main[0].is_app("NOT"));
  EXPECT_EQ(st.trace[3].stage, Stage::UninterpDone);
  EXPECT_EQ(st.main, st.trace[3].main);
}

TEST(RunPipeline, TrivialGoal) {
  GoalFile f = load_goal_file(corpus("trivial.lisp"));
  const Theorem& th = f.select(std::nullopt);
  ProveOptions opts;
  if (!have_z3()) GTEST_SKIP() << "z3 not found";
  opts.solver_command = z3_config().command;
  ProveResult r = prove(f, th, opts);
  EXPECT_EQ(r.state.stage, Stage::Lowered);
  EXPECT_EQ(r.verdict.kind, Verdict::Kind::Proved);
  ASSERT_EQ(r.state.trace.size(), 5u);
  for (std::size_t i = 1; i < 4; ++i) {
    EXPECT_EQ(r.state.trace[i].main.disjuncts().back(), Term::t());
  }
}

TEST(RunPipeline, StageContract) {
  PipelineState st = process_hint(Clause({Term::t()}), {}, {}, {});
  try {
    expand(st, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Contract);
  }
  ArchTable dup{{PassId::AddHypo, PassId::AddHypo}};
  EXPECT_THROW(dup.validate(), Error);
}

// Each trace entry is exactly the state after running passes one by one.
TEST(RunPipeline, TraceFidelity) {
  const auto& reg = oracle_registry();
  Carriers gen(31);
  for (int i = 0; i < 100; ++i) {
    Clause g = random_clause(gen);
    HintSpec h = random_hints(gen, true, true);
    PipelineState full = run_pipeline(g, h, reg);
    PipelineState st = process_hint(g, h, {}, reg);
    const auto passes = st.arch.passes;
    for (std::size_t k = 0; k < passes.size(); ++k) {
      st = run_pass(passes[k], std::move(st), reg);
      EXPECT_EQ(full.trace.at(k).main, st.main);
      EXPECT_EQ(full.trace.at(k).stage, st.stage);
    }
  }
}

TEST(PassSoundness, AddHypo) { expect_sound(pass_soundness(PassId::AddHypo, 1000, 101)); }
TEST(PassSoundness, Expand) { expect_sound(pass_soundness(PassId::Expand, 1000, 102)); }
TEST(PassSoundness, TypeExtract) {
  expect_sound(pass_soundness(PassId::TypeExtract, 1000, 103));
}
TEST(PassSoundness, UninterpReturns) {
  expect_sound(pass_soundness(PassId::UninterpReturns, 1000, 104));
}

TEST(PassSoundness, ReorderedTable) {
  ArchTable permuted{{PassId::AddHypo, PassId::TypeExtract, PassId::Expand,
                      PassId::UninterpReturns}};
  expect_sound(pipeline_soundness(permuted, 1000, 105));
  expect_sound(pipeline_soundness(ArchTable::standard(), 1000, 106));
}

// Expansion preserves the value of every literal.
TEST(PassSoundness, ExpansionPreservesValues) {
  const auto& reg = oracle_registry();
  Carriers gen(107);
  std::size_t compared = 0;
  for (int i = 0; i < 1000; ++i) {
    Term t = random_literal(gen);
    Term e = expand_term(t, reg, {});
    Env env = random_env(gen);
    try {
      EXPECT_TRUE(acl2_equal(eval_term(e, env, reg), eval_term(t, env, reg)))
          << print_term(t);
      ++compared;
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::FuelExhausted) throw;
    }
  }
  EXPECT_GT(compared, 900u);
}
