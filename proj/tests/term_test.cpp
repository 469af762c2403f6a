#include <gtest/gtest.h>

#include <filesystem>
#include <numeric>

#include "smtlink/error.hpp"
#include "smtlink/pipeline.hpp"
#include "support.hpp"

using namespace smtlink;
using namespace smtlink::testing;

namespace {

const char* kProgram1 = R"(
(defun x^2-y^2 (x y) (- (* x x) (* y y)))
)";

const char* kProgram1Body =
    "(implies (and (rationalp x) (rationalp y)"
    "              (<= (+ (* 9/8 x x) (* y y)) 1)"
    "              (<= (x^2-y^2 x y) 1))"
    "         (< y (- (* 3 (- x 17/8) (- x 17/8)) 3)))";

Env origin() { return {{"X", Value::integer(0)}, {"Y", Value::integer(0)}}; }

// Naive fraction used as an independent arithmetic oracle.
struct Frac {
  long long n, d;
  static Frac make(long long n, long long d) {
    if (d < 0) n = -n, d = -d;
    long long g = std::gcd(n < 0 ? -n : n, d);
    return {n / g, d / g};
  }
  Frac operator+(Frac o) const { return make(n * o.d + o.n * d, d * o.d); }
  Frac operator-(Frac o) const { return make(n * o.d - o.n * d, d * o.d); }
  Frac operator*(Frac o) const { return make(n * o.n, d * o.d); }
  Frac inverse() const { return make(d, n); }
};

Term frac_term(Frac f) { return Term::number(Rational(f.n) / Rational(f.d)); }

void expect_frac(const Value& v, Frac f) {
  ASSERT_TRUE(v.is_number());
  EXPECT_EQ(numerator_of(v.number_value()), BigInt(f.n));
  EXPECT_EQ(denominator_of(v.number_value()), BigInt(f.d));
}

}  // namespace

TEST(ParseSexpr, AdditionList) {
  auto r = parse_sexpr("(+ 1 2)");
  ASSERT_TRUE(r.expr.is_list());
  ASSERT_EQ(r.expr.size(), 3u);
  EXPECT_TRUE(r.expr[0].is_symbol("+"));
  EXPECT_EQ(r.expr[1].value(), Rational(1));
  EXPECT_EQ(r.expr[2].value(), Rational(2));
}

TEST(ParseSexpr, Program1Conclusion) {
  auto r = parse_sexpr("(<= (x^2-y^2 x y) 1)");
  ASSERT_EQ(r.expr.size(), 3u);
  ASSERT_TRUE(r.expr[1].is_list());
  EXPECT_TRUE(r.expr[1][0].is_symbol("X^2-Y^2"));
}

TEST(ParseSexpr, RationalLiteral) {
  auto r = parse_sexpr("17/8");
  EXPECT_EQ(r.expr.kind(), SExpr::Kind::Rational);
  EXPECT_EQ(r.expr.value(), Rational(17) / 8);
}

TEST(ParseSexpr, ReportsTrailingInputAndErrors) {
  auto r = parse_sexpr("(a) b");
  ASSERT_TRUE(r.trailing);
  EXPECT_EQ(*r.trailing, 4u);
  try {
    parse_sexpr("(a (b)");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnbalancedParen);
  }
}

TEST(SexprToTerm, Comparison) {
  Term t = term("(< y 1)");
  ASSERT_TRUE(t.is_app("<"));
  EXPECT_EQ(t.arg(0), Term::var("Y"));
  EXPECT_EQ(t.arg(1), Term::integer(1));
}

TEST(SexprToTerm, UserFunctionArity) {
  auto reg = registry(kProgram1);
  Term t = term("(x^2-y^2 x y)", reg);
  ASSERT_TRUE(t.is_app("X^2-Y^2"));
  EXPECT_EQ(t.args().size(), 2u);
  try {
    term("(x^2-y^2 x)", reg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::ArityMismatch);
  }
}

TEST(SexprToTerm, UnknownFunction) {
  try {
    term("(undefined-fn 1)");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnknownFunction);
  }
}

TEST(SexprToTerm, QuotedSymbolAndTypedNil) {
  Term q = term("'red");
  ASSERT_TRUE(q.is_const());
  EXPECT_EQ(q.constant().symbol_name(), "RED");
  auto reg = registry("(deflist integer-list :elt-type integerp)");
  Term n = term("(as nil integer-list)", reg);
  EXPECT_TRUE(n.is_fix());
}

TEST(PrintTerm, Variable) { EXPECT_EQ(print_term(Term::var("Y")), "Y"); }

TEST(PrintTerm, Rational) {
  EXPECT_EQ(print_term(Term::number(Rational(17) / 8)), "17/8");
}

TEST(PrintTerm, TypeMarker) {
  Term m = Term::type_hyp({term("(rationalp x)"), term("(rationalp y)")},
                          MarkerTag::Type);
  EXPECT_EQ(print_term(m), "(TYPE-HYP (LIST (RATIONALP X) (RATIONALP Y)) :TYPE)");
}

TEST(EvalTerm, IfTrue) {
  EXPECT_EQ(eval_term(term("(if t 1 2)"), {}, {}), Value::integer(1));
}

TEST(EvalTerm, Program1AtOrigin) {
  auto reg = registry(kProgram1);
  EXPECT_EQ(eval_term(term(kProgram1Body, reg), origin(), reg), Value::t());
  // The conclusion's right side at x = 0 is 3 * 289/64 - 3 = 675/64.
  Value rhs = eval_term(term("(- (* 3 (- x 17/8) (- x 17/8)) 3)"), origin(), reg);
  EXPECT_EQ(rhs.number_value(), Rational(675) / 64);
}

TEST(EvalTerm, CarOfNil) {
  EXPECT_EQ(eval_term(term("(car nil)"), {}, {}), Value::nil());
}

TEST(EvalTerm, BooleansCountAsZeroInArithmetic) {
  EXPECT_EQ(eval_term(term("(+ t 1)"), {}, {}), Value::integer(1));
}

TEST(EvalTerm, ErrorsAreTyped) {
  try {
    eval_term(term("(+ z 1)"), {}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::UnboundVar);
  }
  auto reg = registry("(defun loop-forever (x) (if (consp x) x (loop-forever x)))");
  try {
    eval_term(term("(loop-forever 1)", reg), {}, reg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::FuelExhausted);
  }
}

TEST(EvalTerm, TypeMarkerIsConjunction) {
  Term m = Term::type_hyp({term("(rationalp x)"), term("(integerp x)")},
                          MarkerTag::Type);
  EXPECT_EQ(eval_term(m, {{"X", Value::integer(3)}}, {}), Value::t());
  Env half{{"X", Value::number(Rational(1) / 2)}};
  EXPECT_EQ(eval_term(m, half, {}), Value::nil());
}

TEST(ClauseEval, Examples) {
  EXPECT_TRUE(clause_eval(Clause({Term::t()}), {}, {}));
  EXPECT_FALSE(clause_eval(Clause({Term::nil(), Term::nil()}), {}, {}));
  auto reg = registry(kProgram1);
  EXPECT_TRUE(clause_eval(clausify(term(kProgram1Body, reg)), origin(), reg));
}

// Every term in the corpus survives print, parse and resolve unchanged.
TEST(TermProperties, CorpusRoundTrip) {
  std::size_t checked = 0;
  for (const auto& entry : std::filesystem::directory_iterator(SMTLINK_CORPUS_DIR)) {
    GoalFile f = load_goal_file(entry.path().string());
    auto check = [&](const Term& t) {
      Term back = sexpr_to_term(parse_sexpr(print_term(t)).expr, f.reg);
      EXPECT_EQ(back, t) << entry.path() << ": " << print_term(t);
      Term pretty = sexpr_to_term(parse_sexpr(print_term_pretty(t, 30)).expr, f.reg);
      EXPECT_EQ(pretty, t);
      ++checked;
    };
    for (const auto& th : f.theorems) {
      check(th.body);
      for (const auto& d : th.goal.disjuncts()) check(d);
    }
    for (const auto& [name, fn] : f.reg.functions()) check(fn.body);
  }
  EXPECT_GT(checked, 20u);
}

TEST(TermProperties, RationalClosure) {
  Carriers gen(11);
  auto draw = [&] {
    long long n = static_cast<long long>(gen.pick(41)) - 20;
    long long d = static_cast<long long>(gen.pick(12)) + 1;
    return Frac::make(n, d);
  };
  for (int i = 0; i < 2000; ++i) {
    Frac a = draw(), b = draw();
    Term ta = frac_term(a), tb = frac_term(b);
    expect_frac(eval_term(Term::app("+", {ta, tb}), {}, {}), a + b);
    expect_frac(eval_term(Term::app("-", {ta, tb}), {}, {}), a - b);
    expect_frac(eval_term(Term::app("*", {ta, tb}), {}, {}), a * b);
    if (a.n != 0) expect_frac(eval_term(Term::app("/", {ta}), {}, {}), a.inverse());
  }
}

TEST(TermProperties, ClauseMonotonicity) {
  Carriers gen(7);
  std::vector<Term> pool = {
      term("(< x y)"),          term("(integerp x)"),  term("(consp y)"),
      term("(equal x 'a)"),     term("(not (< 0 x))"), term("(car y)"),
      term("(booleanp x)"),     term("(+ x y)"),       term("(symbolp y)"),
      term("(if (consp x) (car x) y)"),
  };
  int trials = 0;
  for (int i = 0; i < 1500; ++i) {
    std::vector<Term> ds(1 + gen.pick(3));
    for (auto& d : ds) d = pool[gen.pick(pool.size())];
    Clause c(ds);
    ds.push_back(pool[gen.pick(pool.size())]);
    Clause longer(ds);
    Env env = gen.env({"X", "Y"});
    if (clause_eval(c, env, {})) {
      EXPECT_TRUE(clause_eval(longer, env, {}));
    }
    ++trials;
  }
  EXPECT_GE(trials, 1000);
}

TEST(TermProperties, HintWrapperNeutrality) {
  Carriers gen(5);
  Term wrapper = term("(hint-please 'expand)");
  std::vector<Term> pool = {term("(< x y)"), term("(consp x)"), term("(equal x y)"),
                            term("(symbolp y)"), Term::nil()};
  for (int i = 0; i < 1000; ++i) {
    std::vector<Term> ds(1 + gen.pick(3));
    for (auto& d : ds) d = pool[gen.pick(pool.size())];
    Env env = gen.env({"X", "Y"});
    EXPECT_EQ(eval_term(wrapper, env, {}), Value::nil());
    bool plain = clause_eval(Clause(ds), env, {});
    ds.push_back(wrapper);
    EXPECT_EQ(clause_eval(Clause(ds), env, {}), plain);
  }
}
