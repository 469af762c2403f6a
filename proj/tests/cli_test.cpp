#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>

#include "smtlink/prover.hpp"
#include "support.hpp"

using namespace smtlink;
using namespace smtlink::testing;

namespace {

struct CliRun {
  int status = -1;
  std::string out;
};

// Runs the command line tool; stderr is discarded.
CliRun cli(const std::string& args) {
  std::string cmd = std::string("'") + SMTLINK_CLI_PATH + "' " + args + " 2>/dev/null";
  CliRun r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  int st = ::pclose(p);
  r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

std::string solver_flag() {
  return std::string("--solver-cmd '") + SMTLINK_Z3_PATH + " -in' ";
}

ErrorKind load_error(const std::string& text, std::string* message = nullptr) {
  try {
    load_goal_text(text, "goal.lisp");
  } catch (const Error& e) {
    if (message) *message = e.what();
    return e.kind();
  }
  ADD_FAILURE() << "loaded without error";
  return ErrorKind::Contract;
}

#define REQUIRE_Z3() \
  if (!have_z3()) GTEST_SKIP() << "z3 not found"

}  // namespace

TEST(Loader, TheoremsAndHints) {
  GoalFile f = load_goal_text(R"(
(in-package "SMT")
(defun sq (x) (* x x))
(default-hints (:timeout 7))
(defthm one (implies (rationalp x) (<= 0 (sq x))) :hints (("Goal" :smtlink (:ints-as-reals t))))
(defthm two t)
)", "goal.lisp");
  ASSERT_EQ(f.theorems.size(), 2u);
  const Theorem& one = f.select(std::string("one"));
  EXPECT_EQ(one.name, "ONE");
  EXPECT_TRUE(one.hints.use_reals());
  EXPECT_EQ(one.hints.solver.timeout_seconds, std::optional<double>(7));
  EXPECT_EQ(one.line, 5u);
  EXPECT_THROW(f.select(std::nullopt), Error);
  EXPECT_THROW(f.select(std::string("three")), Error);
}

TEST(Loader, ErrorsCarryLine) {
  std::string msg;
  EXPECT_EQ(load_error("(defthm a t)\n\n(defthm b (frob x))", &msg), ErrorKind::UnknownFunction);
  EXPECT_EQ(msg.rfind("goal.lisp:3:", 0), 0u) << msg;
  EXPECT_EQ(load_error("(defthm a t"), ErrorKind::UnbalancedParen);
  EXPECT_EQ(load_error("(defmacro m (x) x)"), ErrorKind::BadGoalFile);
  EXPECT_EQ(load_error("(defthm a t :hints (:expand ((nope :depth 1))))"), ErrorKind::BadHint);
  EXPECT_THROW(load_goal_file("/nonexistent/goal.lisp"), Error);
}

TEST(Report, RoundTrip) {
  RunReport r;
  r.file = "dir/with \"quotes\".lisp";
  r.theorem = "THM";
  r.verdict = "REFUTED";
  r.reason = "line one\nline\ttwo \\ end";
  r.solver = "sat";
  r.solver_ms = 12.5;
  r.total_ms = 40.25;
  r.obligations.push_back(
      {1, Origin::Expand, Strategy::Syntactic, Status::Discharged, 0.0, "expand", "", "ok"});
  r.obligations.push_back({2, Origin::SmtPrecondition, Strategy::ViaSmt, Status::Failed,
                           3.125, "disjunct 1: (CAR L)", "note", "sat"});
  r.counterexample = "((X 1/2) (Y 0))";
  r.cex_check = "confirmed";
  std::string text = write_report(r);
  EXPECT_EQ(parse_report(text), r);
  EXPECT_EQ(write_report(parse_report(text)), text);
}

TEST(Report, MalformedInput) {
  EXPECT_THROW(parse_report(""), Error);
  EXPECT_THROW(parse_report("smtlink-report 1\ntheorem: X\n"), Error);
  EXPECT_THROW(parse_report("smtlink-report 1\nobligations: 2\nend\n"), Error);
  EXPECT_THROW(parse_report("smtlink-report 1\nreason: \"open\nend\n"), Error);
}

TEST(Report, CorpusReportsParse) {
  REQUIRE_Z3();
  for (const char* name : {"poly.lisp", "poly-weakened.lisp", "integer-list.lisp"}) {
    GoalFile f = load_goal_file(corpus(name));
    ProveOptions opts;
    opts.solver_command = z3_config().command;
    ProveResult r = prove(f, f.select(std::nullopt), opts);
    std::string text = write_report(r.report);
    RunReport back = parse_report(text);
    EXPECT_EQ(write_report(back), text) << name;
    EXPECT_EQ(back.verdict, r.report.verdict);
    EXPECT_EQ(back.obligations.size(), r.report.obligations.size());
  }
}

TEST(CommandLine, ProveProgram1) {
  REQUIRE_Z3();
  CliRun r = cli("prove " + solver_flag() + "'" + corpus("poly.lisp") + "'");
  EXPECT_EQ(r.status, 0);
  RunReport rep = parse_report(r.out);
  EXPECT_EQ(rep.verdict, "PROVED");
  EXPECT_EQ(rep.theorem, "POLY-INEQ-EXAMPLE");
}

TEST(CommandLine, ProveWeakened) {
  REQUIRE_Z3();
  CliRun r = cli("prove " + solver_flag() + "'" + corpus("poly-weakened.lisp") + "'");
  EXPECT_EQ(r.status, 1);
  RunReport rep = parse_report(r.out);
  EXPECT_EQ(rep.verdict, "REFUTED");
  ASSERT_TRUE(rep.counterexample);
  EXPECT_NE(rep.counterexample->find("(X "), std::string::npos);
  EXPECT_EQ(rep.cex_check, std::optional<std::string>("confirmed"));
}

TEST(CommandLine, OtherExitCodes) {
  EXPECT_EQ(cli("prove missing.lisp").status, 4);
  EXPECT_EQ(cli("prove").status, 4);
  EXPECT_EQ(cli("frobnicate").status, 4);
  EXPECT_EQ(cli("--help").status, 0);
  REQUIRE_Z3();
  EXPECT_EQ(cli("prove " + solver_flag() + "'" + corpus("root.lisp") + "'").status, 2);
}

TEST(CommandLine, ReportFileMatchesStdout) {
  REQUIRE_Z3();
  auto path = std::filesystem::temp_directory_path() / "smtlink-cli-report.txt";
  CliRun r = cli("prove " + solver_flag() + "--report '" + path.string() + "' '" +
              corpus("integer-list.lisp") + "'");
  EXPECT_EQ(r.status, 0);
  std::FILE* f = std::fopen(path.c_str(), "r");
  ASSERT_NE(f, nullptr);
  std::string text;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, f)) > 0) text.append(buf, n);
  std::fclose(f);
  std::filesystem::remove(path);
  EXPECT_EQ(parse_report(text).verdict, "PROVED");
}

TEST(Emit, Program1DeclaresTwoReals) {
  CliRun r = cli("emit '" + corpus("poly.lisp") + "'");
  EXPECT_EQ(r.status, 0);
  std::size_t count = 0;
  for (std::size_t at = 0; (at = r.out.find(" Real)", at)) != std::string::npos; ++at) ++count;
  EXPECT_EQ(count, 2u);
}

TEST(Emit, TrivialGoalSoleAssertion) {
  CliRun r = cli("emit '" + corpus("trivial.lisp") + "'");
  EXPECT_EQ(r.status, 0);
  std::size_t first = r.out.find("(assert ");
  ASSERT_NE(first, std::string::npos);
  EXPECT_EQ(r.out.find("(assert ", first + 1), std::string::npos);
  EXPECT_NE(r.out.find("(assert (not true))"), std::string::npos);
}

TEST(Emit, DeflistDatatype) {
  CliRun r = cli("emit '" + corpus("integer-list.lisp") + "'");
  EXPECT_NE(r.out.find("(declare-datatypes ((integer_list 0)) (((integer_list_cons "
                       "(integer_list_car Int) (integer_list_cdr integer_list)) "
                       "(integer_list_nil))))"),
            std::string::npos)
      << r.out;
}

TEST(Emit, Deterministic) {
  for (const auto& entry : std::filesystem::directory_iterator(SMTLINK_CORPUS_DIR)) {
    std::string first = cli("emit '" + entry.path().string() + "'").out;
    EXPECT_FALSE(first.empty());
    for (int i = 0; i < 2; ++i) {
      EXPECT_EQ(cli("emit '" + entry.path().string() + "'").out, first) << entry.path();
    }
  }
}

TEST(Trace, Program1Stages) {
  CliRun r = cli("trace '" + corpus("poly.lisp") + "'");
  EXPECT_EQ(r.status, 0);
  std::vector<std::size_t> at;
  for (int i = 1; i <= 4; ++i) {
    at.push_back(r.out.find(";; stage " + std::to_string(i) + ":"));
    ASSERT_NE(at.back(), std::string::npos) << r.out;
  }
  EXPECT_EQ(r.out.find(";; stage 5:"), std::string::npos);
  std::string stage3 = r.out.substr(at[2], at[3] - at[2]);
  EXPECT_NE(stage3.find("TYPE-HYP"), std::string::npos);
  EXPECT_EQ(r.out.substr(0, at[2]).find("TYPE-HYP"), std::string::npos);
}

TEST(Trace, TrivialGoal) {
  CliRun r = cli("trace '" + corpus("trivial.lisp") + "'");
  EXPECT_EQ(r.status, 0);
  std::size_t blocks = 0;
  for (std::size_t at = 0; (at = r.out.find(";; stage ", at)) != std::string::npos; ++at) ++blocks;
  EXPECT_EQ(blocks, 4u);
}

TEST(Trace, LenUnfoldedOnce) {
  GoalFile f = load_goal_file(corpus("len.lisp"));
  const Theorem& th = f.select(std::nullopt);
  std::string text = trace(f, th, {});
  std::size_t s2 = text.find(";; stage 2:");
  std::size_t s3 = text.find(";; stage 3:");
  ASSERT_NE(s2, std::string::npos);
  std::string block = text.substr(s2, s3 - s2);
  block = block.substr(block.find('\n') + 1);
  std::size_t calls = 0;
  for (std::size_t at = 0; (at = block.find("(LEN-OF ", at)) != std::string::npos; ++at) ++calls;
  EXPECT_EQ(calls, 1u) << block;
  EXPECT_NE(block.find("(LEN-OF (CDR L))"), std::string::npos) << block;
}
