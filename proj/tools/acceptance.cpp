// Acceptance runner: one PASS/FAIL line per criterion.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

#include "oracles.hpp"
#include "smtlink/model.hpp"
#include "smtlink/prover.hpp"

using namespace smtlink;
using namespace smtlink::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string secs(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2fs", s);
  return buf;
}

ProveOptions z3_options() {
  ProveOptions opts;
  opts.solver_command = z3_config().command;
  return opts;
}

ProveResult prove_file(const std::string& name, const ProveOptions& opts = z3_options()) {
  GoalFile f = load_goal_file(corpus(name));
  return prove(f, f.select(std::nullopt), opts);
}

bool all_discharged(const Ledger& l, std::initializer_list<Origin> origins = {}) {
  for (const auto& o : l.obligations()) {
    bool wanted = origins.size() == 0 ||
                  std::find(origins.begin(), origins.end(), o.origin) != origins.end();
    if (wanted && o.status != Status::Discharged) return false;
  }
  return true;
}

Outcome program1() {
  auto t0 = Clock::now();
  ProveResult r = prove_file("poly.lisp");
  double t = seconds_since(t0);
  bool ok = r.verdict.kind == Verdict::Kind::Proved && t <= 10.0 &&
            r.state.ledger.count(Origin::Expand) == 1 &&
            r.state.ledger.count(Origin::TypeExtract) == 1 &&
            all_discharged(r.state.ledger, {Origin::Expand, Origin::TypeExtract});
  return {ok, std::string(to_string(r.verdict.kind)) + " in " + secs(t) + ", " +
                  std::to_string(r.state.ledger.size()) + " obligations"};
}

Outcome refutation() {
  auto t0 = Clock::now();
  ProveResult r = prove_file("poly-weakened.lisp");
  double t = seconds_since(t0);
  bool confirmed = r.cex_check && r.cex_check->kind == CexCheck::Kind::Confirmed;
  bool ok = r.verdict.kind == Verdict::Kind::Refuted && confirmed && t <= 10.0;
  return {ok, std::string(to_string(r.verdict.kind)) + " " +
                  r.report.counterexample.value_or("(no counterexample)") + " " +
                  (r.cex_check ? to_string(r.cex_check->kind) : "unchecked") + " in " +
                  secs(t)};
}

Outcome pass_soundness_all() {
  std::ostringstream detail;
  bool ok = true;
  unsigned seed = 1000;
  for (PassId p : ArchTable::standard().passes) {
    SoundnessTally t = pass_soundness(p, 1000, ++seed);
    ok = ok && t.trials >= 1000 && t.violations == 0;
    detail << to_string(p) << " " << t.trials << " trials/" << t.violations
           << " violations/" << t.discards << " discards; ";
    if (t.violations) detail << "first: " << t.first_violation << "; ";
  }
  return {ok, detail.str()};
}

Outcome alist_arrays() {
  auto t0 = Clock::now();
  AlistTally t = alist_bruteforce(z3_config());
  double s = seconds_since(t0);
  return {t.discrepancies == 0 && t.queries == 820 && s <= 60.0,
          std::to_string(t.queries) + " alists, " + std::to_string(t.discrepancies) +
              " discrepancies in " + secs(s) +
              (t.first_discrepancy.empty() ? "" : "; first: " + t.first_discrepancy)};
}

Outcome preconditions() {
  ProveResult clean = prove_file("integer-list.lisp");
  std::size_t made = clean.state.ledger.count(Origin::SmtPrecondition);
  std::size_t destructors = clean.check ? clean.check->destructors : 0;
  ProveOptions dropped = z3_options();
  dropped.faults.drop_preconditions = true;
  ProveOptions forged = z3_options();
  forged.faults.forge_extraction = true;
  auto d = prove_file("integer-list.lisp", dropped).verdict.kind;
  auto f1 = prove_file("integer-list.lisp", forged).verdict.kind;
  auto f2 = prove_file("poly.lisp", forged).verdict.kind;
  using K = Verdict::Kind;
  bool ok = clean.verdict.kind == K::Proved && made == destructors && destructors == 4 &&
            d == K::FailedObligation && f1 == K::FailedObligation &&
            f2 == K::FailedObligation;
  return {ok, std::to_string(made) + " preconditions for " + std::to_string(destructors) +
                  " destructors; dropped: " + to_string(d) + ", forged: " + to_string(f1) +
                  "/" + to_string(f2)};
}

Outcome interning() {
  Carriers gen(606);
  std::size_t trials = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    SymbolIntern si;
    std::vector<std::string> order;
    std::size_t n = 1 + gen.pick(100);
    for (std::size_t i = 0; i < n; ++i) {
      std::string name = "SYM" + std::to_string(gen.pick(60));
      auto seen = std::find(order.begin(), order.end(), name);
      std::size_t expect = seen - order.begin();
      if (seen == order.end()) order.push_back(name);
      if (si.intern(name) != expect) return {false, "non first-occurrence index for " + name};
    }
    if (si.names() != order) return {false, "table differs from first-occurrence order"};
    std::string fresh = si.lift(BigInt(order.size() + gen.pick(5)));
    if (std::find(order.begin(), order.end(), fresh) != order.end()) {
      return {false, "fresh index lifted to interned name " + fresh};
    }
    ++trials;
  }
  return {true, std::to_string(trials) + " sequences of <= 100 interns"};
}

Outcome ring_oscillator() {
  auto t0 = Clock::now();
  ProveResult r = prove_file("ringosc.lisp");
  double t = seconds_since(t0);
  bool ok = r.verdict.kind == Verdict::Kind::Proved && all_discharged(r.state.ledger) &&
            t <= 120.0;
  return {ok, std::string(to_string(r.verdict.kind)) + " in " + secs(t) + ", " +
                  std::to_string(r.state.ledger.size()) + " obligations discharged"};
}

Outcome root_objects() {
  ProveResult r = prove_file("root.lisp");
  if (!r.report.counterexample || !r.check) return {false, "no counterexample printed"};
  const std::string& printed = *r.report.counterexample;
  bool shaped = printed.find("(CEX-ROOT-OBJ ") != std::string::npos;
  std::string again;
  try {
    Counterexample back = parse_counterexample(printed, r.check->sorted.vars, {});
    again = print_counterexample(back, r.check->sorted.vars, {});
  } catch (const Error& e) {
    return {false, std::string("reparse failed: ") + e.what()};
  }
  bool ok = r.verdict.kind == Verdict::Kind::Unknown && shaped && again == printed;
  return {ok, std::string(to_string(r.verdict.kind)) + " " + printed};
}

std::string capture(const std::string& cmd, int& status) {
  std::string out;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) {
    status = -1;
    return out;
  }
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
  int st = ::pclose(p);
  status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return out;
}

Outcome determinism() {
  std::size_t files = 0;
  for (const auto& entry : std::filesystem::directory_iterator(SMTLINK_CORPUS_DIR)) {
    std::string cmd = std::string("'") + SMTLINK_CLI_PATH + "' emit '" +
                      entry.path().string() + "' 2>/dev/null";
    int status = 0;
    std::string first = capture(cmd, status);
    if (status != 0 || first.empty()) return {false, "emit failed on " + entry.path().string()};
    for (int i = 1; i < 10; ++i) {
      if (capture(cmd, status) != first) {
        return {false, "run " + std::to_string(i + 1) + " differs on " +
                           entry.path().filename().string()};
      }
    }
    ++files;
  }
  return {files > 0, std::to_string(files) + " corpus files x 10 runs byte-identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"A1 program-1 proved", program1},
      {"A2 weakened variant refuted", refutation},
      {"A3 pass soundness", pass_soundness_all},
      {"A4 alist/array equivalence", alist_arrays},
      {"A5 precondition completeness", preconditions},
      {"A6 symbol interning", interning},
      {"A7 ring oscillator proved", ring_oscillator},
      {"A8 root-object counterexample", root_objects},
      {"A9 emit determinism", determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
