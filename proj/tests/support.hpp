#pragma once

#include <random>
#include <string>
#include <vector>

#include "smtlink/eval.hpp"
#include "smtlink/goalfile.hpp"
#include "smtlink/registry.hpp"
#include "smtlink/sexpr.hpp"
#include "smtlink/solver.hpp"
#include "smtlink/term.hpp"

namespace smtlink::testing {

inline Term term(const std::string& text, const TypeRegistry& reg = {}) {
  return sexpr_to_term(parse_sexpr(text).expr, reg);
}

inline Clause clause(const std::vector<std::string>& ds, const TypeRegistry& reg = {}) {
  std::vector<Term> out;
  for (const auto& d : ds) out.push_back(term(d, reg));
  return Clause(out);
}

inline TypeRegistry registry(const std::string& forms) {
  return load_goal_text(forms, "<test>").reg;
}

inline std::string corpus(const std::string& name) {
  return std::string(SMTLINK_CORPUS_DIR) + "/" + name;
}

inline bool have_z3() { return std::string(SMTLINK_Z3_PATH).size() > 0; }

inline SolverConfig z3_config() {
  SolverConfig cfg;
  cfg.command = {SMTLINK_Z3_PATH, "-in"};
  return cfg;
}

// Values from the small carriers: booleans, integers in [-8, 8], a pool
// of four symbols, and lists of length <= 4 over those atoms.
class Carriers {
 public:
  explicit Carriers(unsigned seed) : rng_(seed) {}

  Value atom() {
    switch (pick(3)) {
      case 0: return Value::boolean(pick(2) == 1);
      case 1: return integer();
      default: return symbol();
    }
  }
  Value integer() { return Value::integer(static_cast<long>(pick(17)) - 8); }
  Value symbol() {
    static const char* pool[] = {"A", "B", "C", "D"};
    return Value::symbol(pool[pick(4)]);
  }
  Value list() {
    std::vector<Value> items(pick(5));
    for (auto& v : items) v = pick(3) ? integer() : atom();
    return Value::list(items);
  }
  Value any() { return pick(4) == 0 ? list() : atom(); }

  Env env(const std::vector<std::string>& vars) {
    Env e;
    for (const auto& v : vars) e[v] = any();
    return e;
  }

  std::size_t pick(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_);
  }
  std::mt19937& rng() { return rng_; }

 private:
  std::mt19937 rng_;
};

}  // namespace smtlink::testing
