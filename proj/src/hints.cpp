#include "smtlink/hints.hpp"

#include <set>

#include "smtlink/error.hpp"

namespace smtlink {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& reason,
                      std::optional<std::size_t> offset = std::nullopt) {
  throw Error(ErrorKind::BadHint, field + ": " + reason, offset);
}

bool truthy(const SExpr& s, const std::string& field) {
  if (s.is_symbol("T")) return true;
  if (s.is_symbol("NIL") || (s.is_list() && s.size() == 0)) return false;
  bad(field, "expected t or nil", s.offset());
}

HypothesisHint read_hypothesis(const SExpr& s, const TypeRegistry& reg) {
  // Either (term) or (term :assume "note"); a bare application is accepted
  // when its head is not itself a list.
  if (s.is_list() && s.size() >= 1 && s[0].is_list() && !s[0].head_is("LAMBDA")) {
    HypothesisHint h{sexpr_to_term(s[0], reg), std::nullopt};
    std::size_t i = 1;
    while (i < s.size()) {
      if (s[i].is_symbol(":ASSUME") && i + 1 < s.size() && s[i + 1].is_string()) {
        if (s[i + 1].text().empty()) {
          bad(":hypotheses", "empty :assume note", s[i + 1].offset());
        }
        h.note = s[i + 1].text();
        i += 2;
      } else {
        bad(":hypotheses", "unexpected " + s[i].to_string(), s[i].offset());
      }
    }
    return h;
  }
  return {sexpr_to_term(s, reg), std::nullopt};
}

std::pair<std::string, ExpandOverride> read_expand(const SExpr& s) {
  if (s.is_symbol() && !s.is_keyword()) {
    return {s.text(), ExpandOverride::with_depth(1)};
  }
  if (!s.is_list() || s.size() == 0 || !s[0].is_symbol() || s[0].is_keyword()) {
    bad(":expand", "expected (name :depth n) or (name :uninterpreted)",
        s.offset());
  }
  std::string name = s[0].text();
  if (s.size() == 1) return {name, ExpandOverride::with_depth(1)};
  if (s.size() == 2 && s[1].is_symbol(":UNINTERPRETED")) {
    return {name, ExpandOverride::uninterpreted()};
  }
  if (s.size() == 3 && s[1].is_symbol(":DEPTH") && s[2].is_number() &&
      is_integral(s[2].value()) && s[2].value() >= 0) {
    return {name, ExpandOverride::with_depth(
                      numerator_of(s[2].value()).convert_to<std::size_t>())};
  }
  bad(":expand", "malformed override for " + name, s.offset());
}

std::string require_recognizer(const TypeRegistry& reg, const std::string& name,
                               const std::string& field) {
  auto r = reg.resolve_recognizer(name);
  if (!r) bad(field, "unknown recognizer " + name);
  return *r;
}

std::pair<std::string, UninterpSpec> read_uninterp(const SExpr& s,
                                                   const TypeRegistry& reg) {
  if (!s.is_list() || s.size() < 3 || !s[0].is_symbol() || !s[1].is_list() ||
      !s[2].is_symbol()) {
    bad(":uninterp", "expected (name (arg-recognizers...) result-recognizer)",
        s.offset());
  }
  std::string name = s[0].text();
  const FnDef* fn = reg.function(name);
  if (!fn) bad(":uninterp", "unknown function " + name, s[0].offset());
  UninterpSpec spec;
  for (const auto& a : s[1].items()) {
    if (!a.is_symbol()) bad(":uninterp", "recognizer expected", a.offset());
    spec.arg_recognizers.push_back(require_recognizer(reg, a.text(), ":uninterp"));
  }
  spec.result_recognizer = require_recognizer(reg, s[2].text(), ":uninterp");
  std::size_t i = 3;
  std::set<std::string> formals(fn->formals.begin(), fn->formals.end());
  while (i < s.size()) {
    if (s[i].is_symbol(":CONSTRAINTS") && i + 1 < s.size() && s[i + 1].is_list()) {
      for (const auto& c : s[i + 1].items()) {
        spec.constraints.push_back(sexpr_to_term(c, reg, &formals));
      }
      i += 2;
    } else {
      bad(":uninterp", "unexpected " + s[i].to_string(), s[i].offset());
    }
  }
  return {name, std::move(spec)};
}

}  // namespace

HintSpec merge_hints(const HintSpec& defaults, const HintSpec& user) {
  HintSpec out = defaults;
  out.hypotheses.insert(out.hypotheses.end(), user.hypotheses.begin(),
                        user.hypotheses.end());
  for (const auto& [k, v] : user.expand) out.expand[k] = v;
  for (const auto& [k, v] : user.uninterp) out.uninterp[k] = v;
  if (user.ints_as_reals) out.ints_as_reals = user.ints_as_reals;
  if (user.expansion_cap) out.expansion_cap = user.expansion_cap;
  if (user.solver.command) out.solver.command = user.solver.command;
  if (user.solver.timeout_seconds) {
    out.solver.timeout_seconds = user.solver.timeout_seconds;
  }
  return out;
}

void validate_hints(const HintSpec& hints, const TypeRegistry& reg) {
  for (const auto& [name, ov] : hints.expand) {
    if (!reg.function(name)) bad(":expand", "unknown function " + name);
  }
  for (const auto& [name, spec] : hints.uninterp) {
    const FnDef* fn = reg.function(name);
    if (!fn) bad(":uninterp", "unknown function " + name);
    if (spec.arg_recognizers.size() != fn->formals.size()) {
      bad(":uninterp", name + " takes " + std::to_string(fn->formals.size()) +
                           " arguments but " +
                           std::to_string(spec.arg_recognizers.size()) +
                           " recognizers were given");
    }
    for (const auto& r : spec.arg_recognizers) {
      if (!recognizer_kind(reg, r).is_recognizer()) {
        bad(":uninterp", "unknown recognizer " + r);
      }
    }
    if (!recognizer_kind(reg, spec.result_recognizer).is_recognizer()) {
      bad(":uninterp", "unknown recognizer " + spec.result_recognizer);
    }
    std::set<std::string> formals(fn->formals.begin(), fn->formals.end());
    for (const auto& c : spec.constraints) {
      for (const auto& v : free_vars(c)) {
        if (!formals.count(v)) {
          bad(":uninterp", "constraint of " + name + " mentions " + v);
        }
      }
    }
  }
  for (const auto& h : hints.hypotheses) {
    if (h.note && h.note->empty()) bad(":hypotheses", "empty note");
  }
  if (hints.solver.timeout_seconds && !(*hints.solver.timeout_seconds > 0)) {
    bad(":timeout", "must be positive");
  }
  if (hints.solver.command && hints.solver.command->empty()) {
    bad(":solver-cmd", "empty command");
  }
  if (hints.expansion_cap && *hints.expansion_cap == 0) {
    bad(":expansion-cap", "must be positive");
  }
}

HintSpec parse_hints(const SExpr& plist, const TypeRegistry& reg) {
  HintSpec h;
  if (!plist.is_list()) bad("hints", "expected a property list", plist.offset());
  const auto& items = plist.items();
  if (items.size() % 2 != 0) {
    bad("hints", "odd-length property list", plist.offset());
  }
  std::set<std::string> seen;
  for (std::size_t i = 0; i < items.size(); i += 2) {
    const SExpr& key = items[i];
    const SExpr& val = items[i + 1];
    if (!key.is_keyword()) bad("hints", "expected keyword", key.offset());
    if (!seen.insert(key.text()).second) {
      bad(key.text(), "given twice", key.offset());
    }
    const std::string& k = key.text();
    if (k == ":HYPOTHESES") {
      if (!val.is_list()) bad(k, "expected a list", val.offset());
      for (const auto& e : val.items()) h.hypotheses.push_back(read_hypothesis(e, reg));
    } else if (k == ":EXPAND") {
      if (!val.is_list()) bad(k, "expected a list", val.offset());
      for (const auto& e : val.items()) {
        auto [name, ov] = read_expand(e);
        h.expand[name] = ov;
      }
    } else if (k == ":UNINTERP") {
      if (!val.is_list()) bad(k, "expected a list", val.offset());
      for (const auto& e : val.items()) {
        auto [name, spec] = read_uninterp(e, reg);
        h.uninterp[name] = std::move(spec);
      }
    } else if (k == ":INTS-AS-REALS") {
      h.ints_as_reals = truthy(val, k);
    } else if (k == ":TIMEOUT") {
      if (!val.is_number() || val.value() <= 0) {
        bad(k, "expected a positive number", val.offset());
      }
      h.solver.timeout_seconds = val.value().convert_to<double>();
    } else if (k == ":SOLVER-CMD") {
      if (!val.is_string()) bad(k, "expected a string", val.offset());
      h.solver.command = split_command(val.text());
    } else if (k == ":EXPANSION-CAP") {
      if (!val.is_number() || !is_integral(val.value()) || val.value() <= 0) {
        bad(k, "expected a positive integer", val.offset());
      }
      h.expansion_cap = numerator_of(val.value()).convert_to<std::size_t>();
    } else {
      bad(k, "unknown hint field", key.offset());
    }
  }
  validate_hints(h, reg);
  return h;
}

std::vector<std::string> split_command(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  bool have = false;
  for (char c : text) {
    if (c == '"') {
      quoted = !quoted;
      have = true;
    } else if (!quoted && (c == ' ' || c == '\t')) {
      if (have) out.push_back(cur);
      cur.clear();
      have = false;
    } else {
      cur += c;
      have = true;
    }
  }
  if (have) out.push_back(cur);
  return out;
}

}  // namespace smtlink
