#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "smtlink/term.hpp"

namespace smtlink {

enum class Origin {
  AddHypo,
  Expand,
  TypeExtract,
  UninterpReturn,
  UninterpConstraint,
  SmtPrecondition,
};

enum class Strategy { Syntactic, ViaSmt, UserAssumed };

enum class Status { Pending, Discharged, Failed, Assumed };

const char* to_string(Origin o);
const char* to_string(Strategy s);
const char* to_string(Status s);
std::optional<Origin> parse_origin(std::string_view text);
std::optional<Strategy> parse_strategy(std::string_view text);
std::optional<Status> parse_status(std::string_view text);

// What the producing pass knew; used for syntactic re-derivation.
struct Evidence {
  std::optional<Clause> before;
  std::optional<Clause> after;
  std::vector<Term> extracted;
  // Uninterpreted function whose call produced the obligation.
  std::string function;
  // Which of the function's return facts (0 is the result recognizer).
  std::size_t fact = 0;
  // The goal literal of a precondition, e.g. (CONSP L).
  std::optional<Term> literal;
  // Literals known to hold where the destructor occurs.
  std::vector<Term> context;
};

struct Obligation {
  std::size_t id = 0;
  Clause clause;
  Origin origin = Origin::AddHypo;
  Strategy strategy = Strategy::Syntactic;
  Status status = Status::Pending;
  // User-provided audit note (required for user-assumed obligations).
  std::string note;
  // Outcome explanation filled in on discharge.
  std::string detail;
  std::string location;
  Evidence evidence;
  double millis = 0.0;
};

// Append-only record of side conditions.  Ids start at 1 and increase.
class Ledger {
 public:
  std::size_t add(Clause clause, Origin origin, Strategy strategy,
                  std::string note = {}, std::string location = {},
                  Evidence evidence = {});

  const std::vector<Obligation>& obligations() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }
  const Obligation& at(std::size_t id) const;

  // pending -> {discharged, failed, assumed}; anything else is a contract
  // violation.
  void resolve(std::size_t id, Status status, std::string detail,
               double millis = 0.0);
  void set_strategy(std::size_t id, Strategy strategy);
  // Marks a pending obligation user-assumed; `note` must be non-empty.
  void assume(std::size_t id, std::string note);

  std::size_t count(Origin origin) const;

 private:
  Obligation& mut(std::size_t id);
  std::vector<Obligation> items_;
};

}  // namespace smtlink
