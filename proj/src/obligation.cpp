#include "smtlink/obligation.hpp"

#include <algorithm>

#include "smtlink/error.hpp"

namespace smtlink {

const char* to_string(Origin o) {
  switch (o) {
    case Origin::AddHypo: return "add-hypo";
    case Origin::Expand: return "expand";
    case Origin::TypeExtract: return "type-extract";
    case Origin::UninterpReturn: return "uninterp-return";
    case Origin::UninterpConstraint: return "uninterp-constraint";
    case Origin::SmtPrecondition: return "smt-precondition";
  }
  return "";
}

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::Syntactic: return "syntactic";
    case Strategy::ViaSmt: return "via-smt";
    case Strategy::UserAssumed: return "user-assumed";
  }
  return "";
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Pending: return "pending";
    case Status::Discharged: return "discharged";
    case Status::Failed: return "failed";
    case Status::Assumed: return "assumed";
  }
  return "";
}

std::optional<Origin> parse_origin(std::string_view text) {
  for (auto o : {Origin::AddHypo, Origin::Expand, Origin::TypeExtract,
                 Origin::UninterpReturn, Origin::UninterpConstraint,
                 Origin::SmtPrecondition}) {
    if (text == to_string(o)) return o;
  }
  return std::nullopt;
}

std::optional<Strategy> parse_strategy(std::string_view text) {
  for (auto s : {Strategy::Syntactic, Strategy::ViaSmt, Strategy::UserAssumed}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

std::optional<Status> parse_status(std::string_view text) {
  for (auto s : {Status::Pending, Status::Discharged, Status::Failed,
                 Status::Assumed}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

std::size_t Ledger::add(Clause clause, Origin origin, Strategy strategy,
                        std::string note, std::string location,
                        Evidence evidence) {
  if (strategy == Strategy::UserAssumed && note.empty()) {
    throw Error(ErrorKind::Contract, "user-assumed obligation without a note");
  }
  Obligation ob{items_.size() + 1, std::move(clause), origin, strategy,
                Status::Pending, std::move(note), {}, std::move(location),
                std::move(evidence), 0.0};
  items_.push_back(std::move(ob));
  return items_.back().id;
}

const Obligation& Ledger::at(std::size_t id) const {
  if (id == 0 || id > items_.size()) {
    throw Error(ErrorKind::Contract, "no obligation " + std::to_string(id));
  }
  return items_[id - 1];
}

Obligation& Ledger::mut(std::size_t id) {
  return const_cast<Obligation&>(at(id));
}

void Ledger::resolve(std::size_t id, Status status, std::string detail,
                     double millis) {
  Obligation& ob = mut(id);
  if (ob.status != Status::Pending || status == Status::Pending) {
    throw Error(ErrorKind::Contract,
                "illegal status transition for obligation " +
                    std::to_string(id) + ": " + to_string(ob.status) + " -> " +
                    to_string(status));
  }
  if (status == Status::Assumed &&
      (ob.strategy != Strategy::UserAssumed || ob.note.empty())) {
    throw Error(ErrorKind::Contract,
                "obligation " + std::to_string(id) + " assumed without a note");
  }
  ob.status = status;
  ob.detail = std::move(detail);
  ob.millis = millis;
}

void Ledger::set_strategy(std::size_t id, Strategy strategy) {
  Obligation& ob = mut(id);
  if (ob.status != Status::Pending) {
    throw Error(ErrorKind::Contract, "strategy change on settled obligation");
  }
  if (strategy == Strategy::UserAssumed && ob.note.empty()) {
    throw Error(ErrorKind::Contract, "user-assumed obligation without a note");
  }
  ob.strategy = strategy;
}

void Ledger::assume(std::size_t id, std::string note) {
  if (note.empty()) {
    throw Error(ErrorKind::Contract, "assumption needs an audit note");
  }
  Obligation& ob = mut(id);
  if (ob.status != Status::Pending) {
    throw Error(ErrorKind::Contract, "cannot assume settled obligation " +
                                         std::to_string(id));
  }
  ob.note = std::move(note);
  ob.strategy = Strategy::UserAssumed;
  resolve(id, Status::Assumed, "assumed by user");
}

std::size_t Ledger::count(Origin origin) const {
  return static_cast<std::size_t>(
      std::count_if(items_.begin(), items_.end(),
                    [&](const Obligation& o) { return o.origin == origin; }));
}

}  // namespace smtlink
