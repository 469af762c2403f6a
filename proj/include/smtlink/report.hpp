#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "smtlink/obligation.hpp"

namespace smtlink {

struct ReportRow {
  std::size_t id = 0;
  Origin origin = Origin::AddHypo;
  Strategy strategy = Strategy::Syntactic;
  Status status = Status::Pending;
  double millis = 0.0;
  std::string location;
  std::string note;
  std::string detail;

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

// Machine-readable summary of one prove run; see docs/report-format.md.
struct RunReport {
  std::string file;
  std::string theorem;
  std::string verdict;
  std::string reason;
  std::string solver;
  double solver_ms = 0.0;
  double total_ms = 0.0;
  std::vector<ReportRow> obligations;
  std::optional<std::string> counterexample;
  std::optional<std::string> cex_check;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

std::vector<ReportRow> report_rows(const Ledger& ledger);

std::string write_report(const RunReport& r);
// Throws BadGoalFile on malformed input.
RunReport parse_report(const std::string& text);

}  // namespace smtlink
