#include "smtlink/report.hpp"

#include <charconv>
#include <cstdio>
#include <sstream>

#include "smtlink/error.hpp"

namespace smtlink {

namespace {

constexpr const char* kHeader = "smtlink-report 1";

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string millis(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3f", ms);
  return buf;
}

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorKind::BadGoalFile,
              "report line " + std::to_string(line) + ": " + what);
}

// Splits a row into bare words and quoted strings.
std::vector<std::string> fields(const std::string& text, std::size_t line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == ' ') {
      ++i;
      continue;
    }
    std::string f;
    if (text[i] == '"') {
      ++i;
      bool closed = false;
      while (i < text.size()) {
        char c = text[i++];
        if (c == '"') {
          closed = true;
          break;
        }
        if (c == '\\') {
          if (i >= text.size()) malformed(line, "dangling escape");
          char e = text[i++];
          f += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        } else {
          f += c;
        }
      }
      if (!closed) malformed(line, "unterminated string");
    } else {
      while (i < text.size() && text[i] != ' ') f += text[i++];
    }
    out.push_back(std::move(f));
  }
  return out;
}

double number(const std::string& s, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(s, &used);
    if (used != s.size()) malformed(line, "bad number " + s);
    return v;
  } catch (const std::logic_error&) {
    malformed(line, "bad number " + s);
  }
}

}  // namespace

std::vector<ReportRow> report_rows(const Ledger& ledger) {
  std::vector<ReportRow> rows;
  for (const auto& o : ledger.obligations()) {
    rows.push_back({o.id, o.origin, o.strategy, o.status, o.millis, o.location,
                    o.note, o.detail});
  }
  return rows;
}

std::string write_report(const RunReport& r) {
  std::ostringstream out;
  out << kHeader << "\n";
  out << "file: " << quote(r.file) << "\n";
  out << "theorem: " << r.theorem << "\n";
  out << "verdict: " << r.verdict << "\n";
  out << "reason: " << quote(r.reason) << "\n";
  out << "solver: " << r.solver << "\n";
  out << "solver-ms: " << millis(r.solver_ms) << "\n";
  out << "total-ms: " << millis(r.total_ms) << "\n";
  out << "obligations: " << r.obligations.size() << "\n";
  for (const auto& o : r.obligations) {
    out << "obligation " << o.id << " " << to_string(o.origin) << " "
        << to_string(o.strategy) << " " << to_string(o.status) << " "
        << millis(o.millis) << " " << quote(o.location) << " " << quote(o.note)
        << " " << quote(o.detail) << "\n";
  }
  if (r.counterexample) out << "counterexample: " << quote(*r.counterexample) << "\n";
  if (r.cex_check) out << "cex-check: " << *r.cex_check << "\n";
  out << "end\n";
  return out.str();
}

RunReport parse_report(const std::string& text) {
  RunReport r;
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  std::optional<std::size_t> declared;
  bool ended = false;
  auto next = [&] {
    ++n;
    return static_cast<bool>(std::getline(in, line));
  };
  if (!next() || line != kHeader) malformed(1, "missing header");
  while (next()) {
    if (ended) {
      if (!line.empty()) malformed(n, "text after end");
      continue;
    }
    if (line == "end") {
      ended = true;
      continue;
    }
    if (line.rfind("obligation ", 0) == 0) {
      auto f = fields(line.substr(11), n);
      if (f.size() != 8) malformed(n, "obligation row needs 8 fields");
      ReportRow row;
      row.id = static_cast<std::size_t>(number(f[0], n));
      auto o = parse_origin(f[1]);
      auto s = parse_strategy(f[2]);
      auto st = parse_status(f[3]);
      if (!o || !s || !st) malformed(n, "unknown origin, strategy or status");
      row.origin = *o;
      row.strategy = *s;
      row.status = *st;
      row.millis = number(f[4], n);
      row.location = f[5];
      row.note = f[6];
      row.detail = f[7];
      r.obligations.push_back(std::move(row));
      continue;
    }
    auto colon = line.find(": ");
    if (colon == std::string::npos) malformed(n, "expected key: value");
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 2);
    auto one_string = [&] {
      auto f = fields(value, n);
      if (f.size() != 1) malformed(n, "expected one quoted string");
      return f[0];
    };
    if (key == "file") r.file = one_string();
    else if (key == "theorem") r.theorem = value;
    else if (key == "verdict") r.verdict = value;
    else if (key == "reason") r.reason = one_string();
    else if (key == "solver") r.solver = value;
    else if (key == "solver-ms") r.solver_ms = number(value, n);
    else if (key == "total-ms") r.total_ms = number(value, n);
    else if (key == "obligations") declared = static_cast<std::size_t>(number(value, n));
    else if (key == "counterexample") r.counterexample = one_string();
    else if (key == "cex-check") r.cex_check = value;
    else malformed(n, "unknown key " + key);
  }
  if (!ended) malformed(n, "missing end");
  if (declared && *declared != r.obligations.size()) {
    malformed(n, "obligation count mismatch");
  }
  return r;
}

}  // namespace smtlink
