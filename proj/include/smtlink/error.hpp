#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace smtlink {

enum class ErrorKind {
  UnbalancedParen,
  BadToken,
  UnknownFunction,
  ArityMismatch,
  BareSymbol,
  FuelExhausted,
  UnboundVar,
  DuplicateName,
  MutualRecursion,
  UnknownRecognizer,
  CyclicTypeReference,
  BadHint,
  ExpansionBlowup,
  MissingTypeHyp,
  SortClash,
  AmbiguousNil,
  UnsupportedOp,
  ModelParseError,
  BadGoalFile,
  Contract,
};

const char* to_string(ErrorKind kind);

// All recoverable failures in the library are reported with this type.  The
// offset, when present, is a character offset into the source text that
// produced the offending s-expression.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> offset = std::nullopt)
      : std::runtime_error(message), kind_(kind), offset_(offset) {}

  ErrorKind kind() const noexcept { return kind_; }
  std::optional<std::size_t> offset() const noexcept { return offset_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> offset_;
};

}  // namespace smtlink
