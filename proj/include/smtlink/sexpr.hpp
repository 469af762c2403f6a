#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "smtlink/number.hpp"

namespace smtlink {

// Raw reader output.  Symbols are canonicalized to upper case unless the
// reader is told to preserve case (solver models are read that way).
class SExpr {
 public:
  enum class Kind { Symbol, Integer, Rational, String, List };

  static SExpr symbol(std::string name, std::size_t offset = 0);
  static SExpr string(std::string text, std::size_t offset = 0);
  static SExpr number(Rational value, std::size_t offset = 0);
  static SExpr list(std::vector<SExpr> items, std::size_t offset = 0);
  static SExpr improper(std::vector<SExpr> items, SExpr tail,
                        std::size_t offset = 0);

  Kind kind() const noexcept { return kind_; }
  bool is_symbol() const noexcept { return kind_ == Kind::Symbol; }
  bool is_symbol(std::string_view name) const noexcept {
    return kind_ == Kind::Symbol && text_ == name;
  }
  bool is_number() const noexcept {
    return kind_ == Kind::Integer || kind_ == Kind::Rational;
  }
  bool is_list() const noexcept { return kind_ == Kind::List; }
  bool is_string() const noexcept { return kind_ == Kind::String; }
  bool is_keyword() const noexcept {
    return kind_ == Kind::Symbol && !text_.empty() && text_[0] == ':';
  }

  // Symbol name or string contents.
  const std::string& text() const noexcept { return text_; }
  const Rational& value() const noexcept { return number_; }
  const std::vector<SExpr>& items() const noexcept { return items_; }
  std::size_t size() const noexcept { return items_.size(); }
  const SExpr& operator[](std::size_t i) const { return items_.at(i); }
  // Non-null only for improper lists such as (a . b).
  const SExpr* tail() const noexcept { return tail_.get(); }
  std::size_t offset() const noexcept { return offset_; }

  bool head_is(std::string_view name) const noexcept {
    return is_list() && !items_.empty() && items_[0].is_symbol(name);
  }

  std::string to_string() const;

  friend bool operator==(const SExpr& a, const SExpr& b);
  friend std::ostream& operator<<(std::ostream& out, const SExpr& s) {
    return out << s.to_string();
  }

 private:
  Kind kind_ = Kind::List;
  std::string text_;
  Rational number_;
  std::vector<SExpr> items_;
  std::shared_ptr<const SExpr> tail_;
  std::size_t offset_ = 0;
};

struct ReadOptions {
  bool fold_case = true;
};

struct ParseResult {
  SExpr expr;
  // Offset just past the parsed expression.
  std::size_t end = 0;
  // Offset of the first non-blank, non-comment character after the
  // expression, if any.
  std::optional<std::size_t> trailing;
};

// Reads the first complete s-expression of `text`.
ParseResult parse_sexpr(std::string_view text, ReadOptions options = {});

// Reads every s-expression in `text`.
std::vector<SExpr> parse_all(std::string_view text, ReadOptions options = {});

// Maps an offset to a 1-based line number.
std::size_t line_of(std::string_view text, std::size_t offset);

}  // namespace smtlink
