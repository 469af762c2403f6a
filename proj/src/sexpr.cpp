#include "smtlink/sexpr.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <sstream>

#include "smtlink/error.hpp"

namespace smtlink {

SExpr SExpr::symbol(std::string name, std::size_t offset) {
  SExpr s;
  s.kind_ = Kind::Symbol;
  s.text_ = std::move(name);
  s.offset_ = offset;
  return s;
}

SExpr SExpr::string(std::string text, std::size_t offset) {
  SExpr s;
  s.kind_ = Kind::String;
  s.text_ = std::move(text);
  s.offset_ = offset;
  return s;
}

SExpr SExpr::number(Rational value, std::size_t offset) {
  SExpr s;
  s.kind_ = is_integral(value) ? Kind::Integer : Kind::Rational;
  s.number_ = std::move(value);
  s.offset_ = offset;
  return s;
}

SExpr SExpr::list(std::vector<SExpr> items, std::size_t offset) {
  SExpr s;
  s.kind_ = Kind::List;
  s.items_ = std::move(items);
  s.offset_ = offset;
  return s;
}

SExpr SExpr::improper(std::vector<SExpr> items, SExpr tail,
                      std::size_t offset) {
  SExpr s = list(std::move(items), offset);
  s.tail_ = std::make_shared<const SExpr>(std::move(tail));
  return s;
}

bool operator==(const SExpr& a, const SExpr& b) {
  if (a.kind_ != b.kind_) return false;
  switch (a.kind_) {
    case SExpr::Kind::Symbol:
    case SExpr::Kind::String:
      return a.text_ == b.text_;
    case SExpr::Kind::Integer:
    case SExpr::Kind::Rational:
      return a.number_ == b.number_;
    case SExpr::Kind::List:
      if (a.items_ != b.items_) return false;
      if (!a.tail_ || !b.tail_) return !a.tail_ && !b.tail_;
      return *a.tail_ == *b.tail_;
  }
  return false;
}

std::string SExpr::to_string() const {
  switch (kind_) {
    case Kind::Symbol:
      return text_;
    case Kind::String: {
      std::string out = "\"";
      for (char c : text_) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case Kind::Integer:
    case Kind::Rational:
      return rational_text(number_);
    case Kind::List: {
      std::string out = "(";
      for (std::size_t i = 0; i < items_.size(); ++i) {
        if (i) out += ' ';
        out += items_[i].to_string();
      }
      if (tail_) out += " . " + tail_->to_string();
      return out + ")";
    }
  }
  return {};
}

namespace {

bool is_delimiter(char c) {
  return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' ||
         c == '\'' || c == ';' || c == '"';
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) {
    return std::isdigit(static_cast<unsigned char>(c));
  });
}

Rational pow10(long exponent) {
  Rational r = 1;
  for (long i = 0; i < std::labs(exponent); ++i) r *= 10;
  return exponent < 0 ? Rational(1) / r : r;
}

// Integer, p/q, decimal, and scientific literals.  Returns nullopt when the
// token is not numeric (it is then a symbol, e.g. `1+` or `x^2-y^2`).
std::optional<Rational> read_number(std::string_view tok, std::size_t offset) {
  std::string_view body = tok;
  bool negative = false;
  if (!body.empty() && (body[0] == '-' || body[0] == '+')) {
    negative = body[0] == '-';
    body.remove_prefix(1);
  }
  if (body.empty() || !std::isdigit(static_cast<unsigned char>(body[0]))) {
    return std::nullopt;
  }
  Rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) return std::nullopt;
    BigInt d{std::string(den)};
    if (d == 0) {
      throw Error(ErrorKind::BadToken,
                  "zero denominator in '" + std::string(tok) + "'", offset);
    }
    value = Rational(BigInt{std::string(num)}, d);
  } else {
    std::string_view mantissa = body;
    long exponent = 0;
    if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = body.substr(0, e);
      auto exp_text = body.substr(e + 1);
      bool exp_negative = false;
      if (!exp_text.empty() && (exp_text[0] == '-' || exp_text[0] == '+')) {
        exp_negative = exp_text[0] == '-';
        exp_text.remove_prefix(1);
      }
      if (!all_digits(exp_text) || exp_text.size() > 6) return std::nullopt;
      exponent = std::stol(std::string(exp_text));
      if (exp_negative) exponent = -exponent;
    }
    std::string_view whole = mantissa;
    std::string_view frac;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
      whole = mantissa.substr(0, dot);
      frac = mantissa.substr(dot + 1);
      if (!frac.empty() && !all_digits(frac)) return std::nullopt;
    }
    if (!all_digits(whole)) return std::nullopt;
    BigInt digits{std::string(whole) + std::string(frac)};
    value = Rational(digits) * pow10(exponent - static_cast<long>(frac.size()));
  }
  return negative ? Rational(-value) : value;
}

class Reader {
 public:
  Reader(std::string_view text, ReadOptions options)
      : text_(text), options_(options) {}

  std::size_t position() const { return pos_; }

  // Skips blanks and comments; returns false at end of input.
  bool skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (c == '#' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '|') {
        auto close = text_.find("|#", pos_ + 2);
        if (close == std::string_view::npos) {
          throw Error(ErrorKind::BadToken, "unterminated block comment", pos_);
        }
        pos_ = close + 2;
      } else {
        return true;
      }
    }
    return false;
  }

  SExpr read() {
    if (!skip_blank()) {
      throw Error(ErrorKind::UnbalancedParen, "unexpected end of input", pos_);
    }
    std::size_t start = pos_;
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      return read_list_tail(start);
    }
    if (c == ')') {
      throw Error(ErrorKind::UnbalancedParen, "unexpected ')'", pos_);
    }
    if (c == '\'') {
      ++pos_;
      SExpr quoted = read();
      return SExpr::list({SExpr::symbol("QUOTE", start), std::move(quoted)},
                         start);
    }
    if (c == '"') return read_string();
    if (c == '|') return read_bar_symbol();
    return read_atom();
  }

 private:
  SExpr read_list_tail(std::size_t start) {
    std::vector<SExpr> items;
    for (;;) {
      if (!skip_blank()) {
        throw Error(ErrorKind::UnbalancedParen, "unclosed '('", start);
      }
      if (text_[pos_] == ')') {
        ++pos_;
        return SExpr::list(std::move(items), start);
      }
      if (text_[pos_] == '.' && pos_ + 1 < text_.size() &&
          is_delimiter(text_[pos_ + 1])) {
        std::size_t dot = pos_;
        if (items.empty()) {
          throw Error(ErrorKind::BadToken, "dot at start of list", dot);
        }
        ++pos_;
        SExpr tail = read();
        if (!skip_blank()) {
          throw Error(ErrorKind::UnbalancedParen, "unclosed '('", start);
        }
        if (text_[pos_] != ')') {
          throw Error(ErrorKind::BadToken, "more than one form after dot",
                      pos_);
        }
        ++pos_;
        if (tail.is_list() && !tail.tail()) {
          for (const auto& item : tail.items()) items.push_back(item);
          return SExpr::list(std::move(items), start);
        }
        return SExpr::improper(std::move(items), std::move(tail), start);
      }
      items.push_back(read());
    }
  }

  SExpr read_string() {
    std::size_t start = pos_++;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    if (pos_ >= text_.size()) {
      throw Error(ErrorKind::BadToken, "unterminated string", start);
    }
    ++pos_;
    return SExpr::string(std::move(out), start);
  }

  SExpr read_bar_symbol() {
    std::size_t start = pos_++;
    auto close = text_.find('|', pos_);
    if (close == std::string_view::npos) {
      throw Error(ErrorKind::BadToken, "unterminated |symbol|", start);
    }
    std::string name(text_.substr(pos_, close - pos_));
    pos_ = close + 1;
    return SExpr::symbol(std::move(name), start);
  }

  SExpr read_atom() {
    std::size_t start = pos_;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_])) ++pos_;
    std::string_view tok = text_.substr(start, pos_ - start);
    if (tok == ".") throw Error(ErrorKind::BadToken, "stray '.'", start);
    if (tok.find('|') != std::string_view::npos) {
      throw Error(ErrorKind::BadToken,
                  "unexpected '|' in '" + std::string(tok) + "'", start);
    }
    if (auto number = read_number(tok, start)) {
      return SExpr::number(std::move(*number), start);
    }
    std::string name(tok);
    if (options_.fold_case) {
      std::transform(name.begin(), name.end(), name.begin(), [](char ch) {
        return static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
      });
    }
    return SExpr::symbol(std::move(name), start);
  }

  std::string_view text_;
  ReadOptions options_;
  std::size_t pos_ = 0;
};

}  // namespace

ParseResult parse_sexpr(std::string_view text, ReadOptions options) {
  Reader reader(text, options);
  ParseResult result{reader.read(), 0, std::nullopt};
  result.end = reader.position();
  if (reader.skip_blank()) result.trailing = reader.position();
  return result;
}

std::vector<SExpr> parse_all(std::string_view text, ReadOptions options) {
  Reader reader(text, options);
  std::vector<SExpr> out;
  while (reader.skip_blank()) out.push_back(reader.read());
  return out;
}

std::size_t line_of(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(
                 std::count(text.begin(), text.begin() + offset, '\n'));
}

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnbalancedParen: return "UnbalancedParen";
    case ErrorKind::BadToken: return "BadToken";
    case ErrorKind::UnknownFunction: return "UnknownFunction";
    case ErrorKind::ArityMismatch: return "ArityMismatch";
    case ErrorKind::BareSymbol: return "BareSymbol";
    case ErrorKind::FuelExhausted: return "FuelExhausted";
    case ErrorKind::UnboundVar: return "UnboundVar";
    case ErrorKind::DuplicateName: return "DuplicateName";
    case ErrorKind::MutualRecursion: return "MutualRecursion";
    case ErrorKind::UnknownRecognizer: return "UnknownRecognizer";
    case ErrorKind::CyclicTypeReference: return "CyclicTypeReference";
    case ErrorKind::BadHint: return "BadHint";
    case ErrorKind::ExpansionBlowup: return "ExpansionBlowup";
    case ErrorKind::MissingTypeHyp: return "MissingTypeHyp";
    case ErrorKind::SortClash: return "SortClash";
    case ErrorKind::AmbiguousNil: return "AmbiguousNil";
    case ErrorKind::UnsupportedOp: return "UnsupportedOp";
    case ErrorKind::ModelParseError: return "ModelParseError";
    case ErrorKind::BadGoalFile: return "BadGoalFile";
    case ErrorKind::Contract: return "Contract";
  }
  return "Unknown";
}

}  // namespace smtlink
