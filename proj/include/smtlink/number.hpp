#pragma once

#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace smtlink {

using BigInt = boost::multiprecision::cpp_int;
// Always kept in lowest terms with a positive denominator by the backend.
using Rational = boost::multiprecision::cpp_rational;

inline bool is_integral(const Rational& q) {
  return boost::multiprecision::denominator(q) == 1;
}

inline BigInt numerator_of(const Rational& q) {
  return boost::multiprecision::numerator(q);
}

inline BigInt denominator_of(const Rational& q) {
  return boost::multiprecision::denominator(q);
}

// "17/8", "-3", "0".
inline std::string rational_text(const Rational& q) {
  if (is_integral(q)) return numerator_of(q).str();
  return numerator_of(q).str() + "/" + denominator_of(q).str();
}

}  // namespace smtlink
