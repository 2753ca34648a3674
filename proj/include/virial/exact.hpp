#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace virial {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline std::string to_string(const Integer& v) { return v.str(); }

inline std::string numerator_string(const Rational& q) {
  return boost::multiprecision::numerator(q).str();
}
inline std::string denominator_string(const Rational& q) {
  return boost::multiprecision::denominator(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }
inline double to_double(double v) { return v; }

}  // namespace virial
