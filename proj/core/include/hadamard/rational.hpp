#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>

namespace hadamard {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

/// Generalized binomial a(a-1)...(a-b+1)/b! for any integer a and b >= 0;
/// zero for b < 0.
Rational gbinom(long a, long b);

/// p/q text, or just p when q = 1.
std::string to_string(const Rational& r);

double to_double(const Rational& r);

}  // namespace hadamard
