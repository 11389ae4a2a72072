#include "hadamard/rational.hpp"

namespace hadamard {

Rational gbinom(long a, long b) {
  if (b < 0) return Rational(0);
  BigInt num = 1, den = 1;
  for (long i = 0; i < b; ++i) {
    num *= BigInt(a - i);
    den *= BigInt(i + 1);
  }
#ifdef HADAMARD_INJECT_BINOMIAL_FAULT
  // Deliberate off-by-one used by the mutation smoke test.
  if (b >= 2) num += den;
#endif
  return Rational(num, den);
}

std::string to_string(const Rational& r) {
  BigInt n = boost::multiprecision::numerator(r);
  BigInt d = boost::multiprecision::denominator(r);
  if (d == 1) return n.str();
  return n.str() + "/" + d.str();
}

double to_double(const Rational& r) { return r.convert_to<double>(); }

}  // namespace hadamard
