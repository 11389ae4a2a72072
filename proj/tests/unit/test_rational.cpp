#include <cmath>

#include "doctest.h"
#include "hadamard/multi_index.hpp"
#include "hadamard/rational.hpp"
#include "hadamard/special.hpp"

using namespace hadamard;

TEST_CASE("generalized binomials") {
  CHECK(gbinom(5, 2) == 10);
  CHECK(gbinom(5, 0) == 1);
  CHECK(gbinom(2, 5) == 0);
  CHECK(gbinom(3, -1) == 0);
  for (int k = 0; k < 10; ++k) CHECK(gbinom(-1, k) == (k % 2 ? -1 : 1));
  CHECK(gbinom(-3, 2) == 6);
  CHECK(gbinom(-2, 3) == -4);
  CHECK(to_string(Rational(3, 4)) == "3/4");
  CHECK(to_string(Rational(-7)) == "-7");
}

TEST_CASE("Pascal rule for negative tops") {
  for (long a = -6; a <= 6; ++a) {
    for (long b = 1; b <= 8; ++b) CHECK(gbinom(a, b) == gbinom(a - 1, b) + gbinom(a - 1, b - 1));
  }
}

TEST_CASE("binomials and factorials in double") {
  CHECK(binomial(10, 3) == 120.0);
  CHECK(factorial(6) == 720.0);
}

TEST_CASE("complex gamma against the real library") {
  for (double x : {0.3, 1.0, 2.5, 7.25}) {
    CHECK(lgamma_complex(x).real() == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
    CHECK(rgamma(x).real() == doctest::Approx(1.0 / std::tgamma(x)).epsilon(1e-13));
  }
  CHECK(rgamma(-1.5).real() == doctest::Approx(1.0 / std::tgamma(-1.5)).epsilon(1e-12));
  for (int n = 0; n <= 4; ++n) {
    CHECK(is_gamma_pole(-n));
    CHECK(rgamma(-n) == std::complex<double>(0.0));
  }
  CHECK_FALSE(is_gamma_pole(0.5));
  // Gamma(1/2 + i) via |Gamma(1/2 + iy)|^2 = pi / cosh(pi y).
  double mag2 = std::norm(1.0 / rgamma({0.5, 1.0}));
  CHECK(mag2 == doctest::Approx(M_PI / std::cosh(M_PI)).epsilon(1e-12));
}
