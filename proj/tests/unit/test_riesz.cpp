#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "doctest.h"
#include "hadamard/errors.hpp"
#include "hadamard/riesz.hpp"
#include "hadamard/testfn.hpp"

using namespace hadamard;
using boost::math::quadrature::gauss_kronrod;

namespace {

// Brute-force c * int_{J+(0)} Gamma^p phi in d = 2, integrating x inside the
// cone for each t. Breakpoints keep the outer integrand smooth per panel.
double cone_integral_2d(const TestFunction& phi, double c, double p) {
  Box s = phi.support();
  auto inner = [&](double t) {
    double a = std::max(s.lo[1], -t), b = std::min(s.hi[1], t);
    if (a >= b) return 0.0;
    auto f = [&](double x) {
      double g = t * t - x * x;
      return g <= 0.0 ? 0.0 : std::pow(g, p) * phi(Event{t, x});
    };
    return gauss_kronrod<double, 61>::integrate(f, a, b, 12, 1e-13);
  };
  std::vector<double> br = {s.lo[0], std::abs(s.lo[1]), std::abs(s.hi[1]), s.hi[0]};
  std::sort(br.begin(), br.end());
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    double a = std::max(br[i], s.lo[0]), b = std::min(br[i + 1], s.hi[0]);
    if (a < b) total += gauss_kronrod<double, 61>::integrate(inner, a, b, 12, 1e-12);
  }
  return c * total;
}

}  // namespace

TEST_CASE("Riesz constants at integer orders") {
  CHECK(riesz_constant(2.0, 2).real() == doctest::Approx(0.5));
  CHECK(riesz_constant(4.0, 4).real() == doctest::Approx(1.0 / (8.0 * M_PI)));
  ExactRieszConstant e = riesz_constant_exact(4, 4);
  CHECK(e.value() == doctest::Approx(1.0 / (8.0 * M_PI)));
  // Gamma poles give exact zeros.
  CHECK(riesz_constant(0.0, 2) == cplx(0.0));
  CHECK(riesz_constant(-2.0, 3) == cplx(0.0));
  CHECK(riesz_constant(2.0, 4) == cplx(0.0));
  // d = 2, alpha = 2n: 2^(1-2n) / ((n-1)!)^2.
  for (int n = 1; n <= 6; ++n) {
    double expect = std::pow(2.0, 1 - 2 * n) / std::pow(std::tgamma(n), 2);
    CHECK(riesz_constant(2.0 * n, 2).real() == doctest::Approx(expect).epsilon(1e-13));
  }
}

TEST_CASE("Riesz constants at complex orders against the gamma formula") {
  for (int d = 2; d <= 5; ++d) {
    for (double a : {2.3, 3.7, 5.1}) {
      double expect = std::pow(2.0, 1 - a) * std::pow(M_PI, (2.0 - d) / 2.0) /
                      (std::tgamma(a / 2) * std::tgamma((a - d + 2) / 2));
      CHECK(riesz_constant(a, d).real() == doctest::Approx(expect).epsilon(1e-12));
    }
  }
}

TEST_CASE("pointwise values and support") {
  auto m = MinkowskiModel::cube(3, 3.0);
  RieszDistribution R{+1, cplx(5.0, 0.0), m};
  Event x{0.0, 0.0, 0.0};
  Event in{1.0, 0.3, 0.2}, out{0.2, 1.0, 0.0}, past{-1.0, 0.1, 0.0};
  double G = 1.0 - 0.09 - 0.04;
  CHECK(riesz_eval(R, in, x).real() == doctest::Approx(riesz_constant(5.0, 3).real() * G));
  CHECK(riesz_eval(R, out, x) == cplx(0.0));
  CHECK(riesz_eval(R, past, x) == cplx(0.0));
  RieszDistribution A{-1, cplx(5.0, 0.0), m};
  CHECK(riesz_eval(A, past, x).real() == doctest::Approx(riesz_constant(5.0, 3).real() * (1 - 0.01)));
  RieszDistribution low{+1, cplx(2.0, 0.0), m};
  CHECK_THROWS_AS(riesz_eval(low, in, x), RegimeError);
}

TEST_CASE("pairing against a brute-force cone integral in d = 2") {
  auto m = MinkowskiModel::cube(2, 3.0);
  TestFunction phi(Event{1.0, 0.3}, Event{0.4, 0.4});
  QuadratureSpec q;
  q.rel_tol = 1e-11;
  for (double a : {2.0, 3.0, 4.5}) {
    RieszDistribution R{+1, cplx(a, 0.0), m};
    double expect = cone_integral_2d(phi, riesz_constant(a, 2).real(), (a - 2) / 2);
    CHECK(riesz_pair(R, phi, Event{0.0, 0.0}, q).real() ==
          doctest::Approx(expect).epsilon(1e-8));
  }
}

TEST_CASE("direct and continuation routes agree") {
  auto m = MinkowskiModel::cube(3, 3.0);
  TestFunction phi(Event{1.2, 0.1, -0.2}, Event{0.5, 0.4, 0.4});
  QuadratureSpec q;
  q.rel_tol = 1e-10;
  for (double a : {1.5, 2.5, 3.5}) {
    RieszDistribution R{+1, cplx(a, 0.3), m};
    cplx c = riesz_pair(R, phi, Event(3), q, PairingRoute::Continuation);
    cplx d = riesz_pair(R, phi, Event(3), q, PairingRoute::Direct);
    CHECK(std::abs(c - d) <= 1e-7 * std::abs(c));
  }
}

TEST_CASE("diagonal orders pair to derivatives at the base point") {
  auto m = MinkowskiModel::cube(2, 3.0);
  TestFunction phi(Event{0.1, -0.1}, Event{0.6, 0.5});
  Event x{0.2, 0.1};
  QuadratureSpec q;
  CHECK(is_diagonal_order(0.0));
  CHECK(is_diagonal_order(-4.0));
  CHECK_FALSE(is_diagonal_order(2.0));
  RieszDistribution R0{+1, cplx(0.0, 0.0), m};
  CHECK(riesz_pair(R0, phi, x, q).real() == doctest::Approx(phi(x)).epsilon(1e-12));
  RieszDistribution Rm2{+1, cplx(-2.0, 0.0), m};
  double box = eval_derivative(phi, {2, 0}, x) - eval_derivative(phi, {0, 2}, x);
  CHECK(riesz_pair(Rm2, phi, x, q).real() == doctest::Approx(box).epsilon(1e-10));
}

TEST_CASE("recursion under the wave operator") {
  auto m = MinkowskiModel::cube(4, 3.0);
  TestFunction phi(Event{1.0, 0.2, 0.0, -0.1}, Event{0.5, 0.4, 0.4, 0.4});
  QuadratureSpec q;
  q.rel_tol = 1e-10;
  for (double a : {4.5, 6.0}) {
    RieszDistribution hi{+1, cplx(a + 2, 0.0), m}, lo{+1, cplx(a, 0.0), m};
    cplx l = riesz_pair(hi, phi, Event(4), q, PairingRoute::Continuation, 1);
    cplx r = riesz_pair(lo, phi, Event(4), q);
    CHECK(std::abs(l - r) <= 1e-7 * std::abs(r));
  }
}

TEST_CASE("continuation step counts") {
  CHECK(continuation_steps(4.0, 2) == 0);
  CHECK(continuation_steps(1.0, 2) == 2);
}
