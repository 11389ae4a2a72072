#include <cmath>

#include "doctest.h"
#include "hadamard/errors.hpp"
#include "hadamard/geometry.hpp"
#include "hadamard/testfn.hpp"

using namespace hadamard;

TEST_CASE("bump values") {
  TestFunction phi(Event{1.0, 0.0, 0.5}, Event{0.5, 0.25, 1.0}, 2.0);
  CHECK(phi(phi.center) == doctest::Approx(2.0 * std::exp(-3.0)));
  CHECK(phi(Event{1.6, 0.0, 0.5}) == 0.0);
  CHECK(phi(Event{1.0, 0.25, 0.5}) == 0.0);
  double u = 0.5;
  double expect = 2.0 * std::exp(-1.0 / (1.0 - u * u)) * std::exp(-2.0);
  CHECK(phi(Event{1.25, 0.0, 0.5}) == doctest::Approx(expect));
  Box s = phi.support();
  CHECK(s.lo[0] == 0.5);
  CHECK(s.hi[2] == 1.5);
}

TEST_CASE("profile derivatives at the center") {
  double d[5];
  bump_profile_derivatives(0.0, 4, d);
  CHECK(d[0] == doctest::Approx(std::exp(-1.0)));
  CHECK(d[1] == doctest::Approx(0.0));
  CHECK(d[2] == doctest::Approx(-2.0 * std::exp(-1.0)));
  bump_profile_derivatives(1.5, 4, d);
  for (double v : d) CHECK(v == 0.0);
}

TEST_CASE("profile derivatives match finite differences") {
  const double h = 1e-4;
  for (double u : {-0.7, -0.2, 0.3, 0.85}) {
    double a[9], p[9], m[9];
    bump_profile_derivatives(u, 8, a);
    bump_profile_derivatives(u + h, 8, p);
    bump_profile_derivatives(u - h, 8, m);
    for (int k = 0; k + 3 <= 8; ++k) {
      double fd = (p[k] - m[k]) / (2 * h);
      // Central-difference truncation h^2/6 times the third derivative, plus rounding.
      double tol = 2.0 * h * h / 6.0 * std::abs(a[k + 3]) + 1e-8 * (1.0 + std::abs(a[k]) / h);
      CHECK(std::abs(a[k + 1] - fd) <= tol);
    }
  }
}

TEST_CASE("mixed partials match nested differences") {
  TestFunction phi(Event{0.0, 0.1}, Event{0.8, 0.6});
  Event y{0.2, -0.1};
  const double h = 1e-4;
  auto f = [&](double dt, double dx) { return phi(Event{y[0] + dt, y[1] + dx}); };
  double fd = (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4 * h * h);
  CHECK(eval_derivative(phi, {1, 1}, y) == doctest::Approx(fd).epsilon(1e-6));
  CHECK_THROWS_AS(eval_derivative(phi, {9, 8}, y), UnsupportedOrderError);
}

TEST_CASE("box power against a five-point stencil") {
  auto m = MinkowskiModel::cube(2, 3.0);
  TestFunction phi(Event{0.0, 0.0}, Event{0.9, 0.7});
  auto box = apply_box_power(phi, 1, *m);
  const double h = 1e-3;
  for (Event y : {Event{0.1, 0.2}, Event{-0.3, 0.05}, Event{0.5, -0.4}}) {
    double c = phi(y);
    double tt = (phi(Event{y[0] + h, y[1]}) - 2 * c + phi(Event{y[0] - h, y[1]})) / (h * h);
    double xx = (phi(Event{y[0], y[1] + h}) - 2 * c + phi(Event{y[0], y[1] - h})) / (h * h);
    CHECK(box(y) == doctest::Approx(tt - xx).epsilon(1e-5));
  }
  auto id = apply_box_power(phi, 0, *m);
  CHECK(id(Event{0.1, 0.2}) == phi(Event{0.1, 0.2}));
}

TEST_CASE("bump field jets agree with the scalar function") {
  TestFunction phi(Event{0.5, 0.0}, Event{0.5, 0.5}, 3.0);
  BumpField f(phi);
  Event y{0.6, 0.1};
  CHECK(f.value(y).real() == doctest::Approx(phi(y)));
  REQUIRE(f.support().has_value());
}
