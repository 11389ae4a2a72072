#include <cmath>

#include "doctest.h"
#include "hadamard/errors.hpp"
#include "hadamard/oracle.hpp"

using namespace hadamard;

TEST_CASE("Bessel series against the standard library") {
  for (double w : {0.0, 0.5, 2.0, 7.5, 15.0}) {
    CHECK(bessel_series(BesselKind::I0, w) ==
          doctest::Approx(std::cyl_bessel_i(0.0, w)).epsilon(1e-13));
  }
  for (double w : {0.0, 0.5, 2.0, 7.5}) {
    CHECK(bessel_series(BesselKind::J0, w) ==
          doctest::Approx(std::cyl_bessel_j(0.0, w)).epsilon(1e-12).scale(1.0));
  }
  CHECK(0.5 * bessel_series(BesselKind::I0, 2.0) == doctest::Approx(1.1397926511).epsilon(1e-9));
  CHECK(0.5 * bessel_series(BesselKind::J0, 2.0) == doctest::Approx(0.1119453893).epsilon(1e-9));
  CHECK_THROWS_AS(bessel_series(BesselKind::I0, -1.0), DomainError);
  CHECK_THROWS_AS(bessel_series(BesselKind::J0, 31.0), DomainError);
}

TEST_CASE("exact kernel") {
  Event x{0.0, 0.0};
  CHECK(exact_kernel_2d(0.0, 1, Event{1.0, 0.3}, x).real() == doctest::Approx(0.5));
  CHECK(exact_kernel_2d(0.0, 1, Event{0.3, 1.0}, x) == cplx(0.0));
  CHECK(exact_kernel_2d(0.0, 1, Event{-1.0, 0.3}, x, -1).real() == doctest::Approx(0.5));
  // m = 2, z = 0: c_4 Gamma = Gamma / 8.
  CHECK(exact_kernel_2d(0.0, 2, Event{1.0, 0.6}, x).real() == doctest::Approx(0.64 / 8.0));
  double G = 4.0 - 1.0;
  CHECK(exact_kernel_2d(3.0, 1, Event{2.0, 1.0}, x).real() ==
        doctest::Approx(0.5 * std::cyl_bessel_i(0.0, std::sqrt(3.0 * G))).epsilon(1e-13));
  CHECK_THROWS_AS(exact_kernel_2d(0.0, 0, Event{1.0, 0.0}, x), RegimeError);
}

TEST_CASE("grid validation") {
  GridSpec g;
  g.domain = Box(Event{0.0, -1.0}, Event{1.0, 1.0});
  g.h = 1.0 / 32;
  CHECK_NOTHROW(g.validate());
  CHECK(g.nx() == 64);
  CHECK(g.nt() == 64);
  g.lambda = 1.5;
  CHECK_THROWS_AS(g.validate(), ConfigError);
  g.lambda = 0.5;
  g.h = -1.0;
  CHECK_THROWS_AS(g.validate(), ConfigError);
}

TEST_CASE("leapfrog causality and smearing") {
  auto m = MinkowskiModel::cube(2, 4.0);
  OperatorSpec op(m, Potential::constant(2, 0.0), cplx(-1.0, 0.0));
  TestFunction f(Event{0.6, 0.0}, Event{0.4, 0.4});
  GridSpec g;
  g.domain = Box(Event{0.0, -2.5}, Event{2.0, 2.5});
  g.h = 1.0 / 64;
  FDSolution u = fd_retarded_solve(op, f, g);
  CHECK(u.causality_leak(f.support()) < 1e-9);
  // Pairing against the exact kernel matches the grid solution.
  TestFunction psi(Event{1.5, 0.2}, Event{0.4, 0.4});
  QuadratureSpec q;
  q.rel_tol = 1e-9;
  cplx exact = kernel_convolution_pairing(
      [](const Event& e) { return exact_kernel_2d(cplx(-1.0, 0.0), 1, e, Event{0.0, 0.0}); },
      psi, f, q);
  CHECK(std::abs(u.smeared(psi) - exact) < 2e-3 * std::abs(exact));
}

TEST_CASE("sources that reach the walls are rejected") {
  auto m = MinkowskiModel::cube(2, 4.0);
  OperatorSpec op(m, Potential::constant(2, 0.0));
  GridSpec g;
  g.domain = Box(Event{0.0, -0.5}, Event{2.0, 0.5});
  g.h = 1.0 / 32;
  CHECK_THROWS_AS(fd_retarded_solve(op, TestFunction(Event{0.6, 0.0}, Event{0.4, 0.4}), g),
                  DomainError);
}

TEST_CASE("constant kernel pairing against a brute-force sum") {
  // <psi, (1/2) 1_{J+} * f> by a midpoint rule on the product grid.
  TestFunction psi(Event{1.4, 0.1}, Event{0.3, 0.3}), f(Event{0.5, 0.0}, Event{0.3, 0.3});
  const int n = 48;
  double s = 0.0;
  Box ps = psi.support(), fs = f.support();
  double hp0 = ps.side(0) / n, hp1 = ps.side(1) / n, hf0 = fs.side(0) / n, hf1 = fs.side(1) / n;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Event y{ps.lo[0] + (a + 0.5) * hp0, ps.lo[1] + (b + 0.5) * hp1};
      double py = psi(y);
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          Event x{fs.lo[0] + (c + 0.5) * hf0, fs.lo[1] + (d + 0.5) * hf1};
          if (flat::in_cone(y.data(), x.data(), 2, +1)) s += 0.5 * py * f(x);
        }
    }
  s *= hp0 * hp1 * hf0 * hf1;
  QuadratureSpec q;
  q.rel_tol = 1e-9;
  cplx v = kernel_convolution_pairing([](const Event&) { return cplx(0.5); }, psi, f, q);
  CHECK(v.real() == doctest::Approx(s).epsilon(5e-3));
}
