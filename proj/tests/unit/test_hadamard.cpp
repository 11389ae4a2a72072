#include <cmath>

#include "doctest.h"
#include "hadamard/hadamard.hpp"

using namespace hadamard;

TEST_CASE("constant potentials give powers of z - b") {
  for (int d : {2, 3, 4, 6}) {
    auto m = MinkowskiModel::cube(d, 2.0);
    OperatorSpec op(m, Potential::constant(d, 0.7), cplx(0.2, 1.0));
    HadamardFamily fam = hadamard_family(op, 5);
    REQUIRE(fam.closed_form());
    Event y(d), x(d);
    y[0] = 1.0;
    std::vector<cplx> v = fam.values(y, x, 5);
    cplx base(-0.5, 1.0);
    for (int k = 0; k <= 5; ++k) {
      CHECK(std::abs(v[static_cast<std::size_t>(k)] - std::pow(base, k)) < 1e-13);
    }
  }
}

TEST_CASE("ray solver reproduces the closed form") {
  auto m = MinkowskiModel::cube(3, 2.0);
  OperatorSpec op(m, Potential::constant(3, -0.4), cplx(0.3, 0.0));
  FamilyOptions fo;
  fo.force_numeric = true;
  HadamardFamily num = hadamard_family(op, 4, fo);
  CHECK_FALSE(num.closed_form());
  Event y{0.8, 0.3, -0.2}, x{-0.1, 0.0, 0.1};
  std::vector<cplx> v = num.values(y, x, 4);
  for (int k = 0; k <= 4; ++k) CHECK(std::abs(v[static_cast<std::size_t>(k)] - std::pow(0.7, k)) < 1e-10);
}

TEST_CASE("first coefficient is one and the family is symmetric") {
  auto m = MinkowskiModel::cube(2, 3.0);
  OperatorSpec op(m, Potential::bump(Event{0.5, 0.0}, 0.8, 1.0));
  HadamardFamily fam = hadamard_family(op, 3);
  Event y{1.2, 0.3}, x{0.1, -0.2};
  auto a = fam.values(y, x, 3), b = fam.values(x, y, 3);
  CHECK(std::abs(a[0] - 1.0) < 1e-14);
  // V^1 is minus the mean of b along the segment.
  const int n = 200;
  double mean = 0.0;
  for (int i = 0; i < n; ++i) {
    double s = (i + 0.5) / n;
    mean += op.potential.value(x + s * (y - x)) / n;
  }
  CHECK(a[1].real() == doctest::Approx(-mean).epsilon(1e-5));
  for (int k = 0; k <= 3; ++k) CHECK(std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]) < 1e-9);
}

TEST_CASE("transport recursion on the diagonal") {
  auto m = MinkowskiModel::cube(2, 3.0);
  OperatorSpec op(m, Potential::parse("bump(0.5,0,0.8,1) - 0.3", 2), cplx(0.4, 0.0));
  HadamardFamily fam = hadamard_family(op, 4);
  DiagonalReport r = diagonal_check(op, fam, 3, 6, 5);
  CHECK(r.max_residual < 1e-6);
}

TEST_CASE("heat shift of a delta sequence") {
  std::vector<cplx> a = {1.0, 0.0, 0.0, 0.0, 0.0};
  cplx z(0.5, -1.0);
  std::vector<cplx> s = heat_shift(a, z, 4);
  double fact = 1.0;
  for (int k = 0; k <= 4; ++k) {
    if (k) fact *= k;
    CHECK(std::abs(s[static_cast<std::size_t>(k)] - std::pow(z, k) / fact) < 1e-14);
  }
}

TEST_CASE("binomial shift matches a direct family") {
  auto m = MinkowskiModel::cube(2, 3.0);
  OperatorSpec op(m, Potential::bump(Event{0.5, 0.0}, 0.8, 1.0));
  HadamardFamily base = hadamard_family(op, 3);
  cplx dz(0.6, 0.2);
  HadamardFamily shifted = shift_coefficients(base, dz);
  HadamardFamily direct = hadamard_family(op.shifted(dz), 3);
  Event y{1.0, 0.4}, x{0.2, 0.1};
  auto a = shifted.values(y, x, 3), b = direct.values(y, x, 3);
  for (int k = 0; k <= 3; ++k) {
    CHECK(std::abs(a[static_cast<std::size_t>(k)] - b[static_cast<std::size_t>(k)]) <
          1e-9 * (1 + std::abs(b[static_cast<std::size_t>(k)])));
  }
}
