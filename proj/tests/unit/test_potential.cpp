#include <cmath>

#include "doctest.h"
#include "hadamard/errors.hpp"
#include "hadamard/potential.hpp"

using namespace hadamard;

TEST_CASE("parse constants and bumps") {
  CHECK(Potential::parse("0", 2).is_constant());
  Potential c = Potential::parse("1.5", 3);
  CHECK(c.is_constant());
  CHECK(c.constant_part() == 1.5);
  Potential b = Potential::parse("bump(0.5,0,0.8,1)", 2);
  CHECK_FALSE(b.is_constant());
  Event y{0.9, 0.3};
  CHECK(b.value(y) == doctest::Approx(std::exp(-(0.16 + 0.09) / 0.64)));
  Potential br = Potential::parse("bump([0.5,0],0.8,1) - 0.3", 2);
  CHECK(br.value(y) == doctest::Approx(b.value(y) - 0.3));
}

TEST_CASE("parse polynomials") {
  Potential p = Potential::parse("0.5 + 0.1*t^2 - 0.2*x1*t", 2);
  Event y{2.0, 3.0};
  CHECK(p.value(y) == doctest::Approx(0.5 + 0.4 - 1.2));
}

TEST_CASE("malformed potentials are config errors") {
  CHECK_THROWS_AS(Potential::parse("bump(1,2)", 2), ConfigError);
  CHECK_THROWS_AS(Potential::parse("3*q", 2), ConfigError);
  CHECK_THROWS_AS(Potential::parse("x3", 2), ConfigError);
  CHECK_THROWS_AS(Potential::bump(Event{0.0, 0.0}, -1.0, 1.0), ConfigError);
}

TEST_CASE("operator spec shifting") {
  auto m = MinkowskiModel::cube(2, 2.0);
  OperatorSpec op(m, Potential::constant(2, 0.5), cplx(1.0, 0.0));
  CHECK(op.closed_form());
  OperatorSpec s = op.shifted(cplx(0.0, 2.0));
  CHECK(s.z == cplx(1.0, 2.0));
  CHECK_THROWS_AS(OperatorSpec(m, Potential::constant(3, 0.0)), ConfigError);
}
