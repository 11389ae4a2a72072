#include <cmath>

#include "doctest.h"
#include "hadamard/errors.hpp"
#include "hadamard/expansion.hpp"

using namespace hadamard;

namespace {

OperatorSpec flat_op(int d, double b, cplx z) {
  return OperatorSpec(MinkowskiModel::cube(d, 3.0), Potential::constant(d, b), z);
}

}  // namespace

TEST_CASE("term strings") {
  OperatorSpec op = flat_op(2, 0.0, 0.0);
  CHECK(format_terms(power_expansion(op, 1, 2)) == "1·V0·R(2), 1·V1·R(4), 1·V2·R(6)");
  CHECK(format_terms(power_expansion(op, 2, 2)) == "1·V0·R(4), 2·V1·R(6), 3·V2·R(8)");
  CHECK(format_terms(power_expansion(op, -1, 3)) == "1·V0·R(-2), -1·V1·R(0)");
  CHECK(format_terms(power_expansion(op, 0, 3)) == "1·V0·R(0)");
}

TEST_CASE("term table rows") {
  OperatorSpec op = flat_op(2, 0.0, 0.0);
  auto rows = term_table(power_expansion(op, 3, 2));
  REQUIRE(rows.size() == 3);
  CHECK(rows[2].coefficient == "6");
  CHECK(rows[2].order == 10);
  CHECK(rows[2].kind == "standard");
  auto res = term_table(resolvent_expansion(op, cplx(1.0, 0.0), 1, 1));
  REQUIRE(res.size() == 2);
  CHECK(res[1].kind == "resolvent");
}

TEST_CASE("double expansion coefficients are binomials") {
  OperatorSpec op = flat_op(3, 0.0, 0.0);
  TruncatedExpansion T = double_expansion(op, cplx(0.5, 0.0), 2, 2);
  CHECK(T.terms.size() == 9);
  for (const auto& t : T.terms) {
    CHECK(t.coefficient == gbinom(t.k + t.j, t.k));
    CHECK(t.order == 2 * t.k + 2 * t.j + 2);
    CHECK(t.z_power == t.j);
  }
}

TEST_CASE("d = 2 Green's kernel against the modified Bessel function") {
  // With b and z constant the m = 1 series is (1/2) I0(sqrt((z - b) Gamma)).
  OperatorSpec op = flat_op(2, 0.25, cplx(1.5, 0.0));
  TruncatedExpansion T = power_expansion(op, 1, 20);
  Event x{0.0, 0.0};
  for (Event y : {Event{1.0, 0.2}, Event{2.0, -1.0}, Event{0.5, 0.5}}) {
    double G = y[0] * y[0] - y[1] * y[1];
    double expect = 0.5 * std::cyl_bessel_i(0.0, std::sqrt(1.25 * G));
    CHECK(expansion_eval(T, y, x).real() == doctest::Approx(expect).epsilon(1e-13));
  }
  CHECK(expansion_eval(T, Event{0.2, 1.0}, x) == cplx(0.0));
}

TEST_CASE("truncation error shrinks with N") {
  OperatorSpec op = flat_op(2, 0.0, cplx(-2.0, 0.0));
  Event y{1.5, 0.3}, x{0.0, 0.0};
  double G = 1.5 * 1.5 - 0.09;
  double exact = 0.5 * std::cyl_bessel_j(0.0, std::sqrt(2.0 * G));
  double prev = 1e300;
  for (int N = 0; N <= 8; ++N) {
    double err = std::abs(expansion_eval(power_expansion(op, 1, N), y, x).real() - exact);
    CHECK(err < prev);
    prev = err;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("function regime is enforced for evaluation") {
  OperatorSpec op = flat_op(4, 0.0, 0.0);
  TruncatedExpansion T = power_expansion(op, 1, 1);
  CHECK_THROWS_AS(expansion_eval(T, Event{1.0, 0.0, 0.0, 0.0}, Event(4)), RegimeError);
}

TEST_CASE("ledger identity for a constant potential") {
  OperatorSpec op = flat_op(2, 0.3, cplx(1.0, 0.0));
  std::vector<TestFunction> probes = {TestFunction(Event{1.0, 0.2}, Event{0.4, 0.4})};
  QuadratureSpec q;
  q.rel_tol = 1e-10;
  LedgerReport r = ledger_identity_check(op, 1, 2, probes, Event{0.0, 0.0}, q);
  CHECK(r.max_residual < 1e-8);
}
