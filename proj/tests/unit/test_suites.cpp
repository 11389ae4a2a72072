#include <set>
#include <stdexcept>

#include "doctest.h"
#include "hadamard/suites.hpp"

using namespace hadamard;

TEST_CASE("registry lists every criterion once, in order") {
  const auto& reg = suite_registry();
  std::set<std::string> names;
  int expect = 1;
  for (const Suite& s : reg) {
    CHECK(names.insert(s.name).second);
    if (s.criterion > 0) CHECK(s.criterion == expect++);
  }
  CHECK(expect == 13);
  CHECK(find_suite("causality") != nullptr);
  CHECK(find_suite("no-such-suite") == nullptr);
}

TEST_CASE("fast suites pass and report residuals") {
  SuiteOptions o;
  std::vector<const Suite*> sel = {find_suite("binomial-identities"),
                                   find_suite("geometry-invariants"),
                                   find_suite("bessel-series")};
  auto res = run_suites(sel, o, 2);
  REQUIRE(res.size() == 3);
  for (std::size_t i = 0; i < res.size(); ++i) {
    CHECK(res[i].name == sel[i]->name);
    CHECK(res[i].pass);
    CHECK(res[i].max_residual <= res[i].tolerance);
    CHECK_FALSE(res[i].details.empty());
  }
}

TEST_CASE("exceptions and time limits become failures") {
  Suite boom{"boom", "test", "throws", 0, 0.0,
             [](const SuiteOptions&) -> SuiteResult { throw std::runtime_error("bad"); }};
  SuiteResult r = run_suite(boom, {});
  CHECK_FALSE(r.pass);
  CHECK(r.error.find("bad") != std::string::npos);
  Suite slow{"slow", "test", "over budget", 0, 1e-9, [](const SuiteOptions&) {
               SuiteResult s;
               s.pass = true;
               volatile double x = 0;
               for (int i = 0; i < 1000000; ++i) x = x + i;
               return s;
             }};
  CHECK_FALSE(run_suite(slow, {}).pass);
}
