// Runs the twelve acceptance criteria at their pinned tolerances and prints
// one pass/fail line per criterion. Exit code 1 if any criterion fails.
#include <algorithm>
#include <cstdio>
#include <thread>

#include "hadamard/suites.hpp"

using namespace hadamard;

int main() {
  std::vector<const Suite*> sel;
  for (const Suite& s : suite_registry()) {
    if (s.criterion > 0) sel.push_back(&s);
  }
  int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<SuiteResult> res = run_suites(sel, SuiteOptions{}, jobs);
  int failed = 0;
  for (std::size_t i = 0; i < res.size(); ++i) {
    const SuiteResult& r = res[i];
    std::printf("criterion %2d %-22s %s  max_residual=%.3e tolerance=%.1e runtime_ms=%.0f\n",
                sel[i]->criterion, r.name.c_str(), r.pass ? "PASS" : "FAIL", r.max_residual,
                r.tolerance, r.runtime_ms);
    if (!r.pass) {
      ++failed;
      for (const auto& line : r.details) std::printf("    %s\n", line.c_str());
      if (!r.error.empty()) std::printf("    error: %s\n", r.error.c_str());
    }
  }
  std::printf("%zu/%zu criteria passed\n", res.size() - static_cast<std::size_t>(failed),
              res.size());
  return failed ? 1 : 0;
}
