#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hadamard {

struct SuiteOptions {
  /// Restrict dimension-swept suites to one d (0 = all).
  int dim = 0;
  unsigned seed = 7;
};

struct SuiteResult {
  std::string name;
  bool pass = false;
  double max_residual = 0.0;
  double tolerance = 0.0;
  double runtime_ms = 0.0;
  /// Human-readable residual table, one check per line.
  std::vector<std::string> details;
  /// Set when the suite threw instead of finishing.
  std::string error;
};

struct Suite {
  std::string name;
  /// Module the suite exercises; `report --only` matches name or group.
  std::string group;
  std::string summary;
  /// Acceptance criterion number, 0 for additional invariant suites.
  int criterion = 0;
  /// Wall-clock limit in seconds that is part of the pass condition (0: none).
  double time_limit_s = 0.0;
  std::function<SuiteResult(const SuiteOptions&)> body;
};

/// All suites in registry order: the twelve acceptance criteria first.
const std::vector<Suite>& suite_registry();

/// Looks a suite up by name; nullptr when unknown.
const Suite* find_suite(const std::string& name);

/// Runs one suite, timing it, turning exceptions into failures and applying
/// the time limit.
SuiteResult run_suite(const Suite& suite, const SuiteOptions& opts);

/// Runs the selected suites on up to `jobs` threads; results come back in
/// the order of `selected`.
std::vector<SuiteResult> run_suites(const std::vector<const Suite*>& selected,
                                    const SuiteOptions& opts, int jobs);

}  // namespace hadamard
