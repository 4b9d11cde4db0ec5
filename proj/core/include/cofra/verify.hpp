#pragma once

// Built-in property suites behind the `verify` subcommand: kinematics
// identities, sampler correctness, and moment benchmarks. Each check is
// self-contained and needs no configuration.

#include <string>
#include <vector>

namespace cofra {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;

  bool all_pass() const;
};

SuiteResult verify_kinematics(std::uint64_t seed = 0);
SuiteResult verify_samplers(std::uint64_t seed = 0);
SuiteResult verify_moments(std::uint64_t seed = 0);

std::vector<std::string> verify_suite_names();
SuiteResult run_verify_suite(const std::string& name, std::uint64_t seed = 0);

/// |determinant| of a dense n x n matrix (row-major), by partial-pivot
/// elimination. Small n only; used by the volume-preservation check.
double abs_determinant(std::vector<double> a, int n);

}  // namespace cofra
