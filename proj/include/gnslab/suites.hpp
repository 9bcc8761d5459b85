#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gnslab {

// ---------------------------------------------------------------------------
// Randomized property suites. Each suite draws its probes from a RandomSource
// derived from (seed, suite name), so running one suite alone reproduces the
// exact probes it would see inside a full run.

struct SuiteResult {
  std::string name;
  bool pass = false;
  int checks = 0;      // probes exercised
  double wall_ms = 0;  // not part of any deterministic payload
  std::string detail;  // first failure, empty when passing
};

constexpr std::uint64_t kDefaultSuiteSeed = 20260815;

// Names in execution order.
const std::vector<std::string>& suite_names();

// Runs one suite; throws Error("UnresolvedReference", ...) for unknown names.
SuiteResult run_suite(const std::string& name, std::uint64_t seed = kDefaultSuiteSeed);

std::vector<SuiteResult> run_all_suites(std::uint64_t seed = kDefaultSuiteSeed);

}  // namespace gnslab
