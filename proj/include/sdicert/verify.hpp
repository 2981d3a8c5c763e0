#pragma once

// Reproduction and property suites behind `sdicert verify`. Output contains
// no timings or thread-dependent values, so equal seeds give equal text.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace sdicert::verify {

struct Check {
  std::string name;
  std::string detail;
  bool pass;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed;
  std::vector<Check> checks;

  int failures() const;
  bool passed() const { return failures() == 0; }
};

/// Reproductions of the published values and thresholds.
SuiteReport reproduction_suite(std::uint64_t seed);
/// Randomised non-violation runs of the biseparable and separable-measurement
/// bounds; `samples` strategies per (n, d) case.
SuiteReport bounds_suite(std::uint64_t seed, int samples = 400);
/// Exhaustive compression optimum, random quantum compression and PPT counts.
SuiteReport oracle_suite(std::uint64_t seed);

/// Throws std::invalid_argument for an unknown suite name.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

void print_report(const SuiteReport& report, std::ostream& out);

}  // namespace sdicert::verify
