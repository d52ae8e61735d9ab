#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ghg {

struct SuiteReport {
  std::string suite;
  std::size_t trials = 0;
  std::size_t passed = 0;
  std::vector<std::string> failures;  // first few failing trials
  double seconds = 0.0;
  bool ok() const { return trials > 0 && passed == trials; }
};

/// trws-bounds, qpbo-persistency, prop1, zero-form, kabsch.
const std::vector<std::string>& suite_names();
std::size_t default_trials(const std::string& suite);

/// Runs a named suite; `trials` = 0 selects the default count. Throws
/// std::invalid_argument for an unknown suite.
SuiteReport run_suite(const std::string& suite, std::uint64_t seed, std::size_t trials = 0);

}  // namespace ghg
