#pragma once

// The aggregated self-check suite run by `ncball suite`: every module's
// invariant checks with per-check derived seeds.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace ncball {

struct CheckResult {
  std::string name;
  bool pass = false;
  nlohmann::ordered_json details;  // residuals and counts; deterministic
  double runtime_ms = 0.0;         // not part of the JSON report
};

struct SuiteConfig {
  std::uint64_t seed = 42;
  std::vector<std::string> filters;      // substrings of check names; empty = all
  std::set<std::string> inject_faults;   // checks whose input is deliberately corrupted
};

struct SuiteReport {
  std::uint64_t seed = 0;
  std::vector<CheckResult> checks;  // sorted by name
  bool pass() const;
};

/// Names of all checks, sorted.
std::vector<std::string> suite_check_names();

SuiteReport run_suite(const SuiteConfig& config);

/// Deterministic report: identical configs give byte-identical dumps.
nlohmann::ordered_json suite_report_json(const SuiteReport& report);

}  // namespace ncball
