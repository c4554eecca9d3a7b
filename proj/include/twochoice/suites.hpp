#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace twochoice {

struct SuiteOptions {
  unsigned jobs = 1;
  std::uint64_t seed = 20240601;         // base seed; replicas derive from it
  std::optional<std::uint64_t> seeds;    // overrides the suite's replica count
  std::optional<std::string> out;        // directory for suite-<name>.json
};

struct SuiteReport {
  std::string name;
  std::string claim;  // one-line statement of what is checked
  bool passed = false;
  std::vector<std::string> details;  // one line per sub-check / replica group
  nlohmann::ordered_json data;       // raw observed statistics
  double wall_clock_seconds = 0.0;

  nlohmann::ordered_json to_json() const;
};

struct SuiteInfo {
  std::string name;
  std::string claim;
};

// Registered suites in a fixed order.
const std::vector<SuiteInfo>& suite_registry();

// Runs the named suite and judges it against its pinned thresholds.
// Throws UnknownSuite for an unregistered name.
SuiteReport run_suite(const std::string& name, const SuiteOptions& options = {});

}  // namespace twochoice
