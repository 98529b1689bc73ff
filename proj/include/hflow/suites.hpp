#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hflow/registry.hpp"

namespace hflow {

struct SuiteResult {
  std::string suite;
  std::string instance;
  bool passed = false;
  double worst = 0.0;              // worst observed value against the suite bound
  std::vector<std::string> lines;  // human-readable findings
};

// Suites: "cat0" (point and ray comparison inequalities, interpolation speed,
// triangle inequality), "evi", "sandwich", "moment-weight", "bind".
std::vector<std::string> suite_names();

SuiteResult run_suite(const Instance& inst, const std::string& suite, std::uint64_t seed);

// All suites in canonical order.
std::vector<SuiteResult> run_all_suites(const Instance& inst, std::uint64_t seed);

}  // namespace hflow
