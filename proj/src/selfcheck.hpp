#pragma once

#include <string>
#include <vector>

namespace yamabe {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Quick property checks; suite is "grid", "flow", "diagnostics" or "all".
/// Throws ValidationError for an unknown suite name.
std::vector<CheckResult> run_selfcheck(const std::string& suite);

}  // namespace yamabe
