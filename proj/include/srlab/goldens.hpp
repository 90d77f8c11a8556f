#pragma once

#include "srlab/scenario.hpp"

#include <string>
#include <vector>

namespace srlab {

struct Golden {
  std::string name;
  std::string config;  // scenario file text
  Json expected;       // {"scenario": name, "expectations": [...]}
};

// Reference scenarios used by the acceptance suite.
const std::vector<Golden>& golden_bundle();

// Writes <name>.cfg and <name>.expected.json per golden. Refuses to overwrite
// existing files unless force is set (ConfigError naming the first clash).
std::vector<std::string> emit_goldens(const std::string& dir, bool force);

// Each expectation names a check and a JSON pointer into it:
//   {"check", "pointer", "value", "abs_tol", "stderr_multiple", "provenance"}  numeric
//   {"check", "pointer", "equals"}                                         exact
// Numeric targets may be a {value, stderr} record or a bare number.
// Returns one line per failed expectation.
std::vector<std::string> compare_expectations(const Json& report, const Json& expected);

}  // namespace srlab
