#pragma once

#include <string>
#include <vector>

#include "noiselab/harness/config.hpp"

namespace noiselab {

// Fixed registry entry: scenario name, the claim label it exercises, a one-liner.
struct ScenarioInfo {
  std::string name;
  std::string theorem;
  std::string description;
};

// The eight scenarios, in registry order.
const std::vector<ScenarioInfo>& scenario_registry();

// One line per scenario: "name → theorem -- description".
std::string list_scenarios();

struct Check {
  std::string name;
  bool pass = false;
  std::string detail;  // comma-free so it embeds in CSV cells verbatim
};

struct RunReport {
  std::string scenario;
  std::string config_hash;  // 16 hex digits of the canonical config
  std::vector<Check> checks;
  std::vector<std::string> artifacts;  // file names written inside out_dir
  double wall_seconds = 0.0;           // not written to any artifact
  bool all_pass() const;
};

// Executes the named scenario: writes its CSV artifacts plus report.csv under
// cfg.out_dir and returns the verdicts. Identical config + seed produce byte-identical
// artifacts for any worker count.
RunReport run_scenario(const ScenarioConfig& cfg);

// Human-readable block for the console.
std::string report_text(const RunReport& rep);

}  // namespace noiselab
