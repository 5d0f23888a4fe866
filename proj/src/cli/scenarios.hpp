#pragma once

#include <string>
#include <vector>

#include "cli/config.hpp"

namespace conullity::cli {

bool scenario_exists(const std::string& name);

// names in the order `all` runs them
std::vector<std::string> scenario_names();

std::string list_scenarios_text();
std::string describe_text(const std::string& name);  // ConfigError on unknown names

// Runs the configured scenario (or all of them), writing the CSV tables and
// report.txt under the output directory; the CONULLITY_OUTPUT_DIR environment
// variable overrides the configured directory. The report is echoed to
// stdout. Returns 0 when every check passed, 1 otherwise.
int run(const RunConfig& cfg);

// load_config + run; a ConfigError prints to stderr and returns 2.
int run_config_file(const std::string& path);

}  // namespace conullity::cli
