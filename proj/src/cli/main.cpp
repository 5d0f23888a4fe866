#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cli/config.hpp"
#include "cli/scenarios.hpp"
#include "conullity/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"checks for the two-conullity metric family"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "run the scenario named in a config file");
  run_cmd->add_option("config", config_path, "path to the config file")->required();

  app.add_subcommand("list-scenarios", "list the scenario names");

  std::string scenario;
  auto* describe_cmd = app.add_subcommand("describe", "explain one scenario and its outputs");
  describe_cmd->add_option("scenario", scenario, "scenario name")->required();

  CLI11_PARSE(app, argc, argv);

  if (run_cmd->parsed()) return conullity::cli::run_config_file(config_path);
  if (describe_cmd->parsed()) {
    try {
      std::cout << conullity::cli::describe_text(scenario);
    } catch (const conullity::ConfigError& e) {
      std::cerr << "config error: " << e.what() << "\n";
      return 2;
    }
    return 0;
  }
  std::cout << conullity::cli::list_scenarios_text();
  return 0;
}
