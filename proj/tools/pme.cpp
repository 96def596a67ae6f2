// Command line front end: pme run|convergence|front|diagnose --config <path> [--out <dir>]

#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pme/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gradient scheme benchmarks for the porous medium equation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"run", "march one configuration and write the trajectory tables"},
      {"convergence", "mesh or time step refinement sweep"},
      {"front", "free boundary tracking across slow-diffusion exponents"},
      {"diagnose", "consistency, limit-conformity and coercivity sweep"},
  };
  for (const auto& [name, description] : commands) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_override, "output directory (overrides the config key 'out')");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints help, exits 0
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;  // usage problems are configuration errors
  }

  const std::string command = app.get_subcommands().front()->get_name();
  return pme::run_cli(command, config_path, out_override);
}
