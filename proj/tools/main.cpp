#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "geoaccel/commands.hpp"
#include "geoaccel/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Accelerated methods as Bregman proximal steps: experiments and certificates"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::string format = "csv";
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "RNG seed for random-matrix suites");
  app.add_option("--config", config_path, "JSON experiment config")->check(CLI::ExistingFile);
  app.add_option("--out", out, "Output file (or stem for multi-file outputs)");
  app.add_option("--format", format, "Output format")->check(CLI::IsMember({"csv", "json"}));

  CLI::App* subcommands[] = {
      app.add_subcommand("run", "Run a discrete method, an ODE, or the figure2 bundle"),
      app.add_subcommand("equivalence", "Check that the seven accelerated forms coincide"),
      app.add_subcommand("certify", "Certify the continuous-time decay-rate bounds"),
      app.add_subcommand("geodesic", "Emit dual-flat geodesics in primal and dual coordinates"),
  };
  // Global flags may follow the subcommand name.
  for (CLI::App* sub : subcommands) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : geoaccel::kExitConfig;
  }

  geoaccel::CommandOptions options;
  options.out = out;
  options.format = format == "json" ? geoaccel::OutputFormat::Json : geoaccel::OutputFormat::Csv;
  if (*seed_opt) options.seed = seed;

  const std::string command = app.get_subcommands().front()->get_name();
  nlohmann::json config;
  try {
    config = geoaccel::load_config(config_path);
  } catch (const geoaccel::Error& e) {
    std::cerr << "error: " << command << ": reading config: " << e.what() << "\n";
    return geoaccel::kExitConfig;
  }
  return geoaccel::run_command(command, config, options, std::cout, std::cerr);
}
