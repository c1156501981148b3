#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "iontrap/config.hpp"
#include "iontrap/errors.hpp"
#include "iontrap/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "penningsim: engineered Ising interactions in a planar Penning-trap ion crystal.\n"
      "Computes the crystal equilibrium, drumhead modes, spin-spin couplings, detuning\n"
      "sweeps and spin dynamics, writing plot-ready tables plus summary.json."};
  app.name("penningsim");

  std::string command;
  app.add_option("command", command,
                 "one of: equilibrate | modes | couplings | sweep | dynamics | validate")
      ->required();
  std::string config_path;
  app.add_option("--config", config_path, "configuration file (defaults used when omitted)");
  std::string out_dir;
  app.add_option("--out", out_dir, "output directory (overrides output.directory)");
  std::uint64_t seed = 0;
  CLI::Option* seed_option =
      app.add_option("--seed", seed, "crystal jitter seed (overrides crystal.jitter_seed)");
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress progress output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& error) {
    const int code = app.exit(error);
    return code == 0 ? 0 : iontrap::kExitConfig;
  }

  try {
    iontrap::RunConfig config =
        config_path.empty() ? iontrap::RunConfig{} : iontrap::load_config(config_path);
    if (!out_dir.empty()) config.directory = out_dir;
    if (seed_option->count() > 0) config.jitter_seed = seed;
    return iontrap::run_command(command, config, std::cout, quiet);
  } catch (const iontrap::ConfigError& error) {
    std::cerr << "error: " << error.what() << "\n";
    return iontrap::kExitConfig;
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return iontrap::kExitInternal;
  }
}
