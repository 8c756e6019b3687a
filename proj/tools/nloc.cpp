#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "nloc/error.hpp"

// Exit status: 0 ok, 1 verification failure, 2 invalid configuration,
// 3 numerical failure.
int main(int argc, char** argv) {
  CLI::App app{"Nonlocal quadratic forms: inequality suites, spectra and constrained maximization"};
  std::string command, config_path, out = ".", profile;
  long long seed = 0, threads = 0;
  app.add_option("command", command, "Command to run")->required()->check(CLI::IsMember(nloc::cli::command_names()));
  app.add_option("--config", config_path, "Configuration file (sectioned key = value)");
  app.add_option("--out", out, "Output directory");
  auto* seed_opt = app.add_option("--seed", seed, "Seed for random draws");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads, 0 for all cores");
  auto* profile_opt = app.add_option("--tolerance-profile", profile, "Tolerance profile")
                          ->check(CLI::IsMember({"strict", "default"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    nloc::cli::Config config = config_path.empty() ? nloc::cli::Config() : nloc::cli::Config::load(config_path);
    if (*seed_opt) config.set("run", "seed", std::to_string(seed));
    if (*threads_opt) config.set("run", "threads", std::to_string(threads));
    if (*profile_opt) config.set("run", "tolerance_profile", profile);
    return nloc::cli::run(command, config, out);
  } catch (const nloc::cli::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return 2;
  } catch (const nloc::Error& e) {
    std::cerr << command << " failed: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << command << " failed: " << e.what() << "\n";
    return 3;
  }
}
