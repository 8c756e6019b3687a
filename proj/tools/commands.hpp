#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace nloc::cli {

inline const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"kernel-info", "kappa-table", "jensen",   "eigs",
                                              "poincare",    "dichotomy",   "maximize", "verify-all"};
  return names;
}

// Runs one command and writes its artifacts and manifest.json into out.
// Returns the process exit status: 0, or 1 when verify-all finds a violation.
// Throws ConfigError for invalid input and nloc::Error for numerical failures.
int run(const std::string& command, const Config& config, const std::filesystem::path& out);

}  // namespace nloc::cli
