#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "nloc/cell_set.hpp"
#include "nloc/kernel.hpp"
#include "nloc/maximize.hpp"
#include "nloc/nonlinearity.hpp"

namespace nloc::cli {

// Rejected configuration; exit status 2. The field is "section.key".
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(field) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Sectioned key-value configuration checked against a fixed schema. Every
// schema field has a default, so the resolved view is total.
class Config {
 public:
  Config();
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& path);

  // Overrides, e.g. from command-line flags; validated like file entries.
  void set(const std::string& section, const std::string& key, const std::string& value);

  double number(const std::string& section, const std::string& key) const;
  // Unset optional numbers (empty default) report false.
  bool has_number(const std::string& section, const std::string& key) const;
  long long integer(const std::string& section, const std::string& key) const;
  std::string text(const std::string& section, const std::string& key) const;
  std::vector<double> numbers(const std::string& section, const std::string& key) const;

  // "section.key=value" lines, sorted, values in canonical form.
  std::string canonical() const;
  std::uint64_t hash(const std::string& command) const;

 private:
  std::map<std::string, std::string> values_;  // "section.key" -> canonical value
};

std::uint64_t fnv1a(const std::string& bytes);

// Builders validate against module preconditions and name the offending field.
Kernel make_kernel(const Config& c);
Grid make_grid(const Config& c);
CellSet make_mask(const Config& c, const Grid& g);
Nonlinearity make_nonlinearity(const Config& c);
AscentParams make_ascent(const Config& c);

}  // namespace nloc::cli
