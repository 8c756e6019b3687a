#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nloc/error.hpp"
#include "nloc/grid_io.hpp"

namespace nloc::cli {

namespace {

enum class Type { number, integer, text, numbers };

struct Field {
  const char* section;
  const char* key;
  Type type;
  const char* fallback;  // "" leaves an optional number unset
};

const std::vector<Field>& schema() {
  static const std::vector<Field> fields{
      {"run", "seed", Type::integer, "1"},
      {"run", "threads", Type::integer, "1"},
      {"run", "tolerance_profile", Type::text, "default"},

      {"kernel", "family", Type::text, "fractional"},
      {"kernel", "dim", Type::integer, "1"},
      {"kernel", "alpha", Type::number, "0.5"},
      {"kernel", "beta", Type::number, "1"},
      {"kernel", "cutoff", Type::number, "1"},
      {"kernel", "radius", Type::number, "1"},
      {"kernel", "m11", Type::number, "1"},
      {"kernel", "m12", Type::number, "0"},
      {"kernel", "m22", Type::number, "1"},
      {"kernel", "levels", Type::integer, "4"},
      {"kernel", "deltas", Type::numbers, "1,0.5,0.25,0.125,0.0625,0.03125"},
      {"kernel", "divergence_threshold", Type::number, "1e6"},

      {"grid", "half_widths", Type::numbers, "2"},
      {"grid", "cells", Type::numbers, "256"},
      {"grid", "h", Type::number, ""},

      {"mask", "region", Type::text, "all"},

      {"kappa", "r", Type::numbers, "0.5,1,2,4"},

      {"jensen", "delta", Type::numbers, "0.5,0.25,0.125"},
      {"jensen", "samples", Type::integer, "100"},

      {"eigs", "count", Type::integer, "6"},
      {"eigs", "method", Type::text, "automatic"},

      {"poincare", "a", Type::numbers, "0.5,0.25,0.125"},

      {"dichotomy", "family", Type::text, "vanishing"},
      {"dichotomy", "n", Type::numbers, "1,4,16,64,256"},
      {"dichotomy", "epsilon", Type::numbers, ""},
      {"dichotomy", "window", Type::integer, "16"},

      {"nonlinearity", "family", Type::text, "rational_quartic"},

      {"ascent", "step", Type::number, "1"},
      {"ascent", "max_iter", Type::integer, "4000"},
      {"ascent", "tol", Type::number, "1e-6"},
      {"ascent", "recenter_every", Type::integer, "25"},
      {"ascent", "window_cells", Type::integer, "0"},
      {"ascent", "armijo", Type::number, "1e-4"},
      {"ascent", "starts", Type::integer, "5"},

      {"verify", "samples", Type::integer, "100"},
      {"verify", "a", Type::numbers, "0.5,0.25,0.125"},
      {"verify", "delta", Type::numbers, "0.5,0.25,0.125"},
  };
  return fields;
}

const Field* find_field(const std::string& section, const std::string& key) {
  for (const Field& f : schema())
    if (section == f.section && key == f.key) return &f;
  return nullptr;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

double parse_double(const std::string& field, const std::string& raw) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(raw, &used);
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + raw + "'");
  }
  if (used != raw.size() || !std::isfinite(v)) throw ConfigError(field, "expected a finite number, got '" + raw + "'");
  return v;
}

std::vector<std::string> split(const std::string& raw) {
  std::vector<std::string> parts;
  std::stringstream in(raw);
  std::string item;
  while (std::getline(in, item, ',')) parts.push_back(trim(item));
  return parts;
}

std::string canonicalize(const Field& f, const std::string& raw_in) {
  const std::string field = std::string(f.section) + "." + f.key;
  const std::string raw = trim(raw_in);
  switch (f.type) {
    case Type::text:
      return raw;
    case Type::number:
      return raw.empty() ? raw : format_double(parse_double(field, raw));
    case Type::integer: {
      const double v = parse_double(field, raw);
      if (v != std::floor(v) || std::abs(v) > 9e15) throw ConfigError(field, "expected an integer, got '" + raw + "'");
      return std::to_string(static_cast<long long>(v));
    }
    case Type::numbers: {
      if (raw.empty()) return raw;
      std::string out;
      for (const std::string& part : split(raw)) {
        if (!out.empty()) out += ",";
        out += format_double(parse_double(field, part));
      }
      return out;
    }
  }
  return raw;
}

}  // namespace

Config::Config() {
  for (const Field& f : schema())
    values_[std::string(f.section) + "." + f.key] = f.fallback;
}

Config Config::parse(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream in(text);
  try {
    boost::property_tree::ini_parser::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError("config", e.message() + " at line " + std::to_string(e.line()));
  }
  Config c;
  for (const auto& [section, keys] : tree) {
    if (keys.empty()) throw ConfigError(section, "top-level keys must live in a section");
    for (const auto& [key, value] : keys) c.set(section, key, value.data());
  }
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config", "cannot read " + path.string());
  std::ostringstream s;
  s << in.rdbuf();
  return parse(s.str());
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  const Field* f = find_field(section, key);
  if (!f) throw ConfigError(section + "." + key, "unknown key");
  values_[section + "." + key] = canonicalize(*f, value);
}

double Config::number(const std::string& section, const std::string& key) const {
  const std::string& v = values_.at(section + "." + key);
  if (v.empty()) throw ConfigError(section + "." + key, "required");
  return std::stod(v);
}

bool Config::has_number(const std::string& section, const std::string& key) const {
  return !values_.at(section + "." + key).empty();
}

long long Config::integer(const std::string& section, const std::string& key) const {
  return std::stoll(values_.at(section + "." + key));
}

std::string Config::text(const std::string& section, const std::string& key) const {
  return values_.at(section + "." + key);
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  const std::string& v = values_.at(section + "." + key);
  if (!v.empty())
    for (const std::string& part : split(v)) out.push_back(std::stod(part));
  return out;
}

std::string Config::canonical() const {
  std::string out;
  // The worker count never changes results, so it is not a semantic field.
  for (const auto& [k, v] : values_)
    if (k != "run.threads") out += k + "=" + v + "\n";
  return out;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::uint64_t Config::hash(const std::string& command) const { return fnv1a("command=" + command + "\n" + canonical()); }

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError(field, what);
}

std::vector<double> per_axis(const std::vector<double>& v, int dim, const std::string& field) {
  require(v.size() == 1 || static_cast<int>(v.size()) == dim, field, "needs 1 or " + std::to_string(dim) + " entries");
  return v.size() == 1 ? std::vector<double>(dim, v[0]) : v;
}

}  // namespace

Kernel make_kernel(const Config& c) {
  const long long dim = c.integer("kernel", "dim");
  require(dim == 1 || dim == 2, "kernel.dim", "must be 1 or 2");
  const int n = static_cast<int>(dim);
  const std::string family = c.text("kernel", "family");
  const double alpha = c.number("kernel", "alpha");
  if (family == "fractional" || family == "anisotropic")
    require(alpha > 0.0 && alpha < 2.0, "kernel.alpha", "must lie in (0,2)");
  if (family == "fractional") return Kernel::fractional(n, alpha);
  if (family == "zero_order") {
    require(c.number("kernel", "beta") > 0.0, "kernel.beta", "must be positive");
    require(c.number("kernel", "cutoff") > 0.0, "kernel.cutoff", "must be positive");
    return Kernel::zero_order(n, c.number("kernel", "beta"), c.number("kernel", "cutoff"));
  }
  if (family == "indicator" || family == "gaussian") {
    require(c.number("kernel", "radius") > 0.0, "kernel.radius", "must be positive");
    return family == "indicator" ? Kernel::indicator(n, c.number("kernel", "radius"))
                                 : Kernel::gaussian(n, c.number("kernel", "radius"));
  }
  if (family == "anisotropic") {
    Eigen::MatrixXd m(n, n);
    if (n == 1) {
      m(0, 0) = c.number("kernel", "m11");
    } else {
      m << c.number("kernel", "m11"), c.number("kernel", "m12"), c.number("kernel", "m12"), c.number("kernel", "m22");
    }
    try {
      return Kernel::anisotropic(m, alpha);
    } catch (const Error& e) {
      throw ConfigError("kernel.m11", e.what());
    }
  }
  throw ConfigError("kernel.family", "unknown family '" + family +
                                         "' (fractional, zero_order, indicator, gaussian, anisotropic)");
}

Grid make_grid(const Config& c) {
  const int dim = static_cast<int>(c.integer("kernel", "dim"));
  require(dim == 1 || dim == 2, "kernel.dim", "must be 1 or 2");
  const std::vector<double> hw = per_axis(c.numbers("grid", "half_widths"), dim, "grid.half_widths");
  for (double w : hw) require(w > 0.0, "grid.half_widths", "must be positive");
  if (c.has_number("grid", "h")) {
    const double h = c.number("grid", "h");
    require(h > 0.0, "grid.h", "must be positive");
    try {
      return Grid::from_spacing(dim, hw, h);
    } catch (const Error& e) {
      throw ConfigError("grid.h", e.what());
    }
  }
  std::vector<Index> cells;
  for (double n : per_axis(c.numbers("grid", "cells"), dim, "grid.cells")) {
    require(n >= 2 && n == std::floor(n), "grid.cells", "must be integers >= 2");
    cells.push_back(static_cast<Index>(n));
  }
  std::vector<double> h;
  for (int a = 0; a < dim; ++a) h.push_back(2.0 * hw[a] / static_cast<double>(cells[a]));
  if (dim == 2) require(std::abs(h[0] - h[1]) <= 1e-12 * h[0], "grid.cells", "must give equal spacing on both axes");
  return {dim, hw, cells};
}

CellSet make_mask(const Config& c, const Grid& g) {
  try {
    const CellSet m = parse_region(g, c.text("mask", "region"));
    require(!m.empty(), "mask.region", "selects no cells");
    return m;
  } catch (const Error& e) {
    throw ConfigError("mask.region", e.what());
  }
}

Nonlinearity make_nonlinearity(const Config& c) {
  const std::string f = c.text("nonlinearity", "family");
  if (f == "rational_quartic") return Nonlinearity::rational_quartic();
  if (f == "integrated_sigmoid") return Nonlinearity::integrated_sigmoid();
  if (f == "zero") return Nonlinearity::zero();
  throw ConfigError("nonlinearity.family", "unknown family '" + f + "' (rational_quartic, integrated_sigmoid, zero)");
}

AscentParams make_ascent(const Config& c) {
  AscentParams p;
  p.step = c.number("ascent", "step");
  require(p.step > 0.0, "ascent.step", "must be positive");
  p.max_iter = static_cast<int>(c.integer("ascent", "max_iter"));
  require(p.max_iter >= 0, "ascent.max_iter", "must be nonnegative");
  p.tol = c.number("ascent", "tol");
  require(p.tol > 0.0, "ascent.tol", "must be positive");
  p.recenter_every = static_cast<int>(c.integer("ascent", "recenter_every"));
  require(p.recenter_every >= 0, "ascent.recenter_every", "must be nonnegative");
  p.window_cells = static_cast<Index>(c.integer("ascent", "window_cells"));
  require(p.window_cells >= 0, "ascent.window_cells", "must be nonnegative");
  p.armijo = c.number("ascent", "armijo");
  require(p.armijo > 0.0 && p.armijo < 1.0, "ascent.armijo", "must lie in (0,1)");
  require(c.integer("ascent", "starts") >= 1, "ascent.starts", "must be at least 1");
  return p;
}

}  // namespace nloc::cli
