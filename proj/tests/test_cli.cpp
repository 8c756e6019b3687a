#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "config.hpp"
#include "json.hpp"

namespace nloc::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nloc_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

TEST(Config, DefaultsAndCanonicalValues) {
  const Config c = Config::parse("[kernel]\nalpha = 5e-1\n[grid]\ncells = 128\n");
  EXPECT_EQ(c.number("kernel", "alpha"), 0.5);
  EXPECT_EQ(c.text("kernel", "family"), "fractional");
  EXPECT_EQ(c.numbers("grid", "cells"), std::vector<double>{128});
  EXPECT_FALSE(c.has_number("grid", "h"));
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
  auto field_of = [](const std::string& text) {
    try {
      Config::parse(text);
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("accepted");
  };
  EXPECT_EQ(field_of("[kernel]\nalfa = 0.5\n"), "kernel.alfa");
  EXPECT_EQ(field_of("[kernal]\nalpha = 0.5\n"), "kernal.alpha");
  EXPECT_EQ(field_of("[kernel]\nalpha = half\n"), "kernel.alpha");
  EXPECT_EQ(field_of("[eigs]\ncount = 2.5\n"), "eigs.count");
  EXPECT_EQ(field_of("[kernel]\nalpha = 0.5\nalpha = 0.6\n"), "config");
}

TEST(Config, BuildersNameTheField) {
  auto field_of = [](const std::string& text, auto build) {
    try {
      build(Config::parse(text));
    } catch (const ConfigError& e) {
      return e.field();
    }
    return std::string("accepted");
  };
  EXPECT_EQ(field_of("[grid]\nh = -0.1\n", make_grid), "grid.h");
  EXPECT_EQ(field_of("[grid]\nh = 0.3\n", make_grid), "grid.h");
  EXPECT_EQ(field_of("[grid]\nhalf_widths = 1,2,3\n", make_grid), "grid.half_widths");
  EXPECT_EQ(field_of("[kernel]\nalpha = 2\n", make_kernel), "kernel.alpha");
  EXPECT_EQ(field_of("[kernel]\nfamily = spiral\n", make_kernel), "kernel.family");
  EXPECT_EQ(field_of("[kernel]\ndim = 3\n", make_kernel), "kernel.dim");
  EXPECT_EQ(field_of("[ascent]\narmijo = 1\n", make_ascent), "ascent.armijo");
  EXPECT_EQ(field_of("[grid]\nh = 0.25\n", make_grid), "accepted");
}

TEST(Config, HashTracksSemanticFieldsOnly) {
  const Config a = Config::parse("[kernel]\nalpha = 0.5\n");
  EXPECT_EQ(a.hash("eigs"), Config::parse("; comment\n[kernel]\nalpha=5e-1\n").hash("eigs"));
  EXPECT_EQ(a.hash("eigs"), Config().hash("eigs"));
  Config threads = a;
  threads.set("run", "threads", "4");
  EXPECT_EQ(a.hash("eigs"), threads.hash("eigs"));
  EXPECT_NE(a.hash("eigs"), a.hash("poincare"));
  EXPECT_NE(a.hash("eigs"), Config::parse("[kernel]\nalpha = 0.6\n").hash("eigs"));
  EXPECT_NE(a.hash("eigs"), Config::parse("[run]\nseed = 2\n").hash("eigs"));
  EXPECT_NE(a.hash("eigs"), Config::parse("[mask]\nregion = box(-1;1)\n").hash("eigs"));
}

TEST(Run, KappaTableAtTwoIsFour) {
  const fs::path out = scratch("kappa");
  ASSERT_EQ(run("kappa-table", Config(), out), 0);
  std::istringstream csv(slurp(out / "kappa_table.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "r,d,kappa");
  bool seen = false;
  while (std::getline(csv, line)) {
    std::istringstream row(line);
    std::string r, d, kappa;
    std::getline(row, r, ',');
    std::getline(row, d, ',');
    std::getline(row, kappa, ',');
    if (std::stod(r) == 2.0) {
      seen = true;
      EXPECT_NEAR(std::stod(kappa), 4.0, 0.05);
    }
  }
  EXPECT_TRUE(seen);
  EXPECT_TRUE(fs::exists(out / "kappa_table.gp"));
  const nlohmann::json m = nlohmann::json::parse(slurp(out / "manifest.json"));
  EXPECT_EQ(m["command"], "kappa-table");
  EXPECT_EQ(m["outputs"].size(), 2u);
}

TEST(Run, VerifyAllOnIntegrableControl) {
  const fs::path out = scratch("verify");
  const Config c = Config::parse("[kernel]\nfamily = indicator\n[grid]\ncells = 64\n[verify]\nsamples = 30\n");
  ASSERT_EQ(run("verify-all", c, out), 0);
  const nlohmann::json v = nlohmann::json::parse(slurp(out / "verify.json"));
  EXPECT_TRUE(v["passed"].get<bool>());
  bool norm_equivalence = false;
  for (const auto& s : v["suites"]) {
    EXPECT_TRUE(s["passed"].get<bool>()) << s["name"];
    norm_equivalence = norm_equivalence || s["name"] == "norm-equivalence";
  }
  EXPECT_TRUE(norm_equivalence);
}

TEST(Run, RepeatedRunsAreByteIdentical) {
  const Config c = Config::parse("[grid]\nhalf_widths = 4\ncells = 64\n[ascent]\nstarts = 3\n");
  Config threaded = c;
  threaded.set("run", "threads", "3");
  const fs::path a = scratch("rep_a"), b = scratch("rep_b");
  ASSERT_EQ(run("maximize", c, a), 0);
  ASSERT_EQ(run("maximize", threaded, b), 0);
  for (const char* f : {"maximize.json", "maximizer.csv", "maximizer.bin", "history.csv"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  const Config jc = Config::parse("[jensen]\nsamples = 20\n");
  ASSERT_EQ(run("jensen", jc, a), 0);
  ASSERT_EQ(run("jensen", jc, b), 0);
  EXPECT_EQ(slurp(a / "jensen.csv"), slurp(b / "jensen.csv"));
}

TEST(Run, DichotomyFamilies) {
  const fs::path out = scratch("dichotomy");
  const Config c = Config::parse("[grid]\nhalf_widths = 64\ncells = 1024\n[dichotomy]\nn = 1,4,16,64,100\n");
  ASSERT_EQ(run("dichotomy", c, out), 0);
  std::istringstream csv(slurp(out / "dichotomy.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "n,epsilon,mass_above,shift,post_shift_mass");
  int rows = 0;
  while (std::getline(csv, line)) ++rows;
  EXPECT_EQ(rows, 5 * 11);
  try {
    run("dichotomy", Config(), scratch("dichotomy_small"));
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "grid.half_widths");
  }
}

}  // namespace
}  // namespace nloc::cli
