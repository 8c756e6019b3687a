#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nloc/compactops.hpp"
#include "nloc/error.hpp"
#include "nloc/rearrange.hpp"
#include "support.hpp"

namespace nloc {
namespace {

using testing::random_function;
using testing::Rng;

CellSet above(const Function& u, double t) {
  CellSet s(u.grid());
  for (Index i = 0; i < u.size(); ++i)
    if (std::abs(u(i)) > t) s.insert(i);
  return s;
}

TEST(Smooth, ZeroDeltaAndYoung) {
  Rng rng(1);
  const Grid g = Grid::cube(1, 2.0, 128);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  const JensenWeight jw = jensen_weight(op, 0.25);
  EXPECT_NEAR(jw.w.total(), 1.0, 1e-12);
  EXPECT_EQ(jw.w.center(), 0.0);
  EXPECT_EQ(smooth(jw.w, Function(g)).sup_norm(), 0.0);

  Stencil<double> delta(1, {0, 0});
  delta.center() = 1.0;
  for (int t = 0; t < 100; ++t) {
    const Function u = random_function(g, rng);
    EXPECT_EQ(smooth(delta, u).values(), u.values());
    EXPECT_LE(smooth(jw.w, u).l2_norm(), u.l2_norm() * (1.0 + 1e-12));
  }
  delta.center() = 0.5;
  try {
    smooth(delta, Function(g));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "non-normalized-weight");
  }
}

TEST(Jensen, ZeroFunction) {
  const Grid g = Grid::cube(1, 2.0, 64);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  const JensenReport r = jensen_gap(op, truncate(op.kernel(), 0.25), Function(g));
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
}

TEST(Jensen, FractionalQuarterBound) {
  Rng rng(2);
  const Grid g = Grid::cube(1, 2.0, 256);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  const TruncatedKernel trunc = truncate(op.kernel(), 0.25);
  const JensenWeight jw = jensen_weight(op, 0.25);
  EXPECT_GE(jw.mass, trunc.l1_norm);
  for (int t = 0; t < 100; ++t) {
    const Function u = random_function(g, rng);
    const JensenReport r = jensen_gap(op, jw, trunc, u);
    EXPECT_NEAR(r.rhs_continuum, 0.5 * r.norm, 1e-12 * r.norm);
    EXPECT_LE(r.lhs, r.rhs * (1.0 + 1e-10));
    EXPECT_LE(r.rhs, r.rhs_continuum);
  }
}

TEST(Jensen, BoundShrinksWithDelta) {
  Rng rng(3);
  const Grid g = Grid::cube(1, 2.0, 512);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  const Function u = random_function(g, rng);
  double prev = kInf;
  for (double delta = 1.0; delta > 4.0 * g.h(); delta *= 0.5) {
    const JensenReport r = jensen_gap(op, truncate(op.kernel(), delta), u);
    EXPECT_LT(r.rhs_continuum, prev);
    EXPECT_LE(r.lhs, r.rhs * (1.0 + 1e-10));
    prev = r.rhs_continuum;
  }
}

TEST(Jensen, CompactnessProxyOnBoundedFamily) {
  Rng rng(4);
  const Grid g = Grid::cube(2, 1.0, 24);
  const FormOperator<double> op(Kernel::fractional(2, 1.0), g);
  const CellSet k = CellSet::ball(g, Point::Zero(2), 0.6);
  std::vector<Function> family;
  for (int i = 0; i < 20; ++i) {
    const Function u = random_function(g, rng);
    family.push_back(u * (1.0 / std::sqrt(op.norm_squared(u))));
  }
  for (double delta : {0.5, 0.25, 0.125}) {
    const JensenWeight jw = jensen_weight(op, delta);
    double worst = 0.0;
    for (const Function& u : family)
      worst = std::max(worst, l2_distance(restrict_to(u, k), restrict_to(smooth(jw.w, u), k)));
    EXPECT_LE(worst, std::sqrt(2.0 / jw.mass) * (1.0 + 1e-10));
  }
}

TEST(Truncation, ClampCases) {
  Rng rng(5);
  const Grid g = Grid::cube(1, 1.0, 32);
  const Function u = random_function(g, rng);
  EXPECT_EQ(project_Pt(u, u.sup_norm()).values(), u.values());
  EXPECT_EQ(project_Pt(u, 0.0).sup_norm(), 0.0);
  const Function p = project_Pt(u, 0.3);
  EXPECT_LE(p.sup_norm(), 0.3);
}

TEST(Truncation, KillingBoundsOnSuperlevelSets) {
  Rng rng(6);
  const Grid g = Grid::cube(1, 2.0, 128);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  const RearrangementTable table(op);
  for (int s = 0; s < 100; ++s) {
    const Function u = random_function(g, rng);
    const double t = testing::uniform(rng, 0.05, 0.95) * u.sup_norm();
    const CellSet omega = above(u, t);
    const double gap = l2_distance(u, project_Pt(u, t));
    const double norm = std::sqrt(op.norm_squared(u));
    EXPECT_LE(gap, norm / std::sqrt(table.kappa_of_r(omega.measure())) * (1.0 + 1e-10));
    const Eigen::VectorXd kappa = killing_measures(op, omega);
    double inf_kappa = kInf;
    for (Index x : omega.indices()) inf_kappa = std::min(inf_kappa, kappa(x));
    EXPECT_LE(gap, norm / std::sqrt(inf_kappa) * (1.0 + 1e-10));
  }
}

TEST(Truncation, Nonexpansive) {
  Rng rng(7);
  const Grid g = Grid::cube(1, 1.0, 64);
  for (int s = 0; s < 50; ++s) {
    const Function u = random_function(g, rng), v = random_function(g, rng);
    EXPECT_LE(l2_distance(project_Pt(u, 0.4), project_Pt(v, 0.4)), l2_distance(u, v) * (1.0 + 1e-15));
  }
}

TEST(Restrict, BasicsAndDecomposition) {
  Rng rng(8);
  const Grid g = Grid::cube(1, 2.0, 128);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  const RearrangementTable table(op);
  const Function u = random_function(g, rng);
  EXPECT_EQ(restrict_to(u, CellSet::all(g)).values(), u.values());
  EXPECT_EQ(restrict_to(u, CellSet::none(g)).sup_norm(), 0.0);
  for (int s = 0; s < 50; ++s) {
    const Function v = random_function(g, rng);
    const CellSet omega = testing::random_cells(g, 0.5, rng);
    const CellSet k = omega & testing::random_cells(g, 0.5, rng);
    const Function rk = restrict_to(v, k);
    EXPECT_EQ(restrict_to(rk, k).values(), rk.values());
    EXPECT_LE(rk.l2_norm(), v.l2_norm());
    const double t = testing::uniform(rng, 0.1, 0.9) * v.sup_norm();
    const double lhs = l2_distance(restrict_to(v, omega), rk);
    const double rhs = t * std::sqrt((omega - k).measure()) +
                       std::sqrt(op.norm_squared(v) / table.kappa_of_r(above(v, t).measure()));
    EXPECT_LE(lhs, rhs * (1.0 + 1e-12));
  }
}

TEST(Concentration, ZeroAndCornerBump) {
  const Grid g = Grid::cube(2, 4.0, 64);
  const ConcentrationReport z = concentration(Function(g), 0.5, 8);
  EXPECT_EQ(z.mass_above, 0.0);
  EXPECT_EQ(z.shift, (Multi{0, 0}));

  Point c(2);
  c << 3.0, 3.0;
  const Function u = Function::sample(g, [&](const Point& x) {
    const double r2 = (x - c).squaredNorm();
    return r2 < 0.25 ? std::pow(std::cos(std::numbers::pi * std::sqrt(r2)), 2) : 0.0;
  });
  const ConcentrationReport r = concentration(u, 0.1, 8);
  EXPECT_NE(r.shift, (Multi{0, 0}));
  EXPECT_EQ(r.leaked_mass, 0.0);
  EXPECT_NEAR(r.post_shift_mass, r.window_mass, 1e-15);
  EXPECT_NEAR(r.window_mass, u.l2_norm_squared(), 1e-15);
  double cx = 0.0, cy = 0.0, m = 0.0;
  for (Index i = 0; i < g.size(); ++i) {
    const double w = r.shifted(i) * r.shifted(i);
    cx += w * g.center(i)(0);
    cy += w * g.center(i)(1);
    m += w;
  }
  EXPECT_LT(std::hypot(cx / m, cy / m), 8 * g.h());
  EXPECT_GE(r.mass_above, 0.0);
  EXPECT_LE(r.mass_above, u.l2_norm_squared());
}

TEST(Concentration, MinKillingSelectorRecenters) {
  const Grid g = Grid::cube(1, 4.0, 128);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  const Function u = Function::sample(g, [](const Point& x) { return std::exp(-8.0 * std::pow(x(0) - 2.5, 2)); });
  const ConcentrationReport r = concentration_min_killing(op, u, 0.5, 16);
  EXPECT_LT(r.shift[0], 0);
  EXPECT_GT(r.post_shift_mass, 0.5 * u.l2_norm_squared());
}

TEST(Dichotomy, VanishingAndBumpFamilies) {
  const Grid g = Grid::cube(1, 64.0, 1024);
  const std::vector<double> ns{1, 4, 16, 64, 100};
  const std::vector<double> eps{0.5, 0.25};
  const auto vanish = dichotomy_rows(g, "vanishing", ns, eps, 16);
  for (const DichotomyRow& row : vanish) {
    // n^{-1/2} >= eps keeps everything above the threshold
    const double expected = 1.0 / std::sqrt(row.n) >= row.epsilon ? 1.0 : 0.0;
    EXPECT_NEAR(row.mass_above, expected, 1e-12) << row.n << " " << row.epsilon;
  }
  EXPECT_EQ(vanish.back().mass_above, 0.0);
  for (const DichotomyRow& row : dichotomy_rows(g, "bump", ns, eps, 16)) EXPECT_GE(row.post_shift_mass, 0.5);
  EXPECT_THROW(dichotomy_rows(g, "spiral", ns, eps, 16), Error);
}

}  // namespace
}  // namespace nloc
