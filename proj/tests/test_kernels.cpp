#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nloc/error.hpp"
#include "nloc/kernel.hpp"
#include "support.hpp"

namespace nloc {
namespace {

Kernel cubic_custom() {
  Custom c;
  c.evaluator = [](const Point& z) { return std::pow(z.norm(), -3.0); };
  c.singular_exponent = 3.0;
  c.truncation_radius = 1e6;
  return Kernel(1, c);
}

Eigen::MatrixXd tilted_metric() {
  Eigen::MatrixXd m(2, 2);
  m << 2.0, 0.5, 0.5, 1.0;
  return m;
}

TEST(Levy, FractionalHalfMatchesClosedForm) {
  const LevyReport r = check_levy(Kernel::fractional(1, 0.5), 4);
  EXPECT_TRUE(r.converged);
  EXPECT_FALSE(r.a1_violated);
  EXPECT_NEAR(r.estimates.back(), 16.0 / 3.0, 1e-3 * 16.0 / 3.0);
}

TEST(Levy, IndicatorIsSecondMoment) {
  const LevyReport r = check_levy(Kernel::indicator(1, 1.0), 4);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.estimates.back(), 2.0 / 3.0, 1e-3);
}

TEST(Levy, CubicSingularityViolatesA1) {
  const LevyReport r = check_levy(cubic_custom(), 4);
  EXPECT_FALSE(r.converged);
  EXPECT_TRUE(r.a1_violated);
  EXPECT_EQ(r.diagnostic, "A1-violated");
}

TEST(Levy, TwoDimensionalFractional) {
  // 2 pi [1 / (2 - alpha) + 1 / alpha]
  const double alpha = 1.0;
  const LevyReport r = check_levy(Kernel::fractional(2, alpha), 4);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.estimates.back(), 2.0 * std::numbers::pi * (1.0 / (2.0 - alpha) + 1.0 / alpha), 1e-2);
}

TEST(NonIntegrable, FractionalNormsOnDyadicDeltas) {
  const double deltas[] = {1.0, 0.25, 0.0625};
  const NonIntegrabilityReport r = check_non_integrable(Kernel::fractional(1, 0.5), deltas);
  ASSERT_EQ(r.l1_norms.size(), 3u);
  EXPECT_NEAR(r.l1_norms[0], 4.0, 1e-10);
  EXPECT_NEAR(r.l1_norms[1], 8.0, 1e-10);
  EXPECT_NEAR(r.l1_norms[2], 16.0, 1e-10);
  EXPECT_TRUE(r.divergent);
}

TEST(NonIntegrable, IndicatorStaysBounded) {
  const double deltas[] = {1.0, 0.5, 0.25, 0.125, 0.0625};
  const NonIntegrabilityReport r = check_non_integrable(Kernel::indicator(1, 1.0), deltas);
  EXPECT_FALSE(r.divergent);
  for (double v : r.l1_norms) EXPECT_LE(v, 2.0 + 1e-12);
}

TEST(NonIntegrable, LogarithmicKernel) {
  const double deltas[] = {0.5, 0.25, 0.125, 0.0625, 1.0 / 1024};
  const NonIntegrabilityReport r = check_non_integrable(Kernel::zero_order(1, 1.0, 1.0), deltas);
  for (std::size_t i = 0; i < r.l1_norms.size(); ++i)
    EXPECT_NEAR(r.l1_norms[i], 2.0 * std::log(1.0 / deltas[i]), 1e-9);
  EXPECT_TRUE(r.divergent);
}

TEST(Truncate, FractionalL1Norm) {
  const TruncatedKernel t = truncate(Kernel::fractional(1, 0.5), 0.25);
  EXPECT_NEAR(t.l1_norm, 8.0, 1e-12);
  Point inside(1), outside(1);
  inside << 0.2;
  outside << 0.3;
  EXPECT_EQ(t(inside), 0.0);
  EXPECT_DOUBLE_EQ(t(outside), std::pow(0.3, -1.5));
  EXPECT_DOUBLE_EQ(t.weight(outside), std::pow(0.3, -1.5) / 8.0);
}

TEST(Truncate, SupportInsideBallIsDegenerate) {
  try {
    truncate(Kernel::indicator(1, 1.0), 2.0);
    FAIL() << "expected degenerate-truncation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "degenerate-truncation");
  }
}

TEST(Truncate, AnisotropicMatchesPolarOracle) {
  const double alpha = 0.8, delta = 0.5;
  const Eigen::MatrixXd m = tilted_metric();
  // int_0^{2pi} (e^T M e)^{-(2+alpha)/2} dtheta * delta^{-alpha} / alpha by the
  // periodic trapezoid rule, spectrally accurate for this smooth integrand.
  const int n = 4096;
  double angular = 0.0;
  for (int i = 0; i < n; ++i) {
    const double th = 2.0 * std::numbers::pi * i / n;
    Eigen::Vector2d e(std::cos(th), std::sin(th));
    angular += std::pow(e.dot(m * e), -(2.0 + alpha) / 2.0);
  }
  angular *= 2.0 * std::numbers::pi / n;
  const double oracle = angular * std::pow(delta, -alpha) / alpha;
  const TruncatedKernel t = truncate(Kernel::anisotropic(m, alpha), delta);
  EXPECT_NEAR(t.l1_norm, oracle, 1e-6 * oracle);
}

TEST(KernelInvariants, EvenAndNonnegativeOnRandomPoints) {
  testing::Rng rng(11);
  const std::vector<Kernel> kernels{Kernel::fractional(1, 0.5),  Kernel::fractional(2, 1.3),
                                    Kernel::zero_order(1, 1.0),  Kernel::zero_order(2, 2.0, 0.7),
                                    Kernel::indicator(2, 0.8),   Kernel::gaussian(1, 0.6),
                                    Kernel::anisotropic(tilted_metric(), 0.8)};
  for (const Kernel& k : kernels) {
    for (int s = 0; s < 200; ++s) {
      Point z(k.dim());
      for (int a = 0; a < k.dim(); ++a) z(a) = testing::uniform(rng, -3.0, 3.0);
      const double v = k(z);
      EXPECT_EQ(v, k(Point(-z))) << k.name();
      EXPECT_GE(v, 0.0) << k.name();
    }
  }
}

TEST(KernelInvariants, TruncatedMassGrowsAsDeltaShrinks) {
  for (const Kernel& k : {Kernel::fractional(1, 0.5), Kernel::fractional(2, 0.5), Kernel::zero_order(2, 2.0),
                          Kernel::gaussian(2, 1.0)}) {
    double prev = 0.0;
    for (double delta = 2.0; delta > 1e-3; delta *= 0.5) {
      const double m = k.mass_outside_ball(delta);
      EXPECT_GE(m, prev) << k.name();
      prev = m;
    }
  }
}

TEST(KernelInvariants, IntegrableTruncationBelowTotal) {
  const Kernel k = Kernel::gaussian(2, 0.7);
  const double total = k.total_mass();
  EXPECT_NEAR(total, std::numbers::pi * 0.49, 1e-12);
  for (double delta : {1.0, 0.1, 0.01}) EXPECT_LE(truncate(k, delta).l1_norm, total);
}

TEST(KernelInvariants, TailsAgreeWithBoxAndSlabMasses) {
  // For the 1D kernel a box and a slab are the same set.
  const Kernel k = Kernel::fractional(1, 0.5);
  const double hw[] = {0.3};
  EXPECT_NEAR(k.mass_outside_box(hw), k.mass_outside_slab(0.3), 1e-13);
  EXPECT_NEAR(k.mass_outside_ball(0.3), 2.0 * std::pow(0.3, -0.5) / 0.5, 1e-12);
}

TEST(KernelValidation, RejectsOutOfRangeOrder) {
  try {
    Kernel::fractional(1, 2.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "invalid-kernel");
  }
  EXPECT_THROW(Kernel::fractional(3, 1.0), Error);
  EXPECT_THROW(Kernel::indicator(1, -1.0), Error);
}

}  // namespace
}  // namespace nloc
