#include <gtest/gtest.h>

#include <cmath>

#include "nloc/compactops.hpp"
#include "nloc/error.hpp"
#include "nloc/maximize.hpp"
#include "support.hpp"

namespace nloc {
namespace {

using testing::Rng;

TEST(Nonlinearity, BuiltInFamiliesPassTheAudit) {
  for (const Nonlinearity& f : {Nonlinearity::rational_quartic(), Nonlinearity::integrated_sigmoid()}) {
    const NonlinearityAudit a = audit(f);
    EXPECT_TRUE(a.vanishes_at_zero) << f.name();
    EXPECT_TRUE(a.nonnegative) << f.name();
    EXPECT_TRUE(a.quadratic_bound) << f.name();
    EXPECT_TRUE(a.ratio_monotone) << f.name();
    double prev = kInf;
    for (double eps = 1.0; eps > 1e-6; eps *= 0.5) {
      const double c = f.c_epsilon(eps);
      EXPECT_LT(c, prev);
      prev = c;
    }
    EXPECT_LT(prev, 1e-10);
  }
}

TEST(Nonlinearity, ClosedFormsAndDerivatives) {
  const Nonlinearity q = Nonlinearity::rational_quartic(), s = Nonlinearity::integrated_sigmoid();
  EXPECT_DOUBLE_EQ(q(2.0), 16.0 / 5.0);
  EXPECT_DOUBLE_EQ(s.derivative(2.0), 8.0 / 5.0);
  EXPECT_NEAR(s(3.0), 0.5 * (9.0 - std::log(10.0)), 1e-15);
  // Series branch and closed form agree where they meet.
  const double t = std::sqrt(1e-3);
  EXPECT_NEAR(s(t * (1 - 1e-9)), 0.5 * (t * t - std::log1p(t * t)), 1e-15);
  for (double x : {-1.7, -0.2, 0.05, 0.9, 4.0}) {
    const double step = 1e-6;
    EXPECT_NEAR(q.derivative(x), (q(x + step) - q(x - step)) / (2 * step), 1e-7);
    EXPECT_NEAR(s.derivative(x), (s(x + step) - s(x - step)) / (2 * step), 1e-7);
  }
  const Nonlinearity c = Nonlinearity::custom([](double x) { return x * x * x * x; }, 1.0);
  EXPECT_NEAR(c.derivative(0.5), 0.5, 1e-8);
  EXPECT_FALSE(audit(c).quadratic_bound);
}

TEST(Phi, ZeroSingleCellAndBound) {
  Rng rng(2);
  const Grid g = Grid::cube(1, 2.0, 64);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  const Nonlinearity f = Nonlinearity::rational_quartic();
  EXPECT_EQ(phi(f, Function(g)), 0.0);
  Function e(g);
  e(10) = 1.5;
  EXPECT_NEAR(phi(f, e), g.cell_volume() * std::pow(1.5, 4) / (1 + 1.5 * 1.5), 1e-16);
  for (int t = 0; t < 50; ++t) {
    const Function u = normalize(op, testing::random_function(g, rng));
    const double p = phi(f, u);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, f.c_infinity() * u.l2_norm_squared());
    EXPECT_LE(p, f.c_infinity());
  }
}

TEST(Gradient, MatchesCentralDifferences) {
  Rng rng(3);
  const Grid g = Grid::cube(1, 4.0, 128);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  for (const Nonlinearity& f : {Nonlinearity::rational_quartic(), Nonlinearity::integrated_sigmoid()}) {
    for (int base = 0; base < 2; ++base) {
      const Function u = 3.0 * normalize(op, testing::random_function(g, rng));
      for (int d = 0; d < 5; ++d) {
        const GradientCheck c = check_gradient(op, f, u, testing::random_function(g, rng));
        EXPECT_LE(c.relative_error, 1e-5) << f.name();
      }
    }
  }
}

TEST(Ascent, ZeroNonlinearityStopsImmediately) {
  const Grid g = Grid::cube(1, 4.0, 64);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  const AscentState s = ascend(op, Nonlinearity::zero(), default_seeds(op, 1).front());
  EXPECT_TRUE(s.converged);
  EXPECT_EQ(s.iterations, 0);
  EXPECT_EQ(s.phi, 0.0);
}

TEST(Ascent, RequiresUnitStart) {
  const Grid g = Grid::cube(1, 4.0, 64);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  const Function u = 2.0 * default_seeds(op, 1).front();
  EXPECT_THROW(ascend(op, Nonlinearity::rational_quartic(), u), Error);
}

class SmallAscent : public ::testing::Test {
 protected:
  Grid grid = Grid::cube(1, 4.0, 128);
  FormOperator<double> op{Kernel::fractional(1, 0.5), grid};
  Nonlinearity f = Nonlinearity::rational_quartic();
};

TEST_F(SmallAscent, MonotoneUnitNormAndConverged) {
  for (const Function& seed : default_seeds(op, 5)) {
    EXPECT_NEAR(op.norm_squared(seed), 1.0, 1e-12);
    const AscentState s = ascend(op, f, seed);
    EXPECT_TRUE(s.converged) << s.status;
    EXPECT_LT(s.grad_norm, 1e-6);
    EXPECT_NEAR(op.norm_squared(s.u), 1.0, 1e-12);
    EXPECT_EQ(s.history.size(), static_cast<std::size_t>(s.iterations) + 1);
    for (std::size_t k = 1; k < s.history.size(); ++k) EXPECT_GE(s.history[k], s.history[k - 1] - 1e-12);
    EXPECT_GT(s.phi, 0.0);
    EXPECT_EQ(s.phi, s.history.back());
  }
}

TEST_F(SmallAscent, MultistartScalingAndVanishingExclusion) {
  const MultistartResult m = multistart(op, f, {}, 9);
  ASSERT_EQ(m.runs.size(), 5u);
  const double best = m.m_hat();
  for (const AscentState& r : m.runs) EXPECT_LE(r.phi, best);
  EXPECT_LE(m.spread, 5e-3 * best);

  const Function& u = m.runs[m.best].u;
  EXPECT_LE(check_scaling_lemma(op, f, best, Function(grid)).phi_w, 0.0);
  const ScalingAudit half = check_scaling_lemma(op, f, best, 0.5 * u);
  EXPECT_FALSE(half.violated);
  EXPECT_LE(half.phi_w, best / 4 + 1e-6);

  // The maximizer keeps mass above some dyadic threshold.
  double kept = 0.0;
  for (double eps : dyadic_epsilons()) kept = std::max(kept, concentration(u, eps, 16).mass_above);
  EXPECT_GT(kept, 0.1 * u.l2_norm_squared());
}

TEST_F(SmallAscent, DeterministicForFixedSeed) {
  const MultistartResult a = multistart(op, f, {}, 4), b = multistart(op, f, {}, 4);
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    EXPECT_EQ(a.runs[i].phi, b.runs[i].phi);
    EXPECT_EQ(a.runs[i].u.values(), b.runs[i].u.values());
  }
}

}  // namespace
}  // namespace nloc
