#include <gtest/gtest.h>

#include <cmath>

#include "nloc/error.hpp"
#include "nloc/poincare.hpp"
#include "nloc/spectral.hpp"
#include "support.hpp"

namespace nloc {
namespace {

using testing::Rng;

TEST(Chain, IndicatorPeakAndNorms) {
  const Grid g = Grid::cube(1, 2.0, 128);
  const FormOperator<double> op(Kernel::indicator(1, 1.0), g);
  const ConvolutionChain c = build_chain(op, 0.5);
  // q_1(0) = int q^2 = 2
  EXPECT_NEAR(c.q1_center, 2.0, 2.0 * g.h());
  ASSERT_GE(c.iterates.size(), 2u);
  const double q1 = c.l1_norms[0];
  for (std::size_t k = 1; k < c.l1_norms.size(); ++k)
    EXPECT_NEAR(c.l1_norms[k], std::pow(q1, std::ldexp(1.0, static_cast<int>(k))), 1e-10 * c.l1_norms[k]);
  for (const Stencil<double>& q : c.iterates) EXPECT_TRUE(q.symmetric(1e-14));
}

TEST(Chain, DepthIsMinimal) {
  const Grid g = Grid::cube(1, 2.0, 128);
  for (const Kernel& k : {Kernel::fractional(1, 0.5), Kernel::indicator(1, 0.3), Kernel::gaussian(1, 0.2)}) {
    const FormOperator<double> op(k, g);
    for (double a : {0.4, 0.25, 0.8}) {
      const ConvolutionChain c = build_chain(op, a);
      EXPECT_GT(std::ldexp(c.delta, c.depth), 2.0 * a) << k.name();
      if (c.depth > 0) {
        EXPECT_LE(std::ldexp(c.delta, c.depth - 1), 2.0 * a) << k.name();
      }
      EXPECT_EQ(static_cast<int>(c.iterates.size()), c.depth + 1);
    }
  }
}

TEST(Chain, VanishingKernelIsRejected) {
  const Grid g = Grid::cube(1, 0.25, 16);
  // Support far outside the box: every lattice weight is zero.
  Custom c;
  c.evaluator = [](const Point& z) { return z.norm() > 5.0 && z.norm() < 6.0 ? 1.0 : 0.0; };
  c.integrable = true;
  c.truncation_radius = 0.5;
  const FormOperator<double> op(Kernel(1, c), g);
  EXPECT_THROW(build_chain(op, 0.1), Error);
}

TEST(SlabConstant, IndicatorClosedForms) {
  const Grid g = Grid::cube(1, 2.0, 128);
  const Kernel k = Kernel::indicator(1, 1.0);
  const FormOperator<double> op(k, g);
  const ConvolutionChain c = build_chain(op, 0.25);
  ASSERT_EQ(c.depth, 0);
  const SlabConstant s = constant_Ca(c, 0.25);
  // int_{|z_1| > 1/2} 1_{B_1} = 1, with one straddling cell per side
  EXPECT_NEAR(s.c_a1, 1.0, 2.0 * g.h());
  EXPECT_EQ(s.c_a, s.c_a1);
  EXPECT_NEAR(constant_Ca_tilde(k, 0.25), 1.0, 1e-14);
  EXPECT_EQ(constant_Ca_tilde(k, 0.6), 0.0);
  EXPECT_THROW(constant_Ca(c, 0.3), Error);
}

TEST(SlabConstant, FractionalTildeDiverges) {
  const Kernel k = Kernel::fractional(1, 0.5);
  double prev = 0.0;
  for (double a : {0.5, 0.125, 0.03125}) {
    const double c = constant_Ca_tilde(k, a);
    EXPECT_NEAR(c, 2.0 * std::pow(2.0 * a, -0.5) / 0.5, 1e-12 * c);
    EXPECT_GT(c, prev);
    prev = c;
  }
}

TEST(IterationLemma, SingleCellClosedForm) {
  const Grid g = Grid::cube(1, 2.0, 64);
  const FormOperator<double> op(Kernel::fractional(1, 0.5), g);
  const Stencil<double> q = min_one_weights(op);
  Function e(g);
  e(20) = 1.0;
  const Stencil<double> qq = convolve_stencils(q, q);
  const IterationReport r = check_iteration_lemma(q, e);
  EXPECT_NEAR(r.lhs, g.cell_volume() * (qq.total() - qq.center()), 1e-12 * r.lhs);
  EXPECT_NEAR(r.rhs, 4.0 * q.total() * g.cell_volume() * (q.total() - q.center()), 1e-12 * r.rhs);
  EXPECT_LE(r.lhs, r.rhs);
  const IterationReport z = check_iteration_lemma(q, Function(g));
  EXPECT_EQ(z.lhs, 0.0);
  EXPECT_EQ(z.rhs, 0.0);
}

TEST(IterationLemma, RandomFunctions) {
  Rng rng(31);
  const Grid g = Grid::cube(1, 2.0, 128);
  for (const Kernel& k : {Kernel::indicator(1, 1.0), Kernel::fractional(1, 1.0), Kernel::zero_order(1, 1.0)}) {
    const FormOperator<double> op(k, g);
    const Stencil<double> q = min_one_weights(op);
    for (int t = 0; t < 100; ++t) {
      const IterationReport r = check_iteration_lemma(q, testing::random_function(g, rng));
      EXPECT_LE(r.lhs, r.rhs * (1.0 + 1e-10)) << k.name();
    }
  }
}

TEST(Poincare, ConstantsBoundEnergyAndLambdaOne) {
  Rng rng(41);
  const Grid g = Grid::cube(1, 2.0, 256);
  for (const Kernel& k : {Kernel::fractional(1, 0.5), Kernel::fractional(1, 1.0), Kernel::zero_order(1, 1.0)}) {
    const FormOperator<double> op(k, g);
    // Zero-order kernels with cutoff 1 have no mass beyond 2a = 1.
    double prev_tilde = -1.0;
    for (double a : {0.5, 0.25, 0.125}) {
      const SlabConstant s = constant_Ca(build_chain(op, a), a);
      const double tilde = constant_Ca_tilde(k, a);
      EXPECT_GT(tilde, prev_tilde);
      prev_tilde = tilde;
      const double bound = std::max(s.c_a, tilde);
      const CellSet slab = CellSet::slab(g, a);
      for (int t = 0; t < 20; ++t) {
        const Function u = testing::random_on(slab, rng);
        EXPECT_GE(op.energy(u), bound * u.l2_norm_squared() * (1.0 - 1e-12)) << k.name() << " a=" << a;
      }
      EXPECT_GE(eigensolve(op, slab, 1).eigenvalues[0], bound * (1.0 - 1e-12));
    }
  }
}

TEST(Poincare, ChainConstantBelowLambdaOnRandomSetups) {
  Rng rng(43);
  for (int s = 0; s < 20; ++s) {
    const int family = s % 3;
    const Kernel k = family == 0   ? Kernel::fractional(1, testing::uniform(rng, 0.2, 1.8))
                     : family == 1 ? Kernel::zero_order(1, testing::uniform(rng, 0.2, 1.0), 1.0)
                                   : Kernel::gaussian(1, testing::uniform(rng, 0.3, 1.0));
    const Grid g = Grid::cube(1, 2.0, 64 + 32 * (s % 4));
    const double a = testing::uniform(rng, 0.1, 0.6);
    const FormOperator<double> op(k, g);
    const SlabConstant c = constant_Ca(build_chain(op, a), a);
    EXPECT_GT(c.c_a, 0.0);
    EXPECT_LE(c.c_a, eigensolve(op, CellSet::slab(g, a), 1).eigenvalues[0]) << k.name();
  }
}

TEST(Poincare, TwoDimensionalSlab) {
  Rng rng(47);
  const Grid g = Grid::cube(2, 1.0, 24);
  const FormOperator<double> op(Kernel::fractional(2, 1.0), g);
  const double a = 0.25;
  const SlabConstant s = constant_Ca(build_chain(op, a), a);
  const double bound = std::max(s.c_a, constant_Ca_tilde(op.kernel(), a));
  const CellSet slab = CellSet::slab(g, a);
  for (int t = 0; t < 20; ++t) {
    const Function u = testing::random_on(slab, rng);
    EXPECT_GE(op.energy(u), bound * u.l2_norm_squared() * (1.0 - 1e-12));
  }
}

}  // namespace
}  // namespace nloc
