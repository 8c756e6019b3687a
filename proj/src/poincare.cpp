#include "nloc/poincare.hpp"

#include <cmath>

namespace nloc {

Stencil<double> min_one_weights(const FormOperator<double>& op) {
  const double v = op.grid().cell_volume();
  Stencil<double> q = op.weights().J;
  q.values() = q.values().cwiseMin(v);
  q.center() = std::min(v, op.weights().center_mass);
  q.set_outside_mass(0.0);
  return q;
}

ConvolutionChain build_chain(const FormOperator<double>& op, double a) {
  if (!(a > 0.0)) throw Error("domain-error", "slab half-width must be positive");
  ConvolutionChain chain;
  chain.a = a;
  chain.cell_volume = op.grid().cell_volume();
  chain.h = op.grid().h();
  Stencil<double> q = min_one_weights(op);
  if (!(q.sum() > 0.0)) throw Error("domain-error", "q vanishes on the lattice");
  chain.iterates.push_back(q);
  chain.l1_norms.push_back(q.total());

  Stencil<double> q1 = convolve_stencils(q, q);
  chain.q1_center = q1.center() / chain.cell_volume;
  // Grow the lattice ball until some offset drops below half the peak.
  const double half = 0.5 * q1.center();
  Index radius = 0;
  const Index reach = q1.extent(0);
  for (Index r = 1; r <= reach; ++r) {
    bool ok = true;
    for (Index i = 0; i < q1.size() && ok; ++i) {
      const Multi k = q1.unravel(i);
      const double len2 = static_cast<double>(k[0] * k[0] + k[1] * k[1]);
      if (len2 <= static_cast<double>(r * r) && q1.values()(i) < half) ok = false;
    }
    if (!ok) break;
    radius = r;
  }
  chain.delta = static_cast<double>(radius) * chain.h;
  if (!(chain.delta > 0.0))
    throw Error("chain-truncation-too-small", "q_1 loses half its peak within one cell; refine the grid");
  int m = 0;
  while (std::ldexp(chain.delta, m) <= 2.0 * a) ++m;
  chain.depth = m;

  std::size_t entries = q.size();
  for (int k = 1; k <= m; ++k) {
    entries *= static_cast<std::size_t>(1) << q.dim();
    if (entries > 50'000'000 || k > 24)
      throw Error("domain-error", "convolution chain too deep for the lattice; enlarge delta or shrink a");
    if (k == 1)
      chain.iterates.push_back(std::move(q1));
    else
      chain.iterates.push_back(convolve_stencils(chain.iterates.back(), chain.iterates.back()));
    chain.l1_norms.push_back(chain.iterates.back().total());
  }
  return chain;
}

SlabConstant constant_Ca(const ConvolutionChain& chain, double a) {
  if (std::abs(a - chain.a) > 1e-14 * a) throw Error("domain-error", "chain was built for another slab");
  SlabConstant out;
  // No lattice alignment fits more than floor(2a/h) cells inside (-a, a); a
  // larger count only drops mass from C_{a,1}.
  const double cells = 2.0 * a / chain.h;
  out.slab_cells = static_cast<Index>(std::floor(cells + 1e-9));
  const Stencil<double>& qm = chain.top();
  long double mass = qm.outside_mass();
  for (Index i = 0; i < qm.size(); ++i) {
    const Multi k = qm.unravel(i);
    if (std::abs(k[0]) >= out.slab_cells) mass += qm.values()(i);
  }
  out.c_a1 = static_cast<double>(mass);
  if (!(out.c_a1 > 0.0))
    throw Error("chain-truncation-too-small", "q_m has no mass outside the doubled slab; enlarge the box");
  double prod = 1.0;
  for (int k = 0; k < chain.depth; ++k) prod *= chain.l1_norms[k];
  out.c_a = std::pow(4.0, -2.0 * chain.depth) * out.c_a1 / prod;
  return out;
}

double constant_Ca_tilde(const Kernel& kernel, double a) {
  if (!(a > 0.0)) throw Error("domain-error", "slab half-width must be positive");
  return kernel.mass_outside_slab(2.0 * a);
}

double stencil_energy(const Stencil<double>& w, const GridFunction<double>& u) {
  Stencil<double> off = w;
  off.center() = 0.0;
  const Eigen::VectorXd conv = Convolver<double>(u.grid(), off).apply(u.values());
  const double diag = off.total();
  return u.grid().cell_volume() * (diag * u.values().squaredNorm() - u.values().dot(conv));
}

IterationReport check_iteration_lemma(const Stencil<double>& q, const GridFunction<double>& u) {
  IterationReport rep;
  rep.lhs = stencil_energy(convolve_stencils(q, q), u);
  rep.rhs = 4.0 * q.total() * stencil_energy(q, u);
  return rep;
}

}  // namespace nloc
