#include <algorithm>
#include <map>

#include "nloc/error.hpp"
#include "nloc/parallel.hpp"
#include "nloc/stencil.hpp"

namespace nloc {

LatticeWeights lattice_weights(const Kernel& kernel, const Grid& grid) {
  if (kernel.dim() != grid.dim())
    throw Error("grid-mismatch", "kernel and grid dimensions differ");
  const int n = grid.dim();
  const double h = grid.h();
  Multi extent{0, 0};
  for (int a = 0; a < n; ++a) extent[a] = grid.cells(a) - 1;
  LatticeWeights out{Stencil<double>(n, extent)};

  // Offsets sharing a value under the kernel's symmetries are computed once:
  // k ~ -k always, and sign flips plus (for square stencils) axis swaps for
  // radial kernels.
  const bool radial = kernel.radial();
  const bool swap = radial && n == 2 && extent[0] == extent[1];
  auto canonical = [&](Multi k) {
    if (radial) {
      k[0] = std::abs(k[0]);
      k[1] = std::abs(k[1]);
      if (swap && k[1] > k[0]) std::swap(k[0], k[1]);
      return k;
    }
    if (k[0] < 0 || (k[0] == 0 && k[1] < 0)) return Multi{-k[0], -k[1]};
    return k;
  };
  std::map<Multi, double> unique;
  for (Index i = 0; i < out.J.size(); ++i) {
    const Multi k = out.J.unravel(i);
    if (k[0] == 0 && k[1] == 0) continue;
    unique.emplace(canonical(k), 0.0);
  }
  std::vector<std::pair<const Multi, double>*> work;
  for (auto& entry : unique) work.push_back(&entry);
  parallel_for(static_cast<std::ptrdiff_t>(work.size()), [&](std::ptrdiff_t w) {
    const Multi& k = work[w]->first;
    Point lo(n), hi(n);
    for (int a = 0; a < n; ++a) {
      lo(a) = (static_cast<double>(k[a]) - 0.5) * h;
      hi(a) = (static_cast<double>(k[a]) + 0.5) * h;
    }
    work[w]->second = kernel.cell_mass(lo, hi);
  });
  for (Index i = 0; i < out.J.size(); ++i) {
    const Multi k = out.J.unravel(i);
    if (k[0] == 0 && k[1] == 0) continue;
    out.J.values()(i) = unique.at(canonical(k));
  }

  std::vector<double> reach(n);
  for (int a = 0; a < n; ++a) reach[a] = (static_cast<double>(extent[a]) + 0.5) * h;
  out.J.set_outside_mass(kernel.mass_outside_box(reach));
  Point lo = Point::Constant(n, -0.5 * h), hi = Point::Constant(n, 0.5 * h);
  out.center_mass = kernel.cell_mass(lo, hi);
  out.tail_uncertainty = kernel.tail_uncertainty();
  return out;
}

}  // namespace nloc
