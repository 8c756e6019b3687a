#pragma once

#include <memory>

#include "nloc/cell_set.hpp"
#include "nloc/convolution.hpp"

namespace nloc {

// Discrete quadratic form of a kernel on the box-supported functions of a grid.
//
// With cell masses J_k and T = sum_{k != 0} J_k over the whole lattice,
//   (I u)_x   = T u_x - sum_{y != x} J_{x-y} u_y,
//   E(u, v)   = h^N sum_x v_x (I u)_x
//             = h^N [ 1/2 sum_{x,y} (u_x-u_y)(v_x-v_y) J_{x-y} + sum_x u_x v_x kappa_ext(x) ],
// where kappa_ext(x) is the mass of J seen from x outside the box. E is the
// exact energy of the zero extension on the infinite lattice.
template <class Scalar = double>
class FormOperator {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Function = GridFunction<Scalar>;

  FormOperator(const Kernel& kernel, const Grid& grid)
      : FormOperator(kernel, grid, lattice_weights(kernel, grid)) {}

  FormOperator(const Kernel& kernel, const Grid& grid, LatticeWeights weights)
      : kernel_(kernel), grid_(grid), weights_(std::move(weights)) {
    if (kernel.dim() != grid.dim()) throw Error("grid-mismatch", "kernel and grid dimensions differ");
    stencil_ = weights_.J.template cast<Scalar>();
    stencil_.center() = Scalar(0);
    diagonal_ = static_cast<Scalar>(weights_.off_center_mass());
    convolver_ = std::make_shared<const Convolver<Scalar>>(grid_, stencil_);
    build_killing();
  }

  const Kernel& kernel() const noexcept { return kernel_; }
  const Grid& grid() const noexcept { return grid_; }
  const LatticeWeights& weights() const noexcept { return weights_; }
  const Stencil<Scalar>& stencil() const noexcept { return stencil_; }
  // D(x) = T, the same for every cell.
  Scalar diagonal() const noexcept { return diagonal_; }
  const Vector& killing() const noexcept { return killing_; }
  Scalar tail_uncertainty() const noexcept { return static_cast<Scalar>(weights_.tail_uncertainty); }

  // sum_{y in box} J_{x-y} v_y
  Vector convolve(const Vector& v) const { return convolver_->apply(v); }

  Vector apply(const Vector& u) const { return diagonal_ * u - convolve(u); }
  Function apply(const Function& u) const {
    require_same_grid(grid_, u.grid());
    return Function(grid_, apply(u.values()));
  }
  Vector apply_direct(const Vector& u) const {
    return diagonal_ * u - convolve_direct(grid_, stencil_, u);
  }

  Scalar energy(const Function& u, const Function& v) const {
    require_same_grid(grid_, u.grid());
    require_same_grid(grid_, v.grid());
    return static_cast<Scalar>(grid_.cell_volume()) * v.values().dot(apply(u.values()));
  }
  Scalar energy(const Function& u) const { return energy(u, u); }
  // ||u||^2 = E(u,u) + ||u||_{L^2}^2
  Scalar norm_squared(const Function& u) const { return energy(u) + u.l2_norm_squared(); }

  // Dense matrix of I over all cells, or over the cells of a mask in
  // ascending flat order.
  Matrix matrix() const { return matrix(CellSet::all(grid_)); }
  Matrix matrix(const CellSet& mask) const {
    require_same_grid(grid_, mask.grid());
    const std::vector<Index> cells = mask.indices();
    const Index m = static_cast<Index>(cells.size());
    Matrix a(m, m);
    for (Index r = 0; r < m; ++r) {
      const Multi x = grid_.unravel(cells[r]);
      for (Index c = 0; c < m; ++c) {
        const Multi y = grid_.unravel(cells[c]);
        a(r, c) = r == c ? diagonal_ : -stencil_.at({x[0] - y[0], x[1] - y[1]});
      }
    }
    return a;
  }

 private:
  void build_killing() {
    // kappa_ext(x) = tail + (stencil sum) - (stencil sum over offsets x - y, y in box),
    // the last term read from a summed-area table.
    const Index w0 = stencil_.width(0), w1 = stencil_.width(1);
    std::vector<long double> area((w0 + 1) * (w1 + 1), 0.0L);
    auto at = [&](Index r, Index c) -> long double& { return area[r * (w1 + 1) + c]; };
    for (Index r = 0; r < w0; ++r)
      for (Index c = 0; c < w1; ++c)
        at(r + 1, c + 1) = stencil_.values()(r * w1 + c) + at(r, c + 1) + at(r + 1, c) - at(r, c);
    const long double total = at(w0, w1);
    const Multi n{grid_.cells(0), grid_.dim() > 1 ? grid_.cells(1) : 1};
    const Multi k = stencil_.extent();
    killing_.resize(grid_.size());
    for (Index i = 0; i < grid_.size(); ++i) {
      const Multi x = grid_.unravel(i);
      // Offsets x - y with 0 <= y < n map to stencil rows [x - n + 1 + K, x + K].
      const Index r0 = x[0] - n[0] + 1 + k[0], r1 = x[0] + k[0] + 1;
      const Index c0 = x[1] - n[1] + 1 + k[1], c1 = x[1] + k[1] + 1;
      const long double inside = at(r1, c1) - at(r0, c1) - at(r1, c0) + at(r0, c0);
      killing_(i) = static_cast<Scalar>(static_cast<long double>(stencil_.outside_mass()) + (total - inside));
    }
  }

  Kernel kernel_;
  Grid grid_;
  LatticeWeights weights_;
  Stencil<Scalar> stencil_{1, {0, 0}};
  Scalar diagonal_ = Scalar(0);
  Vector killing_;
  std::shared_ptr<const Convolver<Scalar>> convolver_;
};

// [shift * u](y) = u(y - shift). Throws "support-leak" when the L^2 mass
// pushed out of the box exceeds leak_tolerance * ||u||_{L^2}^2.
template <class Scalar>
GridFunction<Scalar> translate(const GridFunction<Scalar>& u, const Multi& shift,
                               double leak_tolerance = 1e-14) {
  const Grid& g = u.grid();
  GridFunction<Scalar> out(g);
  Scalar leaked(0);
  for (Index i = 0; i < g.size(); ++i) {
    const Multi x = g.unravel(i);
    const Multi y{x[0] + shift[0], x[1] + shift[1]};
    if (g.contains(y))
      out(y) = u(i);
    else
      leaked += u(i) * u(i);
  }
  leaked *= static_cast<Scalar>(g.cell_volume());
  if (leaked > static_cast<Scalar>(leak_tolerance) * u.l2_norm_squared())
    throw Error("support-leak", "translation moves L2 mass " + std::to_string(static_cast<double>(leaked)) +
                                    " out of the box");
  return out;
}

struct CutoffReport {
  double tail_energy = 0.0;  // E(u psi_R, u psi_R)
  double k_sup = 0.0;        // max_x K_R(x)
  bool k_exact = false;      // false: exterior part of K_R is an upper bound
  double levy_constant = 0.0;
  bool within_bound = false;  // k_sup <= levy_constant
};

// phi_R = 1 on B_R, 0 off B_{2R}, slope 1/R in between; psi_R = 1 - phi_R.
inline double cutoff_phi(const Point& x, double radius) {
  return std::clamp(2.0 - x.norm() / radius, 0.0, 1.0);
}

template <class Scalar>
CutoffReport cutoff_energy(const FormOperator<Scalar>& op, const GridFunction<Scalar>& u, double radius) {
  if (!(radius > 0.0)) throw Error("domain-error", "cutoff radius must be positive");
  const Grid& g = op.grid();
  require_same_grid(g, u.grid());
  using Vector = typename FormOperator<Scalar>::Vector;
  Vector psi(g.size());
  for (Index i = 0; i < g.size(); ++i) psi(i) = static_cast<Scalar>(1.0 - cutoff_phi(g.center(i), radius));
  CutoffReport rep;
  GridFunction<Scalar> tail(g, u.values().cwiseProduct(psi));
  rep.tail_energy = static_cast<double>(op.energy(tail));

  const Vector ones = Vector::Ones(g.size());
  const Vector c1 = op.convolve(ones), cp = op.convolve(psi), cpp = op.convolve(psi.cwiseProduct(psi));
  double min_half = kInf;
  for (int a = 0; a < g.dim(); ++a) min_half = std::min(min_half, g.half_width(a));
  rep.k_exact = min_half >= 2.0 * radius;
  for (Index i = 0; i < g.size(); ++i) {
    const Scalar p = psi(i);
    Scalar inner = p * p * c1(i) - Scalar(2) * p * cp(i) + cpp(i);
    // Every cell off the box has psi = 1 when B_{2R} fits; otherwise bound (psi_x - psi_y)^2.
    const Scalar outer_factor = rep.k_exact ? (Scalar(1) - p) * (Scalar(1) - p)
                                            : std::max(p * p, (Scalar(1) - p) * (Scalar(1) - p));
    const Scalar k = std::max(inner, Scalar(0)) + outer_factor * op.killing()(i);
    rep.k_sup = std::max(rep.k_sup, static_cast<double>(k));
  }
  rep.levy_constant = levy_integral(op.kernel());
  rep.within_bound = rep.k_sup <= rep.levy_constant;
  return rep;
}

}  // namespace nloc
