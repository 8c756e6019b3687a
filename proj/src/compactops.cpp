#include "nloc/compactops.hpp"

#include <cmath>
#include <numbers>

#include "nloc/rearrange.hpp"

namespace nloc {

JensenWeight jensen_weight(const FormOperator<double>& op, double delta) {
  if (!(delta > 0.0)) throw Error("domain-error", "delta must be positive");
  const Grid& g = op.grid();
  const Stencil<double>& J = op.stencil();
  JensenWeight out{Stencil<double>(g.dim(), J.extent()), 0.0, delta};
  long double mass = J.outside_mass();
  for (Index i = 0; i < J.size(); ++i) {
    const Multi k = J.unravel(i);
    if (k[0] == 0 && k[1] == 0) continue;
    double far = 0.0;
    for (int a = 0; a < g.dim(); ++a) {
      const double c = (std::abs(static_cast<double>(k[a])) + 0.5) * g.h();
      far += c * c;
    }
    if (std::sqrt(far) > delta) {
      out.w.values()(i) = J.values()(i);
      mass += J.values()(i);
    }
  }
  if (!(mass > 0.0L)) throw Error("degenerate-truncation", "no lattice mass outside B_delta");
  out.mass = static_cast<double>(mass);
  out.w.values() /= out.mass;
  out.w.set_outside_mass(J.outside_mass() / out.mass);
  return out;
}

Function smooth(const Stencil<double>& w, const Function& u) {
  const double total = w.total();
  if (std::abs(total - 1.0) > 1e-10)
    throw Error("non-normalized-weight", "smoothing weight has total mass " + std::to_string(total));
  // Direct sums are exact for delta-like weights; FFT only pays off when large.
  if (static_cast<double>(u.size()) * static_cast<double>(u.size()) <= 4e6)
    return Function(u.grid(), convolve_direct(u.grid(), w, u.values()));
  return Function(u.grid(), Convolver<double>(u.grid(), w).apply(u.values()));
}

JensenReport jensen_gap(const FormOperator<double>& op, const JensenWeight& weight,
                        const TruncatedKernel& trunc, const Function& u) {
  require_same_grid(op.grid(), u.grid());
  if (trunc.base.name() != op.kernel().name())
    throw Error("kernel-mismatch", "truncated kernel differs from the operator kernel");
  JensenReport rep;
  rep.norm = std::sqrt(std::max(0.0, op.norm_squared(u)));
  rep.lhs = l2_distance(u, smooth(weight.w, u));
  rep.lattice_l1 = weight.mass;
  rep.continuum_l1 = trunc.l1_norm;
  rep.rhs = std::sqrt(2.0 / weight.mass) * rep.norm;
  rep.rhs_continuum = std::sqrt(2.0 / trunc.l1_norm) * rep.norm;
  return rep;
}

JensenReport jensen_gap(const FormOperator<double>& op, const TruncatedKernel& trunc, const Function& u) {
  return jensen_gap(op, jensen_weight(op, trunc.delta), trunc, u);
}

Function project_Pt(const Function& u, double t) {
  if (!(t >= 0.0)) throw Error("domain-error", "truncation level must be nonnegative");
  return Function(u.grid(), u.values().cwiseMax(-t).cwiseMin(t));
}

Function restrict_to(const Function& u, const CellSet& k) {
  require_same_grid(u.grid(), k.grid());
  return Function(u.grid(), u.values().cwiseProduct(k.indicator().values()));
}

namespace {

// Mass of u^2 h^N over windows of side w, indexed by lower corner.
class WindowMass {
 public:
  WindowMass(const Function& u, Index w) : g_(u.grid()) {
    n_ = {g_.cells(0), g_.dim() > 1 ? g_.cells(1) : 1};
    wx_ = {std::min(w, n_[0]), g_.dim() > 1 ? std::min(w, n_[1]) : 1};
    area_.assign((n_[0] + 1) * (n_[1] + 1), 0.0L);
    for (Index r = 0; r < n_[0]; ++r)
      for (Index c = 0; c < n_[1]; ++c) {
        const long double v = u(r * n_[1] + c);
        at(r + 1, c + 1) = v * v + at(r, c + 1) + at(r + 1, c) - at(r, c);
      }
  }
  Multi positions() const { return {n_[0] - wx_[0] + 1, n_[1] - wx_[1] + 1}; }
  double mass(const Multi& p) const {
    const Index r1 = p[0] + wx_[0], c1 = p[1] + wx_[1];
    return static_cast<double>((at(r1, c1) - at(p[0], c1) - at(r1, p[1]) + at(p[0], p[1])) *
                               g_.cell_volume());
  }
  // Lower corner of the window centered in the box.
  Multi central() const { return {(n_[0] - wx_[0]) / 2, (n_[1] - wx_[1]) / 2}; }
  // Lower corner of the window centered (as nearly as possible) on cell x.
  Multi around(const Multi& x) const {
    Multi p{0, 0};
    for (int a = 0; a < 2; ++a) p[a] = std::clamp(x[a] - (wx_[a] - 1) / 2, Index(0), n_[a] - wx_[a]);
    return p;
  }

 private:
  long double& at(Index r, Index c) { return area_[r * (n_[1] + 1) + c]; }
  long double at(Index r, Index c) const { return area_[r * (n_[1] + 1) + c]; }
  const Grid& g_;
  Multi n_{1, 1}, wx_{1, 1};
  std::vector<long double> area_;
};

double mass_above(const Function& u, double eps) {
  double m = 0.0;
  for (Index i = 0; i < u.size(); ++i)
    if (std::abs(u(i)) >= eps) m += u(i) * u(i);
  return m * u.grid().cell_volume();
}

void finish(ConcentrationReport& rep, const Function& u, const WindowMass& wm, Index window_cells,
            const Multi& corner) {
  const Multi target = wm.central();
  rep.shift = {target[0] - corner[0], target[1] - corner[1]};
  rep.window_mass = wm.mass(corner);
  rep.shifted = translate(u, rep.shift, kInf);
  rep.leaked_mass = std::max(0.0, u.l2_norm_squared() - rep.shifted.l2_norm_squared());
  rep.post_shift_mass = WindowMass(rep.shifted, window_cells).mass(target);
}

}  // namespace

ConcentrationReport concentration(const Function& u, double epsilon, Index window_cells) {
  if (!(epsilon > 0.0)) throw Error("domain-error", "epsilon must be positive");
  if (window_cells < 1) throw Error("domain-error", "window must span at least one cell");
  ConcentrationReport rep{epsilon, mass_above(u, epsilon), {0, 0}, 0.0, 0.0, 0.0, u};
  WindowMass wm(u, window_cells);
  const Multi count = wm.positions();
  Multi best = wm.central();
  double best_mass = -1.0;
  for (Index r = 0; r < count[0]; ++r)
    for (Index c = 0; c < count[1]; ++c) {
      const double m = wm.mass({r, c});
      if (m > best_mass) {
        best_mass = m;
        best = {r, c};
      }
    }
  // Nothing to recenter: keep the zero shift.
  if (!(best_mass > 0.0)) best = wm.central();
  finish(rep, u, wm, window_cells, best);
  return rep;
}

ConcentrationReport concentration_min_killing(const FormOperator<double>& op, const Function& u,
                                              double epsilon, Index window_cells) {
  if (!(epsilon > 0.0)) throw Error("domain-error", "epsilon must be positive");
  require_same_grid(op.grid(), u.grid());
  const Grid& g = u.grid();
  ConcentrationReport rep{epsilon, mass_above(u, epsilon), {0, 0}, 0.0, 0.0, 0.0, u};
  CellSet level(g);
  for (Index i = 0; i < g.size(); ++i)
    if (std::abs(u(i)) >= epsilon) level.insert(i);
  WindowMass wm(u, window_cells);
  if (level.empty()) {
    finish(rep, u, wm, window_cells, wm.central());
    return rep;
  }
  const Eigen::VectorXd kappa = killing_measures(op, level);
  Index best = -1;
  for (Index i = 0; i < g.size(); ++i)
    if (level.contains(i) && (best < 0 || kappa(i) < kappa(best))) best = i;
  finish(rep, u, wm, window_cells, wm.around(g.unravel(best)));
  return rep;
}

Function vanishing_member(const Grid& grid, double n) {
  if (!(n > 0.0)) throw Error("domain-error", "family index must be positive");
  const double half = 0.5 * std::pow(n, 1.0 / grid.dim());
  for (int a = 0; a < grid.dim(); ++a)
    if (half > grid.half_width(a) * (1.0 + 1e-12))
      throw Error("domain-error", "box too small for the vanishing family member");
  Function u(grid);
  const double fuzz = 1e-12 * grid.h();
  for (Index i = 0; i < grid.size(); ++i)
    u(i) = (grid.center(i).array().abs() < half + fuzz).all() ? 1.0 : 0.0;
  const double l2 = u.l2_norm();
  if (!(l2 > 0.0)) throw Error("domain-error", "vanishing family member has no cells");
  u *= 1.0 / l2;
  return u;
}

Function bump_member(const Grid& grid, double n) {
  if (!(n >= 1.0)) throw Error("domain-error", "family index must be at least 1");
  Point c(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) {
    const double reach = grid.half_width(a) - 1.5;
    if (!(reach > 0.0)) throw Error("domain-error", "box too small for the bump family");
    c(a) = reach * (1.0 - 1.0 / n);
  }
  Function u = Function::sample(grid, [&](const Point& x) {
    const double r = (x - c).norm();
    if (r >= 1.0) return 0.0;
    const double s = std::cos(0.5 * std::numbers::pi * r);
    return s * s;
  });
  u *= 1.0 / u.l2_norm();
  return u;
}

std::vector<double> dyadic_epsilons(int m_max) {
  std::vector<double> out;
  for (int m = 0; m <= m_max; ++m) out.push_back(std::ldexp(1.0, -m));
  return out;
}

std::vector<DichotomyRow> dichotomy_rows(const Grid& grid, const std::string& family,
                                         const std::vector<double>& ns,
                                         const std::vector<double>& epsilons, Index window_cells) {
  std::vector<DichotomyRow> rows;
  for (double n : ns) {
    Function u(grid);
    if (family == "vanishing")
      u = vanishing_member(grid, n);
    else if (family == "bump")
      u = bump_member(grid, n);
    else
      throw Error("invalid-config", "dichotomy.family must be vanishing or bump");
    for (double eps : epsilons) {
      const ConcentrationReport rep = concentration(u, eps, window_cells);
      rows.push_back({n, eps, rep.mass_above, rep.shift, rep.post_shift_mass});
    }
  }
  return rows;
}

}  // namespace nloc
