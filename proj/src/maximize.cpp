#include "nloc/maximize.hpp"

#include <cmath>
#include <numeric>
#include <random>

#include "nloc/compactops.hpp"
#include "nloc/parallel.hpp"
#include "nloc/spectral.hpp"

namespace nloc {

double phi(const Nonlinearity& f, const Function& u) {
  long double s = 0.0L;
  for (Index i = 0; i < u.size(); ++i) s += f(u(i));
  return static_cast<double>(s * u.grid().cell_volume());
}

double form_inner(const FormOperator<double>& op, const Function& u, const Function& v) {
  return op.energy(u, v) + l2_dot(u, v);
}

Function normalize(const FormOperator<double>& op, const Function& u) {
  const double n2 = op.norm_squared(u);
  if (!(n2 > 0.0)) throw Error("zero-function", "cannot normalize the zero function");
  return u * (1.0 / std::sqrt(n2));
}

Function riesz_gradient(const FormOperator<double>& op, const Nonlinearity& f, const Function& u,
                        double cg_tol) {
  require_same_grid(op.grid(), u.grid());
  Eigen::VectorXd rhs(u.size());
  for (Index i = 0; i < u.size(); ++i) rhs(i) = f.derivative(u(i));
  std::vector<Index> cells(static_cast<std::size_t>(u.size()));
  std::iota(cells.begin(), cells.end(), Index(0));
  return Function(u.grid(), solve_shifted(op, cells, 1.0, rhs, cg_tol));
}

namespace {

constexpr double kMonotoneSlack = 1e-12;

struct Tangent {
  Function g;
  double norm;
};

Tangent tangent_gradient(const FormOperator<double>& op, const Nonlinearity& f, const Function& u,
                         double cg_tol) {
  Function g = riesz_gradient(op, f, u, cg_tol);
  g -= form_inner(op, g, u) * u;
  const double n = std::sqrt(std::max(0.0, form_inner(op, g, g)));
  return {std::move(g), n};
}

}  // namespace

AscentState ascend(const FormOperator<double>& op, const Nonlinearity& f, const Function& u0,
                   const AscentParams& params) {
  require_same_grid(op.grid(), u0.grid());
  if (std::abs(op.norm_squared(u0) - 1.0) > 1e-8)
    throw Error("domain-error", "ascent must start on the unit sphere");
  const Grid& g = op.grid();
  const Index window = params.window_cells > 0 ? params.window_cells : std::max<Index>(1, g.cells(0) / 8);
  AscentState st(u0);
  st.phi = phi(f, st.u);
  st.step = params.step;
  st.history.push_back(st.phi);
  // Shifts that cut off a tail raise the norm of the remainder, so a shift is
  // kept only when Phi survives it; early iterates are compact and shift freely.
  auto recenter = [&] {
    const ConcentrationReport rep = concentration(st.u, 1.0, window);
    if (rep.shift == Multi{0, 0} || !(rep.shifted.l2_norm_squared() > 0.0)) return;
    Function moved = normalize(op, rep.shifted);
    const double pm = phi(f, moved);
    if (pm < st.phi - kMonotoneSlack) return;
    st.u = std::move(moved);
    st.phi = pm;
    st.shifts.push_back(rep.shift);
    st.history.back() = pm;
  };
  if (params.recenter_every > 0) recenter();
  for (;;) {
    Tangent t = tangent_gradient(op, f, st.u, params.cg_tol);
    st.grad_norm = t.norm;
    if (t.norm < params.tol) {
      st.converged = true;
      st.status = "converged";
      return st;
    }
    if (st.iterations >= params.max_iter) {
      st.status = "max-iter";
      return st;
    }
    const double slope = t.norm * t.norm;
    double s = st.step;
    for (;;) {
      Function cand = normalize(op, st.u + s * t.g);
      const double pc = phi(f, cand);
      if (pc >= st.phi + params.armijo * s * slope) {
        st.u = std::move(cand);
        st.phi = pc;
        st.step = std::min(2.0 * s, params.max_step);
        break;
      }
      s *= 0.5;
      if (s < params.min_step) {
        st.status = "stalled";
        st.step = s;
        throw StalledError("step fell below " + std::to_string(params.min_step) + " after " +
                               std::to_string(st.iterations) + " iterations",
                           st);
      }
    }
    ++st.iterations;
    st.history.push_back(st.phi);

    if (params.recenter_every > 0 && st.iterations % params.recenter_every == 0) recenter();
  }
}

std::vector<Function> default_seeds(const FormOperator<double>& op, std::uint64_t seed) {
  const Grid& g = op.grid();
  const int n = g.dim();
  double reach = kInf;
  for (int a = 0; a < n; ++a) reach = std::min(reach, g.half_width(a));
  const double width = std::min(1.0, 0.25 * reach);
  auto bump = [&](const Point& c, double w) {
    return Function::sample(g, [&](const Point& x) { return std::exp(-(x - c).squaredNorm() / (w * w)); });
  };
  const Point ones = Point::Ones(n);
  std::vector<Function> seeds;
  seeds.push_back(bump(Point::Zero(n), width));
  seeds.push_back(bump(0.3 * reach * ones, width));
  seeds.push_back(bump(-0.25 * reach * ones, width) + 0.6 * bump(0.25 * reach * ones, width));
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int signed_sum = 0; signed_sum < 2; ++signed_sum) {
    Function u(g);
    for (int b = 0; b < 3; ++b) {
      Point c(n);
      for (int a = 0; a < n; ++a) c(a) = (unit(rng) - 0.5) * reach;
      const double w = width * (0.5 + unit(rng));
      double amp = 0.5 + 0.5 * unit(rng);
      if (signed_sum && unit(rng) < 0.5) amp = -amp;
      u += amp * bump(c, w);
    }
    seeds.push_back(std::move(u));
  }
  for (auto& s : seeds) s = normalize(op, s);
  return seeds;
}

MultistartResult multistart(const FormOperator<double>& op, const Nonlinearity& f, const AscentParams& params,
                            std::uint64_t seed, int starts) {
  std::vector<Function> seeds = default_seeds(op, seed);
  if (starts < 1) throw Error("domain-error", "multistart needs at least one start");
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Extra starts beyond the five defaults are further random bump sums.
  while (static_cast<int>(seeds.size()) < starts) {
    const Grid& g = op.grid();
    Point c(g.dim());
    for (int a = 0; a < g.dim(); ++a) c(a) = (unit(rng) - 0.5) * g.half_width(a);
    seeds.push_back(normalize(op, Function::sample(g, [&](const Point& x) {
                                return std::exp(-(x - c).squaredNorm());
                              })));
  }
  seeds.resize(static_cast<std::size_t>(starts), seeds.front());
  MultistartResult out;
  out.runs.resize(seeds.size(), AscentState(seeds.front()));
  parallel_for(static_cast<std::ptrdiff_t>(seeds.size()), [&](std::ptrdiff_t i) {
    try {
      out.runs[i] = ascend(op, f, seeds[i], params);
    } catch (const StalledError& e) {
      out.runs[i] = e.state();
    }
  });
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    if (out.runs[i].phi > out.runs[out.best].phi) out.best = i;
    lo = std::min(lo, out.runs[i].phi);
    hi = std::max(hi, out.runs[i].phi);
  }
  out.spread = hi - lo;
  return out;
}

ScalingAudit check_scaling_lemma(const FormOperator<double>& op, const Nonlinearity& f, double m_hat,
                                 const Function& w, double tol) {
  ScalingAudit a;
  a.phi_w = phi(f, w);
  a.bound = m_hat * op.norm_squared(w);
  a.violated = a.phi_w > a.bound + tol;
  return a;
}

GradientCheck check_gradient(const FormOperator<double>& op, const Nonlinearity& f, const Function& u,
                             const Function& v, double step) {
  GradientCheck c;
  c.analytic = form_inner(op, riesz_gradient(op, f, u), v);
  c.finite_difference = (phi(f, u + step * v) - phi(f, u - step * v)) / (2.0 * step);
  const double scale = std::max(std::abs(c.finite_difference), 1e-300);
  c.relative_error = std::abs(c.analytic - c.finite_difference) / scale;
  return c;
}

}  // namespace nloc
