#include "nloc/kernel.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nloc/error.hpp"
#include "nloc/quadrature.hpp"

namespace nloc {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string num(double x) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc{} ? std::string(buf, end) : std::string("nan");
}

// Unit-sphere surface measure in dimension 1 and 2.
double sphere_measure(int dim) { return dim == 1 ? 2.0 : 2.0 * std::numbers::pi; }

// a^p * (b/a)^p - a^p over p, evaluated without cancellation for b close to a.
double power_difference(double a, double b, double p) {
  const double lr = std::log1p((b - a) / a);
  if (p == 0.0) return lr;
  return std::pow(a, p) * std::expm1(p * lr) / p;
}

Point make_point(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

}  // namespace

Kernel::Kernel(int dim, KernelParams params) : dim_(dim), params_(std::move(params)) {
  if (dim_ < 1 || dim_ > kMaxDim)
    throw Error("invalid-kernel", "dimension must be 1 or 2, got " + std::to_string(dim_));
  std::visit(
      Overloaded{
          [](const Fractional& f) {
            if (!(f.alpha > 0.0 && f.alpha < 2.0))
              throw Error("invalid-kernel", "fractional alpha must lie in (0,2)");
          },
          [](const ZeroOrder& z) {
            if (!(z.beta > 0.0)) throw Error("invalid-kernel", "zero-order beta must be positive");
            if (!(z.cutoff > 0.0))
              throw Error("invalid-kernel", "zero-order cutoff must be positive");
          },
          [this](const Anisotropic& a) {
            if (!(a.alpha > 0.0 && a.alpha < 2.0))
              throw Error("invalid-kernel", "anisotropic alpha must lie in (0,2)");
            if (a.metric.rows() != dim_ || a.metric.cols() != dim_)
              throw Error("invalid-kernel", "anisotropic metric must be N x N");
            if (!a.metric.isApprox(a.metric.transpose(), 1e-14))
              throw Error("invalid-kernel", "anisotropic metric must be symmetric");
            Eigen::LLT<Eigen::MatrixXd> llt(a.metric);
            if (llt.info() != Eigen::Success)
              throw Error("invalid-kernel", "anisotropic metric must be positive definite");
          },
          [](const Integrable& i) {
            if (!(i.radius > 0.0)) throw Error("invalid-kernel", "profile radius must be positive");
          },
          [](const Custom& c) {
            if (!c.evaluator) throw Error("invalid-kernel", "custom kernel needs an evaluator");
            if (!(c.truncation_radius > 0.0))
              throw Error("invalid-kernel", "custom truncation radius must be positive");
            if (!(c.tail_bound >= 0.0))
              throw Error("invalid-kernel", "custom tail bound must be nonnegative");
          }},
      params_);
}

KernelFamily Kernel::family() const noexcept {
  return static_cast<KernelFamily>(params_.index());
}

std::string Kernel::name() const {
  const std::string n = "N=" + std::to_string(dim_);
  return std::visit(
      Overloaded{[&](const Fractional& f) { return "fractional(" + n + ",alpha=" + num(f.alpha) + ")"; },
                 [&](const ZeroOrder& z) {
                   return "zero-order(" + n + ",beta=" + num(z.beta) + ",cutoff=" + num(z.cutoff) + ")";
                 },
                 [&](const Anisotropic& a) {
                   std::string m;
                   for (Eigen::Index i = 0; i < a.metric.size(); ++i)
                     m += (i ? ";" : "") + num(a.metric.data()[i]);
                   return "anisotropic(" + n + ",alpha=" + num(a.alpha) + ",metric=" + m + ")";
                 },
                 [&](const Integrable& i) {
                   return std::string(i.profile == Profile::indicator ? "indicator(" : "gaussian(") +
                          n + ",radius=" + num(i.radius) + ")";
                 },
                 [&](const Custom& c) { return c.label + "(" + n + ")"; }},
      params_);
}

double Kernel::radial_value(double rho) const {
  return std::visit(Overloaded{[&](const Fractional& f) { return std::pow(rho, -dim_ - f.alpha); },
                               [&](const ZeroOrder& z) {
                                 return rho < z.cutoff ? std::pow(rho, -z.beta) : 0.0;
                               },
                               [&](const Integrable& i) {
                                 if (i.profile == Profile::indicator) return rho < i.radius ? 1.0 : 0.0;
                                 const double s = rho / i.radius;
                                 return std::exp(-s * s);
                               },
                               [](const auto&) -> double {
                                 throw Error("internal", "radial_value on a non-radial kernel");
                               }},
                    params_);
}

double Kernel::operator()(const Point& z) const {
  return std::visit(Overloaded{[&](const Anisotropic& a) {
                                 const double q = z.dot(a.metric * z);
                                 return std::pow(q, -0.5 * (dim_ + a.alpha));
                               },
                               [&](const Custom& c) { return c.evaluator(z); },
                               [&](const auto&) { return radial_value(z.norm()); }},
                    params_);
}

double Kernel::singular_exponent() const {
  return std::visit(Overloaded{[&](const Fractional& f) { return dim_ + f.alpha; },
                               [](const ZeroOrder& z) { return z.beta; },
                               [&](const Anisotropic& a) { return dim_ + a.alpha; },
                               [](const Integrable&) { return 0.0; },
                               [](const Custom& c) { return c.singular_exponent; }},
                    params_);
}

bool Kernel::integrable() const {
  return std::visit(Overloaded{[](const Fractional&) { return false; },
                               [&](const ZeroOrder& z) { return z.beta < dim_; },
                               [](const Anisotropic&) { return false; },
                               [](const Integrable&) { return true; },
                               [](const Custom& c) { return c.integrable; }},
                    params_);
}

bool Kernel::radial() const {
  const auto f = family();
  return f != KernelFamily::anisotropic && f != KernelFamily::custom;
}

double Kernel::support_radius() const {
  return std::visit(Overloaded{[](const ZeroOrder& z) { return z.cutoff; },
                               [](const Integrable& i) {
                                 return i.profile == Profile::indicator ? i.radius : kInf;
                               },
                               [](const Custom& c) { return c.truncation_radius; },
                               [](const auto&) { return kInf; }},
                    params_);
}

double Kernel::tail_uncertainty() const {
  if (const auto* c = std::get_if<Custom>(&params_)) return c->tail_bound;
  return 0.0;
}

double Kernel::direction_tail(double r, const Point& dir) const {
  const int n = dim_;
  return std::visit(
      Overloaded{
          [&](const Fractional& f) { return r <= 0.0 ? kInf : std::pow(r, -f.alpha) / f.alpha; },
          [&](const Anisotropic& a) {
            if (r <= 0.0) return kInf;
            const double q = dir.dot(a.metric * dir);
            return std::pow(q, -0.5 * (n + a.alpha)) * std::pow(r, -a.alpha) / a.alpha;
          },
          [&](const ZeroOrder& z) {
            if (r >= z.cutoff) return 0.0;
            const double p = n - z.beta;
            if (r <= 0.0) return p > 0.0 ? std::pow(z.cutoff, p) / p : kInf;
            return power_difference(r, z.cutoff, p);
          },
          [&](const Integrable& i) {
            const double s = i.radius;
            if (i.profile == Profile::indicator)
              return r >= s ? 0.0 : (std::pow(s, n) - std::pow(std::max(r, 0.0), n)) / n;
            if (n == 1) return 0.5 * s * std::sqrt(std::numbers::pi) * std::erfc(r / s);
            return 0.5 * s * s * std::exp(-(r / s) * (r / s));
          },
          [&](const Custom& c) {
            const double big = c.truncation_radius;
            if (r >= big) return 0.0;
            if (r <= 0.0 && !c.integrable) return kInf;
            auto f = [&](double rho) { return c.evaluator(rho * dir) * std::pow(rho, n - 1); };
            std::vector<double> breaks;
            for (double b = 0.5 * big; b > std::max(r, 1e-300) && breaks.size() < 200; b *= 0.5)
              breaks.push_back(b);
            return quad::gauss_kronrod(f, std::max(r, 0.0), big, breaks).value;
          }},
      params_);
}

double Kernel::radial_shell_1d(double a, double b) const {
  // int_a^b j(z) dz for 0 <= a < b in one dimension.
  if (!(b > a)) return 0.0;
  return std::visit(
      Overloaded{
          [&](const Fractional& f) {
            return a <= 0.0 ? kInf : std::pow(a, -f.alpha) * -std::expm1(-f.alpha * std::log1p((b - a) / a)) / f.alpha;
          },
          [&](const Anisotropic& m) {
            const double scale = std::pow(m.metric(0, 0), -0.5 * (1.0 + m.alpha));
            return a <= 0.0 ? kInf
                            : scale * std::pow(a, -m.alpha) * -std::expm1(-m.alpha * std::log1p((b - a) / a)) / m.alpha;
          },
          [&](const ZeroOrder& z) {
            if (a >= z.cutoff) return 0.0;
            const double top = std::min(b, z.cutoff);
            const double p = 1.0 - z.beta;
            if (a <= 0.0) return p > 0.0 ? std::pow(top, p) / p : kInf;
            return power_difference(a, top, p);
          },
          [&](const Integrable& i) {
            if (i.profile == Profile::indicator) return std::max(0.0, std::min(b, i.radius) - a);
            const double s = i.radius;
            const double c = 0.5 * s * std::sqrt(std::numbers::pi);
            if (a / s > 1.0) return c * (std::erfc(a / s) - std::erfc(b / s));
            return c * (std::erf(b / s) - std::erf(a / s));
          },
          [&](const Custom& c) {
            const double top = std::min(b, c.truncation_radius);
            if (a >= top) return 0.0;
            if (a <= 0.0 && !c.integrable) return kInf;
            auto f = [&](double x) {
              Point p(1);
              p << x;
              return c.evaluator(p);
            };
            std::vector<double> breaks;
            if (a <= 0.0)
              for (double s = 0.5 * top; s > 1e-200 && breaks.size() < 200; s *= 0.5) breaks.push_back(s);
            return quad::gauss_kronrod(f, a, top, breaks).value;
          }},
      params_);
}

double Kernel::angular_integral(const std::function<double(const Point&)>& f,
                                std::vector<double> breaks) const {
  if (dim_ == 1) {
    Point plus(1), minus(1);
    plus << 1.0;
    minus << -1.0;
    return f(plus) + f(minus);
  }
  const double pi = std::numbers::pi;
  for (double b : {0.5 * pi, pi, 1.5 * pi}) breaks.push_back(b);
  auto g = [&](double theta) { return f(make_point(std::cos(theta), std::sin(theta))); };
  quad::Options opt;
  opt.rel_tol = 1e-13;
  return quad::gauss_kronrod(g, 0.0, 2.0 * pi, breaks, opt).value;
}

double Kernel::mass_outside_ball(double r) const {
  if (radial()) {
    Point e = Point::Zero(dim_);
    e(0) = 1.0;
    return sphere_measure(dim_) * direction_tail(r, e);
  }
  return angular_integral([&](const Point& d) { return direction_tail(r, d); }, {});
}

double Kernel::mass_outside_box(std::span<const double> hw) const {
  if (static_cast<int>(hw.size()) != dim_)
    throw Error("domain-error", "box half-widths must match the kernel dimension");
  if (dim_ == 1)
    return angular_integral([&](const Point& d) { return direction_tail(hw[0], d); }, {});
  const double x = hw[0], y = hw[1];
  auto boundary = [&](const Point& d) {
    const double c = std::abs(d(0)), s = std::abs(d(1));
    const double rx = c > 0.0 ? x / c : kInf;
    const double ry = s > 0.0 ? y / s : kInf;
    return std::min(rx, ry);
  };
  const double pi = std::numbers::pi;
  const double corner = std::atan2(y, x);
  std::vector<double> breaks{corner, pi - corner, pi + corner, 2.0 * pi - corner};
  const double rs = support_radius();
  if (std::isfinite(rs)) {
    for (double ratio : {x / rs, y / rs}) {
      if (ratio >= 1.0) continue;
      const double t = std::acos(ratio);
      for (double b : {t, pi - t, pi + t, 2.0 * pi - t, 0.5 * pi - t, 0.5 * pi + t, 1.5 * pi - t,
                       1.5 * pi + t})
        breaks.push_back(b);
    }
  }
  return angular_integral([&](const Point& d) { return direction_tail(boundary(d), d); }, breaks);
}

double Kernel::mass_outside_slab(double w) const {
  if (w <= 0.0) return total_mass();
  if (dim_ == 1)
    return angular_integral([&](const Point& d) { return direction_tail(w, d); }, {});
  const double pi = std::numbers::pi;
  std::vector<double> breaks{0.0};
  const double rs = support_radius();
  if (std::isfinite(rs)) {
    if (w >= rs) return 0.0;
    const double t = std::acos(w / rs);
    breaks.push_back(t);
    breaks.push_back(-t);
  }
  auto g = [&](double theta) {
    const double c = std::cos(theta);
    if (c <= 0.0) return 0.0;
    return direction_tail(w / c, make_point(c, std::sin(theta)));
  };
  quad::Options opt;
  opt.rel_tol = 1e-13;
  // Directions d and -d carry the same tail by evenness.
  return 2.0 * quad::gauss_kronrod(g, -0.5 * pi, 0.5 * pi, breaks, opt).value;
}

double Kernel::numeric_cell_2d(const Point& lo, const Point& hi) const {
  const double rs = support_radius();
  const bool bounded = std::isfinite(rs);
  double x0 = lo(0), x1 = hi(0);
  if (bounded) {
    x0 = std::max(x0, -rs);
    x1 = std::min(x1, rs);
  }
  if (!(x1 > x0)) return 0.0;
  quad::Options inner_opt;
  inner_opt.rel_tol = 1e-12;
  quad::Options outer_opt;
  outer_opt.rel_tol = 1e-11;
  const double zero_break[] = {0.0};
  auto inner = [&](double x) {
    double y0 = lo(1), y1 = hi(1);
    if (bounded) {
      const double s2 = rs * rs - x * x;
      if (s2 <= 0.0) return 0.0;
      const double s = std::sqrt(s2);
      y0 = std::max(y0, -s);
      y1 = std::min(y1, s);
    }
    if (!(y1 > y0)) return 0.0;
    auto f = [&](double y) { return (*this)(make_point(x, y)); };
    return quad::gauss_kronrod(f, y0, y1, zero_break, inner_opt).value;
  };
  std::vector<double> breaks{0.0};
  if (bounded) {
    for (double y : {lo(1), hi(1)}) {
      if (rs * rs > y * y) {
        const double s = std::sqrt(rs * rs - y * y);
        breaks.push_back(s);
        breaks.push_back(-s);
      }
    }
    breaks.push_back(rs);
    breaks.push_back(-rs);
  }
  return quad::gauss_kronrod(inner, x0, x1, breaks, outer_opt).value;
}

double Kernel::cell_mass(const Point& lo, const Point& hi) const {
  if (lo.size() != dim_ || hi.size() != dim_)
    throw Error("domain-error", "cell corners must match the kernel dimension");
  if (dim_ == 1) {
    const double a = lo(0), b = hi(0);
    if (a >= 0.0) return radial_shell_1d(a, b);
    if (b <= 0.0) return radial_shell_1d(-b, -a);
    if (!integrable()) return kInf;
    return radial_shell_1d(0.0, -a) + radial_shell_1d(0.0, b);
  }
  const bool holds_origin = (lo.array() <= 0.0).all() && (hi.array() >= 0.0).all();
  if (holds_origin) {
    if (!integrable()) return kInf;
    const Point mid = 0.5 * (lo + hi);
    if (closed_form_tails() && mid.norm() <= 1e-14 * (hi - lo).norm()) {
      const double hw[] = {0.5 * (hi(0) - lo(0)), 0.5 * (hi(1) - lo(1))};
      return total_mass() - mass_outside_box(hw);
    }
  }
  return numeric_cell_2d(lo, hi);
}

LevyReport check_levy(const Kernel& kernel, int refinement_levels) {
  if (refinement_levels < 2) throw Error("domain-error", "check_levy needs at least 2 levels");
  LevyReport rep;
  rep.tail = kernel.mass_outside_ball(1.0);
  rep.tail_uncertainty = kernel.tail_uncertainty();
  const int n = kernel.dim();
  const double pi = std::numbers::pi;
  quad::Options opt;
  opt.rel_tol = 1e-12;

  auto shell = [&](double r0, double r1) {
    auto radial_part = [&](const Point& dir) {
      auto f = [&](double rho) { return rho * rho * kernel(rho * dir) * std::pow(rho, n - 1); };
      return quad::gauss_kronrod(f, r0, r1, opt).value;
    };
    if (n == 1 || kernel.radial()) {
      Point e = Point::Zero(n);
      e(0) = 1.0;
      return sphere_measure(n) * radial_part(e);
    }
    auto g = [&](double t) { return radial_part(make_point(std::cos(t), std::sin(t))); };
    const double breaks[] = {0.5 * pi, pi, 1.5 * pi};
    return quad::gauss_kronrod(g, 0.0, 2.0 * pi, breaks, opt).value;
  };

  double running = rep.tail;
  std::vector<double> increments;
  int next_shell = 0;
  for (int level = 1; level <= refinement_levels; ++level) {
    const double before = running;
    for (; next_shell < 8 * level; ++next_shell)
      running += shell(std::ldexp(1.0, -next_shell - 1), std::ldexp(1.0, -next_shell));
    rep.estimates.push_back(running);
    increments.push_back(running - before);
  }
  const double last = rep.estimates.back();
  const double prev = rep.estimates[rep.estimates.size() - 2];
  rep.converged = std::isfinite(last) && std::abs(last - prev) <= 1e-3 * std::abs(last);
  if (!rep.converged) {
    bool growing = true;
    for (std::size_t i = 0; i < increments.size(); ++i) {
      if (!(increments[i] > 0.0)) growing = false;
      if (i > 0 && increments[i] < increments[i - 1] * (1.0 - 1e-6)) growing = false;
    }
    rep.a1_violated = growing || !std::isfinite(last);
  }
  rep.diagnostic = rep.converged ? "converged" : (rep.a1_violated ? "A1-violated" : "not-converged");
  return rep;
}

NonIntegrabilityReport check_non_integrable(const Kernel& kernel, std::span<const double> deltas,
                                            double threshold) {
  NonIntegrabilityReport rep;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] > 0.0) || (i > 0 && !(deltas[i] < deltas[i - 1])))
      throw Error("domain-error", "deltas must be positive and strictly decreasing");
    rep.deltas.push_back(deltas[i]);
    rep.l1_norms.push_back(kernel.mass_outside_ball(deltas[i]));
  }
  const auto& l = rep.l1_norms;
  if (l.size() < 2) return rep;
  bool increasing = true;
  for (std::size_t i = 1; i < l.size(); ++i) increasing = increasing && l[i] > l[i - 1];
  if (!increasing) return rep;
  // Growth per unit of log(1/delta): bounded kernels flatten out, (A2) kernels do not.
  bool slopes_hold = l.size() >= 3;
  double prev_slope = 0.0;
  for (std::size_t i = 1; i < l.size(); ++i) {
    const double slope = (l[i] - l[i - 1]) / std::log(deltas[i - 1] / deltas[i]);
    if (i > 1 && slope < prev_slope * (1.0 - 1e-9)) slopes_hold = false;
    prev_slope = slope;
  }
  rep.divergent = l.back() > threshold || slopes_hold;
  return rep;
}

TruncatedKernel truncate(const Kernel& kernel, double delta) {
  if (!(delta > 0.0)) throw Error("domain-error", "truncation radius must be positive");
  const double l1 = kernel.mass_outside_ball(delta);
  if (!(l1 > 0.0))
    throw Error("degenerate-truncation", "kernel has no mass outside B_delta for delta=" + num(delta));
  if (!std::isfinite(l1)) throw Error("A1-violated", "kernel tail is not integrable");
  return {kernel, delta, l1};
}

double levy_integral(const Kernel& kernel) {
  const int n = kernel.dim();
  quad::Options opt;
  opt.rel_tol = 1e-13;
  opt.max_intervals = 4000;
  std::vector<double> breaks;
  for (int k = 1; k < 80; ++k) breaks.push_back(std::ldexp(1.0, -k));
  auto radial_part = [&](const Point& dir) {
    auto f = [&](double rho) { return rho * rho * kernel(rho * dir) * std::pow(rho, n - 1); };
    return quad::gauss_kronrod(f, 0.0, 1.0, breaks, opt).value;
  };
  double inner;
  if (n == 1 || kernel.radial()) {
    Point e = Point::Zero(n);
    e(0) = 1.0;
    inner = n == 1 ? radial_part(e) + radial_part(-e) : sphere_measure(n) * radial_part(e);
  } else {
    const double pi = std::numbers::pi;
    auto g = [&](double t) { return radial_part(make_point(std::cos(t), std::sin(t))); };
    const double abr[] = {0.5 * pi, pi, 1.5 * pi};
    inner = quad::gauss_kronrod(g, 0.0, 2.0 * pi, abr, opt).value;
  }
  return inner + kernel.mass_outside_ball(1.0);
}

}  // namespace nloc
