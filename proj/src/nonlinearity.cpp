#include "nloc/nonlinearity.hpp"

#include <cmath>
#include <vector>

#include "nloc/error.hpp"

namespace nloc {

Nonlinearity Nonlinearity::rational_quartic() {
  return {NonlinearityFamily::rational_quartic, "rational-quartic", 1.0};
}

Nonlinearity Nonlinearity::integrated_sigmoid() {
  return {NonlinearityFamily::integrated_sigmoid, "integrated-sigmoid", 0.5};
}

Nonlinearity Nonlinearity::zero() { return {NonlinearityFamily::zero, "zero", 0.0}; }

Nonlinearity Nonlinearity::custom(std::function<double(double)> f, double c_infinity,
                                  std::function<double(double)> derivative, std::string label) {
  if (!f) throw Error("invalid-config", "custom nonlinearity needs F");
  if (!(c_infinity >= 0.0)) throw Error("invalid-config", "F.c_infinity must be nonnegative");
  Nonlinearity out(NonlinearityFamily::custom, std::move(label), c_infinity);
  out.f_ = std::move(f);
  out.df_ = std::move(derivative);
  return out;
}

double Nonlinearity::operator()(double t) const {
  const double t2 = t * t;
  switch (family_) {
    case NonlinearityFamily::rational_quartic:
      return t2 * t2 / (1.0 + t2);
    case NonlinearityFamily::integrated_sigmoid:
      // (t^2 - log1p(t^2)) / 2 loses everything to cancellation for small t.
      if (t2 < 1e-3) return t2 * t2 * (0.25 - t2 / 6.0 + t2 * t2 / 8.0 - t2 * t2 * t2 / 10.0);
      return 0.5 * (t2 - std::log1p(t2));
    case NonlinearityFamily::zero:
      return 0.0;
    case NonlinearityFamily::custom:
      return f_(t);
  }
  return 0.0;
}

double Nonlinearity::derivative(double t) const {
  const double t2 = t * t;
  switch (family_) {
    case NonlinearityFamily::rational_quartic: {
      const double d = 1.0 + t2;
      return (4.0 * t2 * t + 2.0 * t2 * t2 * t) / (d * d);
    }
    case NonlinearityFamily::integrated_sigmoid:
      return t2 * t / (1.0 + t2);
    case NonlinearityFamily::zero:
      return 0.0;
    case NonlinearityFamily::custom: {
      if (df_) return df_(t);
      const double step = 1e-6 * (1.0 + std::abs(t));
      return (f_(t + step) - f_(t - step)) / (2.0 * step);
    }
  }
  return 0.0;
}

double Nonlinearity::c_epsilon(double eps) const {
  if (!(eps > 0.0)) throw Error("domain-error", "epsilon must be positive");
  const double x = eps * eps;
  switch (family_) {
    case NonlinearityFamily::rational_quartic:
      return x / (1.0 + x);
    case NonlinearityFamily::integrated_sigmoid:
      return (*this)(eps) / x;
    case NonlinearityFamily::zero:
      return 0.0;
    case NonlinearityFamily::custom: {
      double best = 0.0;
      const int n = 2000;
      for (int i = 1; i <= n; ++i) {
        const double t = eps * i / n;
        best = std::max({best, std::abs(f_(t)) / (t * t), std::abs(f_(-t)) / (t * t)});
      }
      return best;
    }
  }
  return 0.0;
}

NonlinearityAudit audit(const Nonlinearity& f, double t_max, int samples) {
  NonlinearityAudit a;
  a.vanishes_at_zero = f(0.0) == 0.0;
  a.nonnegative = a.quadratic_bound = a.ratio_monotone = true;
  double prev_pos = -1.0, prev_neg = -1.0;
  const int half = samples / 2;
  for (int i = 1; i <= half; ++i) {
    const double t = t_max * i / half;
    const double fp = f(t), fn = f(-t);
    const double slack = 1e-12 * t * t;
    a.nonnegative = a.nonnegative && fp >= 0.0 && fn >= 0.0;
    a.quadratic_bound = a.quadratic_bound && fp <= f.c_infinity() * t * t + slack &&
                        fn <= f.c_infinity() * t * t + slack;
    const double rp = fp / (t * t), rn = fn / (t * t);
    // Walking outward from 0 the ratio may only grow on either side.
    a.ratio_monotone = a.ratio_monotone && rp >= prev_pos - 1e-12 && rn >= prev_neg - 1e-12;
    prev_pos = rp;
    prev_neg = rn;
  }
  return a;
}

}  // namespace nloc
