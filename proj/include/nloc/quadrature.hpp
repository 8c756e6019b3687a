#pragma once

#include <functional>
#include <span>
#include <vector>

namespace nloc::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

struct Options {
  double abs_tol = 1e-300;
  double rel_tol = 1e-12;
  int max_intervals = 2000;
};

using Integrand = std::function<double(double)>;

// Globally adaptive Gauss-Kronrod (7/15) on [a, b]. Nodes never touch the
// endpoints, so integrable endpoint singularities are fine.
Result gauss_kronrod(const Integrand& f, double a, double b, const Options& opt = {});

// Same, split at the given interior breakpoints (unsorted, out-of-range ignored).
Result gauss_kronrod(const Integrand& f, double a, double b, std::span<const double> breaks,
                     const Options& opt = {});

// Integral over [a, inf) through x = a + t / (1 - t).
Result gauss_kronrod_to_infinity(const Integrand& f, double a, const Options& opt = {});

}  // namespace nloc::quad
