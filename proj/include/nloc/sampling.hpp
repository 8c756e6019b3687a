#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "nloc/cell_set.hpp"
#include "nloc/grid_function.hpp"

namespace nloc {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo = 0.0, double hi = 1.0) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Mixture of white noise and a few bumps, so both rough and smooth inputs appear.
inline GridFunction<double> random_function(const Grid& g, Rng& rng) {
  GridFunction<double> u(g);
  const double noise = uniform(rng);
  for (Index i = 0; i < g.size(); ++i) u(i) = noise * uniform(rng, -1.0, 1.0);
  const int bumps = static_cast<int>(uniform(rng, 0.0, 4.0));
  for (int b = 0; b < bumps; ++b) {
    Point c(g.dim());
    for (int a = 0; a < g.dim(); ++a) c(a) = uniform(rng, -g.half_width(a), g.half_width(a));
    const double w = uniform(rng, 0.05, 0.5) * g.half_width(0);
    const double amp = uniform(rng, -2.0, 2.0);
    for (Index i = 0; i < g.size(); ++i) u(i) += amp * std::exp(-(g.center(i) - c).squaredNorm() / (w * w));
  }
  return u;
}

// Random function vanishing off the given cells.
inline GridFunction<double> random_on(const CellSet& mask, Rng& rng) {
  GridFunction<double> u = random_function(mask.grid(), rng);
  for (Index i = 0; i < u.size(); ++i)
    if (!mask.contains(i)) u(i) = 0.0;
  return u;
}

// Each cell independently with probability p, never empty.
inline CellSet random_cells(const Grid& g, double p, Rng& rng) {
  CellSet s(g);
  for (Index i = 0; i < g.size(); ++i)
    if (uniform(rng) < p) s.insert(i);
  if (s.empty()) s.insert(static_cast<Index>(uniform(rng) * static_cast<double>(g.size())) % g.size());
  return s;
}

}  // namespace nloc
