#pragma once

#include <algorithm>
#include <cmath>

#include "nloc/sampling.hpp"

namespace nloc {
using Function = GridFunction<double>;
}

namespace nloc::testing {

using nloc::random_cells;
using nloc::random_function;
using nloc::random_on;
using nloc::Rng;
using nloc::uniform;

inline double rel_excess(double lhs, double rhs) {
  const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
  return (lhs - rhs) / scale;
}

}  // namespace nloc::testing
