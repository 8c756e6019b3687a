#include "nloc/grid.hpp"

#include <cmath>

#include "nloc/error.hpp"

namespace nloc {

Grid::Grid(int dim, std::vector<double> half_widths, std::vector<Index> cells)
    : dim_(dim), half_widths_(std::move(half_widths)), cells_(std::move(cells)) {
  if (dim_ < 1 || dim_ > kMaxDim)
    throw Error("invalid-config", "grid.dim must be 1 or 2, got " + std::to_string(dim_));
  if (static_cast<int>(half_widths_.size()) != dim_ || static_cast<int>(cells_.size()) != dim_)
    throw Error("invalid-config", "grid.half_widths and grid.cells need one entry per axis");
  for (int a = 0; a < dim_; ++a) {
    if (!(half_widths_[a] > 0.0) || !std::isfinite(half_widths_[a]))
      throw Error("invalid-config", "grid.half_widths must be positive and finite");
    if (cells_[a] < 2) throw Error("invalid-config", "grid.cells must be at least 2 per axis");
  }
  h_ = 2.0 * half_widths_[0] / static_cast<double>(cells_[0]);
  for (int a = 1; a < dim_; ++a) {
    const double ha = 2.0 * half_widths_[a] / static_cast<double>(cells_[a]);
    if (std::abs(ha - h_) > 1e-12 * h_)
      throw Error("invalid-config", "grid.h must agree across axes");
  }
  volume_ = std::pow(h_, dim_);
  size_ = 1;
  for (Index c : cells_) size_ *= c;
}

Grid Grid::from_spacing(int dim, std::vector<double> half_widths, double h) {
  if (!(h > 0.0) || !std::isfinite(h)) throw Error("invalid-config", "grid.h must be positive");
  std::vector<Index> cells;
  for (double hw : half_widths) {
    const double count = 2.0 * hw / h;
    const double rounded = std::round(count);
    if (!(rounded >= 1.0) || std::abs(count - rounded) > 1e-9 * std::max(1.0, count))
      throw Error("invalid-config", "grid.h must divide every box width 2*half_width");
    cells.push_back(static_cast<Index>(rounded));
  }
  return {dim, std::move(half_widths), std::move(cells)};
}

Point Grid::center(Index flat) const {
  const Multi idx = unravel(flat);
  Point p(dim_);
  for (int a = 0; a < dim_; ++a) p(a) = coordinate(a, idx[a]);
  return p;
}

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw Error("grid-mismatch", "operands live on different grids");
}

}  // namespace nloc
