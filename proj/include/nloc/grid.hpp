#pragma once

#include <array>
#include <vector>

#include "nloc/kernel.hpp"

namespace nloc {

using Index = Eigen::Index;
// Per-axis lattice index or offset; entries past the dimension stay 0.
using Multi = std::array<Index, kMaxDim>;

// Uniform lattice of cubic cells over the centered box prod_i (-L_i, L_i).
// Cell i on an axis is [-L + i h, -L + (i+1) h]. Flat indices run with the
// last axis fastest.
class Grid {
 public:
  Grid(int dim, std::vector<double> half_widths, std::vector<Index> cells);
  // Cells per axis derived from 2 L_i / h, which must be an integer.
  static Grid from_spacing(int dim, std::vector<double> half_widths, double h);
  static Grid cube(int dim, double half_width, Index cells_per_axis) {
    return {dim, std::vector<double>(dim, half_width), std::vector<Index>(dim, cells_per_axis)};
  }

  int dim() const noexcept { return dim_; }
  Index cells(int axis) const { return cells_[axis]; }
  const std::vector<Index>& cells() const noexcept { return cells_; }
  double half_width(int axis) const { return half_widths_[axis]; }
  const std::vector<double>& half_widths() const noexcept { return half_widths_; }
  double h() const noexcept { return h_; }
  double cell_volume() const noexcept { return volume_; }
  Index size() const noexcept { return size_; }
  double measure() const noexcept { return static_cast<double>(size_) * volume_; }

  Index ravel(const Multi& idx) const {
    return dim_ == 1 ? idx[0] : idx[0] * cells_[1] + idx[1];
  }
  Multi unravel(Index flat) const {
    if (dim_ == 1) return {flat, 0};
    return {flat / cells_[1], flat % cells_[1]};
  }
  bool contains(const Multi& idx) const {
    for (int a = 0; a < dim_; ++a)
      if (idx[a] < 0 || idx[a] >= cells_[a]) return false;
    return true;
  }

  double coordinate(int axis, Index i) const { return -half_widths_[axis] + (i + 0.5) * h_; }
  Point center(Index flat) const;
  // Index of the cell holding the box center (lower-middle for even counts).
  Multi middle() const {
    Multi m{0, 0};
    for (int a = 0; a < dim_; ++a) m[a] = (cells_[a] - 1) / 2;
    return m;
  }

  bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && cells_ == other.cells_ && half_widths_ == other.half_widths_;
  }

 private:
  int dim_;
  std::vector<double> half_widths_;
  std::vector<Index> cells_;
  double h_ = 0.0;
  double volume_ = 0.0;
  Index size_ = 0;
};

// Throws "grid-mismatch" unless the two grids coincide.
void require_same_grid(const Grid& a, const Grid& b);

}  // namespace nloc
