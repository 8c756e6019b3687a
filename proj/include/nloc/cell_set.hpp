#pragma once

#include <vector>

#include "nloc/grid_function.hpp"

namespace nloc {

// Subset of the cells of a grid.
class CellSet {
 public:
  explicit CellSet(Grid grid) : grid_(std::move(grid)), in_(grid_.size(), 0) {}

  static CellSet all(const Grid& grid);
  static CellSet none(const Grid& grid) { return CellSet(grid); }
  static CellSet single(const Grid& grid, Index flat);
  // Cells whose center lies in the closed box [lo, hi].
  static CellSet box(const Grid& grid, const Point& lo, const Point& hi);
  // Cells whose center lies in the open ball.
  static CellSet ball(const Grid& grid, const Point& center, double radius);
  // Cells lying entirely inside the slab |x_1| <= a.
  static CellSet slab(const Grid& grid, double a);
  static CellSet from_indices(const Grid& grid, const std::vector<Index>& flat);

  const Grid& grid() const noexcept { return grid_; }
  bool contains(Index flat) const { return in_[flat] != 0; }
  void insert(Index flat) { in_[flat] = 1; }
  void erase(Index flat) { in_[flat] = 0; }
  Index count() const;
  bool empty() const { return count() == 0; }
  double measure() const { return static_cast<double>(count()) * grid_.cell_volume(); }
  std::vector<Index> indices() const;
  bool subset_of(const CellSet& other) const;

  CellSet operator|(const CellSet& o) const;
  CellSet operator&(const CellSet& o) const;
  CellSet operator-(const CellSet& o) const;
  CellSet complement() const;
  bool operator==(const CellSet& o) const { return grid_ == o.grid_ && in_ == o.in_; }

  // Indicator as a grid function.
  GridFunction<double> indicator() const;

 private:
  Grid grid_;
  std::vector<unsigned char> in_;
};

// Parses a region expression such as "box(-1,-1; 0,0.5) + ball(0.2,0; 0.3) - slab(0.1)".
// Terms: all, box(lo; hi), ball(center; r), slab(a); operators + (union),
// - (difference), * (intersection), left to right.
CellSet parse_region(const Grid& grid, const std::string& expression);

}  // namespace nloc
