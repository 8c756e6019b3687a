#pragma once

#include <cmath>

#include "nloc/error.hpp"
#include "nloc/grid.hpp"

namespace nloc {

// Piecewise-constant function on the cells of a grid, identically zero
// outside the box. Value type.
template <class Scalar = double>
class GridFunction {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit GridFunction(Grid grid) : grid_(std::move(grid)), values_(Vector::Zero(grid_.size())) {}
  GridFunction(Grid grid, Vector values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw Error("grid-mismatch", "value count does not match the grid");
  }
  template <class F>
  static GridFunction sample(const Grid& grid, F&& f) {
    GridFunction u(grid);
    for (Index i = 0; i < grid.size(); ++i) u.values_(i) = static_cast<Scalar>(f(grid.center(i)));
    return u;
  }

  const Grid& grid() const noexcept { return grid_; }
  Index size() const noexcept { return values_.size(); }
  const Vector& values() const noexcept { return values_; }
  Vector& values() noexcept { return values_; }
  Scalar operator()(Index flat) const { return values_(flat); }
  Scalar& operator()(Index flat) { return values_(flat); }
  Scalar operator()(const Multi& idx) const { return values_(grid_.ravel(idx)); }
  Scalar& operator()(const Multi& idx) { return values_(grid_.ravel(idx)); }

  Scalar l2_norm_squared() const {
    return static_cast<Scalar>(grid_.cell_volume()) * values_.squaredNorm();
  }
  Scalar l2_norm() const { return std::sqrt(l2_norm_squared()); }
  Scalar sup_norm() const { return values_.size() ? values_.cwiseAbs().maxCoeff() : Scalar(0); }

  GridFunction& operator+=(const GridFunction& o) {
    require_same_grid(grid_, o.grid_);
    values_ += o.values_;
    return *this;
  }
  GridFunction& operator-=(const GridFunction& o) {
    require_same_grid(grid_, o.grid_);
    values_ -= o.values_;
    return *this;
  }
  GridFunction& operator*=(Scalar s) {
    values_ *= s;
    return *this;
  }

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(Scalar s, GridFunction a) { return a *= s; }
  friend GridFunction operator*(GridFunction a, Scalar s) { return a *= s; }

 private:
  Grid grid_;
  Vector values_;
};

// L^2 inner product h^N sum u_x v_x.
template <class Scalar>
Scalar l2_dot(const GridFunction<Scalar>& u, const GridFunction<Scalar>& v) {
  require_same_grid(u.grid(), v.grid());
  return static_cast<Scalar>(u.grid().cell_volume()) * u.values().dot(v.values());
}

template <class Scalar>
Scalar l2_distance(const GridFunction<Scalar>& u, const GridFunction<Scalar>& v) {
  require_same_grid(u.grid(), v.grid());
  return std::sqrt(static_cast<Scalar>(u.grid().cell_volume())) * (u.values() - v.values()).norm();
}

}  // namespace nloc
