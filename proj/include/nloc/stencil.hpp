#pragma once

#include <cmath>

#include "nloc/grid.hpp"

namespace nloc {

// Lattice weights over offsets |k_i| <= K_i, plus the mass carried by all
// offsets beyond that range.
template <class Scalar = double>
class Stencil {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Stencil(int dim, const Multi& extent) : dim_(dim), extent_(extent) {
    for (int a = dim_; a < kMaxDim; ++a) extent_[a] = 0;
    values_ = Vector::Zero(width(0) * width(1));
  }

  int dim() const noexcept { return dim_; }
  Index extent(int axis) const { return extent_[axis]; }
  const Multi& extent() const noexcept { return extent_; }
  Index width(int axis) const { return 2 * extent_[axis] + 1; }
  Index size() const noexcept { return values_.size(); }

  bool in_range(const Multi& k) const {
    for (int a = 0; a < kMaxDim; ++a)
      if (k[a] < -extent_[a] || k[a] > extent_[a]) return false;
    return true;
  }
  Index ravel(const Multi& k) const { return (k[0] + extent_[0]) * width(1) + (k[1] + extent_[1]); }
  Multi unravel(Index flat) const {
    return {flat / width(1) - extent_[0], flat % width(1) - extent_[1]};
  }

  Scalar at(const Multi& k) const { return in_range(k) ? values_(ravel(k)) : Scalar(0); }
  Scalar& operator[](const Multi& k) { return values_(ravel(k)); }
  Scalar center() const { return values_(ravel({0, 0})); }
  Scalar& center() { return values_(ravel({0, 0})); }

  const Vector& values() const noexcept { return values_; }
  Vector& values() noexcept { return values_; }
  Scalar outside_mass() const noexcept { return outside_; }
  void set_outside_mass(Scalar m) { outside_ = m; }

  Scalar sum() const { return values_.sum(); }
  Scalar total() const { return sum() + outside_; }

  bool symmetric(Scalar rel_tol = Scalar(0)) const {
    const Scalar scale = values_.cwiseAbs().maxCoeff();
    for (Index i = 0; i < size(); ++i) {
      const Scalar b = values_(size() - 1 - i);  // offset -k
      if (std::abs(values_(i) - b) > rel_tol * scale) return false;
    }
    return true;
  }

  template <class T>
  Stencil<T> cast() const {
    Stencil<T> out(dim_, extent_);
    out.values() = values_.template cast<T>();
    out.set_outside_mass(static_cast<T>(outside_));
    return out;
  }

 private:
  int dim_;
  Multi extent_;
  Vector values_;
  Scalar outside_ = Scalar(0);
};

// Cell masses J_k of the kernel on the lattice of grid, over offsets that
// connect any two cells of the box. The center entry is left at 0.
struct LatticeWeights {
  Stencil<double> J;
  double center_mass = 0.0;  // mass of the offset-0 cell; +inf when j is singular there
  double tail_uncertainty = 0.0;

  // Off-center mass over the full lattice (stencil plus tail).
  double off_center_mass() const { return J.total(); }
};

LatticeWeights lattice_weights(const Kernel& kernel, const Grid& grid);

}  // namespace nloc
