#pragma once

#include <complex>
#include <unsupported/Eigen/FFT>
#include <vector>

#include "nloc/stencil.hpp"

namespace nloc {

namespace detail {

// Smallest 2^a 3^b 5^c that is >= n.
inline Index fft_size(Index n) {
  for (Index m = std::max<Index>(n, 1);; ++m) {
    Index r = m;
    for (Index p : {2, 3, 5})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

template <class Scalar>
void fft_2d(std::vector<std::complex<Scalar>>& data, Index rows, Index cols, bool inverse) {
  Eigen::FFT<Scalar> fft;
  std::vector<std::complex<Scalar>> in, out;
  if (cols > 1) {
    in.resize(cols);
    for (Index r = 0; r < rows; ++r) {
      std::copy_n(data.begin() + r * cols, cols, in.begin());
      inverse ? fft.inv(out, in) : fft.fwd(out, in);
      std::copy_n(out.begin(), cols, data.begin() + r * cols);
    }
  }
  if (rows > 1) {
    in.resize(rows);
    for (Index c = 0; c < cols; ++c) {
      for (Index r = 0; r < rows; ++r) in[r] = data[r * cols + c];
      inverse ? fft.inv(out, in) : fft.fwd(out, in);
      for (Index r = 0; r < rows; ++r) data[r * cols + c] = out[r];
    }
  }
}

}  // namespace detail

// Discrete convolution (w * u)_x = sum_k w_k u_{x-k} restricted to the box,
// for u zero outside the box. Precomputes the spectrum of a circulant
// embedding large enough that no wrap-around reaches the box.
template <class Scalar = double>
class Convolver {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Convolver(const Grid& grid, const Stencil<Scalar>& w) : grid_(grid) {
    if (w.dim() != grid.dim()) throw Error("grid-mismatch", "stencil and grid dimensions differ");
    n_ = {grid.cells(0), grid.dim() > 1 ? grid.cells(1) : 1};
    Multi reach{0, 0};
    for (int a = 0; a < grid.dim(); ++a) {
      reach[a] = std::min(w.extent(a), n_[a] - 1);
      len_[a] = detail::fft_size(n_[a] + reach[a]);
    }
    if (grid.dim() == 1) len_[1] = 1;
    spectrum_.assign(len_[0] * len_[1], {});
    for (Index k0 = -reach[0]; k0 <= reach[0]; ++k0)
      for (Index k1 = -reach[1]; k1 <= reach[1]; ++k1) {
        const Index r = (k0 + len_[0]) % len_[0], c = (k1 + len_[1]) % len_[1];
        spectrum_[r * len_[1] + c] = w.at({k0, k1});
      }
    detail::fft_2d(spectrum_, len_[0], len_[1], false);
  }

  const Grid& grid() const noexcept { return grid_; }

  Vector apply(const Vector& u) const {
    if (u.size() != grid_.size()) throw Error("grid-mismatch", "vector size does not match the grid");
    std::vector<std::complex<Scalar>> buf(len_[0] * len_[1]);
    for (Index i0 = 0; i0 < n_[0]; ++i0)
      for (Index i1 = 0; i1 < n_[1]; ++i1) buf[i0 * len_[1] + i1] = u(i0 * n_[1] + i1);
    detail::fft_2d(buf, len_[0], len_[1], false);
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= spectrum_[i];
    detail::fft_2d(buf, len_[0], len_[1], true);
    Vector out(u.size());
    for (Index i0 = 0; i0 < n_[0]; ++i0)
      for (Index i1 = 0; i1 < n_[1]; ++i1) out(i0 * n_[1] + i1) = buf[i0 * len_[1] + i1].real();
    return out;
  }

 private:
  Grid grid_;
  Multi n_{1, 1};
  Multi len_{1, 1};
  std::vector<std::complex<Scalar>> spectrum_;
};

// Same convolution by direct summation; the reference for Convolver.
template <class Scalar>
typename Stencil<Scalar>::Vector convolve_direct(const Grid& grid, const Stencil<Scalar>& w,
                                                 const typename Stencil<Scalar>::Vector& u) {
  typename Stencil<Scalar>::Vector out = Stencil<Scalar>::Vector::Zero(grid.size());
  for (Index x = 0; x < grid.size(); ++x) {
    const Multi xi = grid.unravel(x);
    Scalar acc(0);
    for (Index y = 0; y < grid.size(); ++y) {
      const Multi yi = grid.unravel(y);
      acc += w.at({xi[0] - yi[0], xi[1] - yi[1]}) * u(y);
    }
    out(x) = acc;
  }
  return out;
}

// Full linear convolution a * b of two stencils, direct for small sizes and by
// FFT otherwise. Outside masses follow total(a * b) = total(a) total(b).
template <class Scalar>
Stencil<Scalar> convolve_stencils(const Stencil<Scalar>& a, const Stencil<Scalar>& b) {
  const int dim = a.dim();
  Multi extent{a.extent(0) + b.extent(0), a.extent(1) + b.extent(1)};
  Stencil<Scalar> out(dim, extent);
  const Index rows = detail::fft_size(out.width(0));
  const Index cols = dim > 1 ? detail::fft_size(out.width(1)) : 1;
  if (a.size() * b.size() <= Index(20'000'000)) {
    for (Index i = 0; i < a.size(); ++i) {
      const Scalar ai = a.values()(i);
      if (ai == Scalar(0)) continue;
      const Multi ka = a.unravel(i);
      for (Index j = 0; j < b.size(); ++j) {
        const Multi kb = b.unravel(j);
        out[{ka[0] + kb[0], ka[1] + kb[1]}] += ai * b.values()(j);
      }
    }
  } else {
    auto embed = [&](const Stencil<Scalar>& s) {
      std::vector<std::complex<Scalar>> buf(rows * cols);
      for (Index i = 0; i < s.size(); ++i) {
        const Multi k = s.unravel(i);
        buf[((k[0] + rows) % rows) * cols + (k[1] + cols) % cols] = s.values()(i);
      }
      detail::fft_2d(buf, rows, cols, false);
      return buf;
    };
    auto fa = embed(a);
    const auto fb = embed(b);
    for (std::size_t i = 0; i < fa.size(); ++i) fa[i] *= fb[i];
    detail::fft_2d(fa, rows, cols, true);
    const bool nonnegative = (a.values().array() >= 0).all() && (b.values().array() >= 0).all();
    for (Index i = 0; i < out.size(); ++i) {
      const Multi k = out.unravel(i);
      const Scalar v = fa[((k[0] + rows) % rows) * cols + (k[1] + cols) % cols].real();
      // Nonnegative inputs give nonnegative sums; drop the negative round-off.
      out.values()(i) = nonnegative ? std::max(v, Scalar(0)) : v;
    }
  }
  const Scalar ta = a.total(), tb = b.total();
  out.set_outside_mass(ta * tb - a.sum() * b.sum());
  return out;
}

}  // namespace nloc
