#include "nloc/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <random>

namespace nloc {
namespace {

// Residual relative to its eigenvalue, as the convergence test sees it.
std::string format_relative(double residual, double lambda) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", residual / std::abs(lambda));
  return buf;
}

using Eigen::MatrixXd;
using Eigen::VectorXd;

class MaskedOperator {
 public:
  MaskedOperator(const FormOperator<double>& op, const std::vector<Index>& cells)
      : op_(op), cells_(cells) {}

  Index size() const { return static_cast<Index>(cells_.size()); }

  VectorXd apply(const VectorXd& x) const {
    VectorXd full = VectorXd::Zero(op_.grid().size());
    for (Index i = 0; i < size(); ++i) full(cells_[i]) = x(i);
    const VectorXd y = op_.apply(full);
    VectorXd out(size());
    for (Index i = 0; i < size(); ++i) out(i) = y(cells_[i]);
    return out;
  }

  MatrixXd apply(const MatrixXd& x) const {
    MatrixXd out(x.rows(), x.cols());
    for (Index c = 0; c < x.cols(); ++c) out.col(c) = apply(VectorXd(x.col(c)));
    return out;
  }

 private:
  const FormOperator<double>& op_;
  const std::vector<Index>& cells_;
};

VectorXd conjugate_gradient(const MaskedOperator& a, double shift, const VectorXd& b, double rel_tol,
                            int* iterations) {
  VectorXd x = VectorXd::Zero(b.size());
  VectorXd r = b;
  const double target = rel_tol * b.norm();
  if (b.norm() == 0.0) return x;
  VectorXd p = r;
  double rr = r.squaredNorm();
  const int limit = static_cast<int>(20 * b.size() + 200);
  int it = 0;
  while (std::sqrt(rr) > target) {
    if (++it > limit)
      throw Error("linear-solve-failure", "conjugate gradients did not reach the tolerance, residual " +
                                              std::to_string(std::sqrt(rr) / b.norm()));
    const VectorXd ap = a.apply(p) + shift * p;
    const double alpha = rr / p.dot(ap);
    x += alpha * p;
    r -= alpha * ap;
    const double next = r.squaredNorm();
    p = r + (next / rr) * p;
    rr = next;
  }
  if (iterations) *iterations = it;
  return x;
}

// Orthonormalizes the columns of z against v and among themselves. Columns
// that collapse are replaced with fresh random directions.
MatrixXd orthonormalize(const MatrixXd& v, MatrixXd z, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  for (Index c = 0; c < z.cols(); ++c) {
    for (int attempt = 0;; ++attempt) {
      const double before = z.col(c).norm();
      for (int pass = 0; pass < 2; ++pass) {
        if (v.cols()) z.col(c) -= v * (v.transpose() * z.col(c));
        for (Index d = 0; d < c; ++d) z.col(c) -= z.col(d).dot(z.col(c)) * z.col(d);
      }
      const double after = z.col(c).norm();
      if (after > 1e-8 * before && after > 0.0) {
        z.col(c) /= after;
        break;
      }
      if (attempt > 8) throw Error("non-convergence", "cannot extend the Krylov basis");
      for (Index i = 0; i < z.rows(); ++i) z(i, c) = normal(rng);
    }
  }
  return z;
}

void finalize(Spectrum& s, const FormOperator<double>& op, const MatrixXd& vectors, const VectorXd& values,
              const MaskedOperator& a) {
  const Grid& g = op.grid();
  const double scale = 1.0 / std::sqrt(g.cell_volume());
  const Index k = values.size();
  for (Index i = 0; i < k; ++i) {
    VectorXd v = vectors.col(i);
    Index pivot = 0;
    v.cwiseAbs().maxCoeff(&pivot);
    if (v(pivot) < 0) v = -v;
    GridFunction<double> xi(g);
    for (Index j = 0; j < v.size(); ++j) xi(s.cells[j]) = v(j) * scale;
    s.eigenvalues.push_back(values(i));
    s.eigenfunctions.push_back(std::move(xi));
    s.residuals.push_back((a.apply(v) - values(i) * v).norm());
    s.upper.push_back(values(i) + op.tail_uncertainty());
  }
  for (Index i = 0; i < k; ++i)
    s.degenerate_with_next.push_back(i + 1 < k &&
                                     std::abs(values(i + 1) - values(i)) <= 1e-10 * std::abs(values(i)));
}

}  // namespace

Eigen::VectorXd solve_shifted(const FormOperator<double>& op, const std::vector<Index>& cells, double shift,
                              const Eigen::VectorXd& b, double rel_tol, int* iterations) {
  return conjugate_gradient(MaskedOperator(op, cells), shift, b, rel_tol, iterations);
}

Spectrum eigensolve(const FormOperator<double>& op, const CellSet& mask, Index count, EigenMethod method,
                    const EigenOptions& opt) {
  require_same_grid(op.grid(), mask.grid());
  Spectrum s;
  s.cells = mask.indices();
  const Index n = static_cast<Index>(s.cells.size());
  if (n == 0) throw Error("domain-error", "eigensolve needs a nonempty mask");
  if (count < 1 || count > n) throw Error("domain-error", "eigenpair count must lie in [1, |mask|]");
  s.mask_measure = mask.measure();
  if (method == EigenMethod::automatic)
    method = n <= opt.dense_limit ? EigenMethod::dense : EigenMethod::iterative;
  s.method = method;
  const MaskedOperator a(op, s.cells);

  if (method == EigenMethod::dense) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(op.matrix(mask));
    if (es.info() != Eigen::Success) throw Error("non-convergence", "dense eigensolver failed");
    finalize(s, op, es.eigenvectors().leftCols(count), es.eigenvalues().head(count), a);
    return s;
  }

  // Block Krylov iteration on I^{-1} (conjugate-gradient solves) with thick
  // restarts; Rayleigh-Ritz is done with I itself, so inexact inner solves
  // only slow convergence down. The first block is a random start.
  const Index p = std::min(n, opt.block > 0 ? opt.block : std::min<Index>(count, 4));
  const Index mmax = std::min(n, opt.subspace > 0 ? opt.subspace : std::max(count + 3 * p, 2 * count + 2 * p));
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  MatrixXd start(n, p);
  for (Index i = 0; i < start.size(); ++i) start.data()[i] = normal(rng);
  MatrixXd v = orthonormalize(MatrixXd(n, 0), start, rng);
  MatrixXd last = v;
  VectorXd theta;
  MatrixXd ritz;
  std::vector<double> res(count, kInf);
  for (int restart = 0; restart <= opt.max_restarts; ++restart) {
    while (v.cols() < mmax) {
      const Index take = std::min<Index>(last.cols(), mmax - v.cols());
      MatrixXd z(n, take);
      for (Index c = 0; c < take; ++c) z.col(c) = conjugate_gradient(a, 0.0, last.col(c), opt.cg_tol, nullptr);
      z = orthonormalize(v, z, rng);
      v.conservativeResize(n, v.cols() + take);
      v.rightCols(take) = z;
      last = z;
    }
    const MatrixXd av = a.apply(v);
    MatrixXd h = v.transpose() * av;
    h = 0.5 * (h + h.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(h);
    theta = es.eigenvalues();
    const MatrixXd& y = es.eigenvectors();
    ritz = v * y.leftCols(count);
    const MatrixXd r = av * y.leftCols(count) - ritz * theta.head(count).asDiagonal();
    bool done = true;
    std::vector<Index> open;
    for (Index i = 0; i < count; ++i) {
      res[i] = r.col(i).norm();
      if (res[i] > opt.tol * std::abs(theta(i))) {
        done = false;
        open.push_back(i);
      }
    }
    s.restarts = restart;
    // A basis of full dimension makes Rayleigh-Ritz exact.
    if (done || v.cols() == n) {
      finalize(s, op, ritz, theta.head(count), a);
      return s;
    }
    const Index keep = std::min(v.cols() - p, count + p);
    v = (v * y.leftCols(keep)).eval();
    v = orthonormalize(MatrixXd(n, 0), v, rng);
    // Expanding with I^{-1} applied to residuals rather than to the Ritz
    // vectors avoids the cancellation once those have nearly converged.
    last.resize(n, std::min<Index>(p, static_cast<Index>(open.size())));
    for (Index c = 0; c < last.cols(); ++c) last.col(c) = r.col(open[c]);
  }
  std::string detail;
  for (std::size_t i = 0; i < res.size(); ++i) detail += " " + format_relative(res[i], theta(i));
  throw Error("non-convergence", "iterative eigensolver stopped with residuals" + detail);
}

double rayleigh(const FormOperator<double>& op, const CellSet& mask, const GridFunction<double>& u) {
  require_same_grid(op.grid(), mask.grid());
  require_same_grid(op.grid(), u.grid());
  for (Index i = 0; i < u.size(); ++i)
    if (u(i) != 0.0 && !mask.contains(i)) throw Error("domain-error", "u is not supported on the mask");
  const double l2 = u.l2_norm_squared();
  if (!(l2 > 0.0)) throw Error("zero-function", "Rayleigh quotient of the zero function");
  return op.energy(u) / l2;
}

}  // namespace nloc
