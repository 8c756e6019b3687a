#pragma once

#include <cstdint>
#include <vector>

#include "nloc/form_operator.hpp"

namespace nloc {

enum class EigenMethod { dense, iterative, automatic };

struct EigenOptions {
  double tol = 1e-9;       // residual target relative to lambda
  int max_restarts = 300;
  Index block = 0;         // 0: min(K, 4)
  Index subspace = 0;      // 0: chosen from K and the block size
  double cg_tol = 1e-13;   // inner solves of the shift-invert operator
  std::uint64_t seed = 20240601;
  Index dense_limit = 4096;  // automatic picks dense at or below this size
};

struct Spectrum {
  std::vector<Index> cells;                // mask cells, ascending
  std::vector<double> eigenvalues;         // ascending
  std::vector<GridFunction<double>> eigenfunctions;  // L^2-orthonormal
  std::vector<double> residuals;           // ||I xi - lambda xi||_{L^2}
  std::vector<bool> degenerate_with_next;  // |lambda_{k+1} - lambda_k| <= 1e-10 lambda_k
  std::vector<double> upper;               // lambda_k + unresolved tail mass
  double mask_measure = 0.0;
  EigenMethod method = EigenMethod::dense;
  int restarts = 0;
};

// K smallest eigenpairs of I restricted to the mask (rows and columns off the
// mask removed; the exterior enters through the diagonal).
Spectrum eigensolve(const FormOperator<double>& op, const CellSet& mask, Index count,
                    EigenMethod method = EigenMethod::automatic, const EigenOptions& opt = {});

// E(u,u) / ||u||_{L^2}^2 for u supported on the mask.
double rayleigh(const FormOperator<double>& op, const CellSet& mask, const GridFunction<double>& u);

// Conjugate gradients for (I + shift) x = b over the mask cells (b indexed by
// mask order). Returns the iteration count through iterations when given.
Eigen::VectorXd solve_shifted(const FormOperator<double>& op, const std::vector<Index>& cells, double shift,
                              const Eigen::VectorXd& b, double rel_tol, int* iterations = nullptr);

}  // namespace nloc
