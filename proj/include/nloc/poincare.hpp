#pragma once

#include <vector>

#include "nloc/form_operator.hpp"

namespace nloc {

// q = min{1, j} on cell averages, Q_k = min(h^N, J_k), and its 2^m-fold
// self-convolutions q_m = q_{m-1} * q_{m-1}.
struct ConvolutionChain {
  std::vector<Stencil<double>> iterates;  // q_0 = q, ..., q_m
  std::vector<double> l1_norms;           // ||q_k||_1
  double q1_center = 0.0;                 // cell average of q_1 at 0
  double delta = 0.0;                     // largest lattice radius with q_1 >= q_1(0)/2 on B_delta
  int depth = 0;                          // m: minimal with 2^m delta > 2a
  double a = 0.0;
  double cell_volume = 0.0;
  double h = 0.0;

  const Stencil<double>& q() const { return iterates.front(); }
  const Stencil<double>& top() const { return iterates.back(); }
};

// Q_k = min(h^N, J_k) over the operator's stencil; the offset-0 cell gets
// min(h^N, J_0).
Stencil<double> min_one_weights(const FormOperator<double>& op);

ConvolutionChain build_chain(const FormOperator<double>& op, double a);

struct SlabConstant {
  double c_a1 = 0.0;   // q_m mass over offsets that leave the slab
  double c_a = 0.0;    // 4^{-2m} C_{a,1} / prod_{k<m} ||q_k||_1
  Index slab_cells = 0;  // cells across the slab along axis 0
};

SlabConstant constant_Ca(const ConvolutionChain& chain, double a);
// int_{|z_1| > 2a} j
double constant_Ca_tilde(const Kernel& kernel, double a);

// E_W(u,u) on the infinite lattice for an even nonnegative weight W.
double stencil_energy(const Stencil<double>& w, const GridFunction<double>& u);

struct IterationReport {
  double lhs = 0.0;  // E_{q*q}(u,u)
  double rhs = 0.0;  // 4 ||q||_1 E_q(u,u)
};

IterationReport check_iteration_lemma(const Stencil<double>& q, const GridFunction<double>& u);

}  // namespace nloc
