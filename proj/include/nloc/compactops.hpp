#pragma once

#include <string>
#include <vector>

#include "nloc/form_operator.hpp"

namespace nloc {

using Function = GridFunction<double>;

// Discrete w_delta: J_k / S over the offsets k != 0 whose cell is not
// contained in the closed ball B_delta, with S the full-lattice mass of those
// offsets (tail included). Since these cells cover R^N \ B_delta whenever
// delta >= sqrt(N) h / 2, S >= ||j_delta||_1 there.
struct JensenWeight {
  Stencil<double> w;
  double mass = 0.0;  // S
  double delta = 0.0;
};

JensenWeight jensen_weight(const FormOperator<double>& op, double delta);

// (T_w u)_x = sum_k w_k u_{x-k} on the box. Requires total(w) = 1 within 1e-10.
Function smooth(const Stencil<double>& w, const Function& u);

struct JensenReport {
  double lhs = 0.0;             // ||u - T_w u||_{L^2(box)}
  double rhs = 0.0;             // sqrt(2 / S) ||u||
  double rhs_continuum = 0.0;   // sqrt(2 / ||j_delta||_1) ||u||
  double norm = 0.0;            // ||u||
  double lattice_l1 = 0.0;      // S
  double continuum_l1 = 0.0;    // ||j_delta||_1
};

JensenReport jensen_gap(const FormOperator<double>& op, const TruncatedKernel& trunc, const Function& u);
JensenReport jensen_gap(const FormOperator<double>& op, const JensenWeight& weight,
                        const TruncatedKernel& trunc, const Function& u);

// Pointwise clamp to [-t, t].
Function project_Pt(const Function& u, double t);
// 1_K u
Function restrict_to(const Function& u, const CellSet& k);

struct ConcentrationReport {
  double epsilon = 0.0;
  double mass_above = 0.0;        // h^N sum_{|u| >= eps} u^2
  Multi shift{0, 0};              // recentering offset
  double window_mass = 0.0;       // mass of the selected window before the shift
  double post_shift_mass = 0.0;   // mass of the central window after the shift
  double leaked_mass = 0.0;       // L^2 mass pushed off the box by the shift
  Function shifted;
};

// Recenters the window of side window_cells (per axis) carrying the most
// u^2 mass; ties go to the lexicographically first window.
ConcentrationReport concentration(const Function& u, double epsilon, Index window_cells);
// Recenters the cell of {|u| >= eps} with the smallest killing measure of that set.
ConcentrationReport concentration_min_killing(const FormOperator<double>& op, const Function& u,
                                              double epsilon, Index window_cells);

// n^{-1/2}-scaled indicator of the centered cube of measure n, normalized in L^2.
Function vanishing_member(const Grid& grid, double n);
// Fixed smooth bump of radius 1 whose center moves toward the upper corner
// as n grows; normalized in L^2.
Function bump_member(const Grid& grid, double n);

// {2^{-m} : m = 0..m_max}
std::vector<double> dyadic_epsilons(int m_max = 10);

struct DichotomyRow {
  double n;
  double epsilon;
  double mass_above;
  Multi shift;
  double post_shift_mass;
};

std::vector<DichotomyRow> dichotomy_rows(const Grid& grid, const std::string& family,
                                         const std::vector<double>& ns,
                                         const std::vector<double>& epsilons, Index window_cells);

}  // namespace nloc
