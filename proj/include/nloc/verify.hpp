#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nloc/form_operator.hpp"
#include "nloc/nonlinearity.hpp"
#include "nloc/sampling.hpp"

namespace nloc {

// Outcome of one inequality family checked on sampled inputs. An excess is
// (lhs - rhs) / |rhs|; a check is violated when its excess exceeds tol.
struct SuiteRecord {
  std::string name;
  int checks = 0;
  int violations = 0;
  double worst_excess = -1.0;  // stays -1 only if nothing was checked
  double tol = 0.0;
  std::vector<std::pair<std::string, double>> values;
  std::string note;

  bool passed() const { return violations == 0; }
  // Checks lhs <= rhs; an infinite rhs always holds.
  void record(double lhs, double rhs);
  void record_excess(double excess);
};

// ||u - T_w u|| <= sqrt(2 / S) ||u|| for each delta.
SuiteRecord jensen_suite(const FormOperator<double>& op, const std::vector<double>& deltas, int samples,
                         Rng& rng, double tol = 1e-10);

// kappa_Omega(x) >= kappa(|Omega|) on random masks, every x in Omega.
SuiteRecord killing_suite(const FormOperator<double>& op, int samples, Rng& rng, double tol = 1e-9);

// ||u - P_t u|| <= kappa(|Omega_{u,t}|)^{-1/2} ||u|| and the pointwise-infimum version.
SuiteRecord truncation_suite(const FormOperator<double>& op, int samples, Rng& rng, double tol = 1e-10);

// E_{q*q}(u,u) <= 4 ||q||_1 E_q(u,u) with q = min{h^N, J}.
SuiteRecord iteration_suite(const FormOperator<double>& op, int samples, Rng& rng, double tol = 1e-10);

// Slab energies and lambda_1 against max(C_a, C~_a); C~_a must increase as a
// shrinks when the kernel is not integrable.
SuiteRecord poincare_suite(const FormOperator<double>& op, const std::vector<double>& a, int samples, Rng& rng,
                           double tol = 1e-10);

// Phi(w) <= m_hat ||w||^2 for random ||w|| <= 1.
SuiteRecord scaling_suite(const FormOperator<double>& op, const Nonlinearity& f, double m_hat, int samples,
                          Rng& rng, double tol = 1e-6);

// ||u||^2 <= (1 + 2 ||j||_1) ||u||_{L^2}^2; integrable kernels only.
SuiteRecord norm_equivalence_suite(const FormOperator<double>& op, int samples, Rng& rng, double tol = 1e-10);

// Riesz gradient against central differences on unit base points.
SuiteRecord gradient_suite(const FormOperator<double>& op, const Nonlinearity& f, int points, int directions,
                           Rng& rng, double tol = 1e-5);

// FFT application against the direct double sum.
SuiteRecord oracle_suite(const FormOperator<double>& op, int samples, Rng& rng, double tol = 1e-12);

}  // namespace nloc
