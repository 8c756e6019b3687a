#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nloc/form_operator.hpp"
#include "nloc/nonlinearity.hpp"

namespace nloc {

using Function = GridFunction<double>;

// Phi(u) = h^N sum_x F(u_x)
double phi(const Nonlinearity& f, const Function& u);

// <u, v> = E(u, v) + (u, v)_{L^2}
double form_inner(const FormOperator<double>& op, const Function& u, const Function& v);
Function normalize(const FormOperator<double>& op, const Function& u);

// Gradient of Phi for <.,.>: (I + 1) g = F'(u).
Function riesz_gradient(const FormOperator<double>& op, const Nonlinearity& f, const Function& u,
                        double cg_tol = 1e-13);

struct AscentParams {
  double step = 1.0;
  int max_iter = 4000;
  double tol = 1e-6;        // on the <.,.>-norm of the tangential gradient
  int recenter_every = 25;  // 0 disables recentering
  Index window_cells = 0;   // 0: an eighth of the cells along axis 0
  double armijo = 1e-4;
  double min_step = 1e-12;
  double max_step = 1e6;
  double cg_tol = 1e-13;
};

struct AscentState {
  explicit AscentState(Function start) : u(std::move(start)) {}

  Function u;
  double phi = 0.0;
  double grad_norm = 0.0;
  double step = 0.0;
  int iterations = 0;
  bool converged = false;
  std::string status;          // "converged", "max-iter", "stalled"
  std::vector<double> history;  // Phi after every accepted step, starting with Phi(u0)
  std::vector<Multi> shifts;    // accepted recentering shifts
};

// Raised by ascend when the backtracking step drops below min_step.
class StalledError : public Error {
 public:
  StalledError(const std::string& what, AscentState state) : Error("stalled", what), state_(std::move(state)) {}
  const AscentState& state() const noexcept { return state_; }

 private:
  AscentState state_;
};

// Projected gradient ascent on the unit <.,.>-sphere with backtracking.
AscentState ascend(const FormOperator<double>& op, const Nonlinearity& f, const Function& u0,
                   const AscentParams& params = {});

// Centered bump, off-center bump, asymmetric two-bump, random positive and
// random signed bump sums, each on the unit sphere.
std::vector<Function> default_seeds(const FormOperator<double>& op, std::uint64_t seed);

struct MultistartResult {
  std::vector<AscentState> runs;
  std::size_t best = 0;
  double spread = 0.0;  // max - min of the final Phi over runs
  double m_hat() const { return runs.at(best).phi; }
};

MultistartResult multistart(const FormOperator<double>& op, const Nonlinearity& f, const AscentParams& params,
                            std::uint64_t seed, int starts = 5);

struct ScalingAudit {
  double phi_w = 0.0;
  double bound = 0.0;  // m_hat ||w||^2
  bool violated = false;
};

ScalingAudit check_scaling_lemma(const FormOperator<double>& op, const Nonlinearity& f, double m_hat,
                                 const Function& w, double tol = 1e-6);

struct GradientCheck {
  double analytic = 0.0;  // <g, v>
  double finite_difference = 0.0;
  double relative_error = 0.0;
};

GradientCheck check_gradient(const FormOperator<double>& op, const Nonlinearity& f, const Function& u,
                             const Function& v, double step = 1e-5);

}  // namespace nloc
