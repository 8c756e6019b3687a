#include "nloc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "nloc/compactops.hpp"
#include "nloc/grid_io.hpp"
#include "nloc/maximize.hpp"
#include "nloc/poincare.hpp"
#include "nloc/rearrange.hpp"
#include "nloc/spectral.hpp"

namespace nloc {

void SuiteRecord::record(double lhs, double rhs) {
  if (std::isinf(rhs) && rhs > 0.0) {
    record_excess(-1.0);
    return;
  }
  record_excess((lhs - rhs) / std::max(std::abs(rhs), 1e-300));
}

void SuiteRecord::record_excess(double excess) {
  ++checks;
  // NaN counts as a violation.
  if (!(excess <= tol)) ++violations;
  worst_excess = std::isnan(excess) ? excess : std::max(worst_excess, excess);
}

namespace {

SuiteRecord start(std::string name, double tol) {
  SuiteRecord r;
  r.name = std::move(name);
  r.tol = tol;
  return r;
}

std::string tag(const std::string& what, double x) { return what + "(" + format_double(x) + ")"; }

Function unit(const FormOperator<double>& op, const Function& u) { return normalize(op, u); }

}  // namespace

SuiteRecord jensen_suite(const FormOperator<double>& op, const std::vector<double>& deltas, int samples,
                         Rng& rng, double tol) {
  SuiteRecord r = start("jensen", tol);
  for (double delta : deltas) {
    const TruncatedKernel trunc = truncate(op.kernel(), delta);
    const JensenWeight jw = jensen_weight(op, delta);
    r.values.emplace_back(tag("S", delta), jw.mass);
    r.values.emplace_back(tag("l1_norm", delta), trunc.l1_norm);
    for (int t = 0; t < samples; ++t) {
      const JensenReport rep = jensen_gap(op, jw, trunc, random_function(op.grid(), rng));
      r.record(rep.lhs, rep.rhs);
    }
  }
  return r;
}

SuiteRecord killing_suite(const FormOperator<double>& op, int samples, Rng& rng, double tol) {
  SuiteRecord r = start("killing", tol);
  const RearrangementTable table(op);
  for (int s = 0; s < samples; ++s) {
    const CellSet mask = random_cells(op.grid(), uniform(rng, 0.01, 0.6), rng);
    const double bound = table.kappa_of_r(mask.measure());
    const Eigen::VectorXd kappa = killing_measures(op, mask);
    for (Index x : mask.indices()) r.record(bound, kappa(x));
  }
  r.values.emplace_back("total_mass", table.total_mass());
  return r;
}

SuiteRecord truncation_suite(const FormOperator<double>& op, int samples, Rng& rng, double tol) {
  SuiteRecord r = start("truncation", tol);
  const RearrangementTable table(op);
  for (int s = 0; s < samples; ++s) {
    const Function u = random_function(op.grid(), rng);
    const double t = uniform(rng, 0.05, 0.95) * u.sup_norm();
    CellSet omega(op.grid());
    for (Index i = 0; i < u.size(); ++i)
      if (std::abs(u(i)) > t) omega.insert(i);
    const double gap = l2_distance(u, project_Pt(u, t));
    const double norm = std::sqrt(std::max(0.0, op.norm_squared(u)));
    r.record(gap, norm / std::sqrt(table.kappa_of_r(omega.measure())));
    if (omega.empty()) continue;
    const Eigen::VectorXd kappa = killing_measures(op, omega);
    double inf_kappa = kInf;
    for (Index x : omega.indices()) inf_kappa = std::min(inf_kappa, kappa(x));
    r.record(gap, norm / std::sqrt(inf_kappa));
  }
  return r;
}

SuiteRecord iteration_suite(const FormOperator<double>& op, int samples, Rng& rng, double tol) {
  SuiteRecord r = start("iteration", tol);
  const Stencil<double> q = min_one_weights(op);
  r.values.emplace_back("q_l1", q.total());
  for (int t = 0; t < samples; ++t) {
    const IterationReport rep = check_iteration_lemma(q, random_function(op.grid(), rng));
    r.record(rep.lhs, rep.rhs);
  }
  return r;
}

SuiteRecord poincare_suite(const FormOperator<double>& op, const std::vector<double>& a, int samples, Rng& rng,
                           double tol) {
  SuiteRecord r = start("poincare", tol);
  std::vector<double> sorted = a;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double prev_tilde = -1.0;
  for (double w : sorted) {
    const SlabConstant c = constant_Ca(build_chain(op, w), w);
    const double tilde = constant_Ca_tilde(op.kernel(), w);
    const double bound = std::max(c.c_a, tilde);
    const CellSet slab = CellSet::slab(op.grid(), w);
    for (int t = 0; t < samples; ++t) {
      const Function u = random_on(slab, rng);
      r.record(bound * u.l2_norm_squared(), op.energy(u));
    }
    const double lambda = eigensolve(op, slab, 1).eigenvalues[0];
    r.record(bound, lambda);
    if (!op.kernel().integrable()) r.record_excess(tilde > prev_tilde ? (prev_tilde - tilde) / tilde : 1.0);
    prev_tilde = tilde;
    r.values.emplace_back(tag("C_a", w), c.c_a);
    r.values.emplace_back(tag("C_tilde_a", w), tilde);
    r.values.emplace_back(tag("lambda1", w), lambda);
  }
  return r;
}

SuiteRecord scaling_suite(const FormOperator<double>& op, const Nonlinearity& f, double m_hat, int samples,
                          Rng& rng, double tol) {
  SuiteRecord r = start("scaling", tol);
  r.values.emplace_back("m_hat", m_hat);
  for (int t = 0; t < samples; ++t) {
    const Function w = uniform(rng) * unit(op, random_function(op.grid(), rng));
    const ScalingAudit a = check_scaling_lemma(op, f, m_hat, w, 0.0);
    r.record(a.phi_w, a.bound);
  }
  return r;
}

SuiteRecord norm_equivalence_suite(const FormOperator<double>& op, int samples, Rng& rng, double tol) {
  SuiteRecord r = start("norm-equivalence", tol);
  if (!op.kernel().integrable()) throw Error("domain-error", "norm equivalence needs an integrable kernel");
  const double factor = 1.0 + 2.0 * op.kernel().total_mass();
  r.values.emplace_back("factor", factor);
  for (int t = 0; t < samples; ++t) {
    const Function u = random_function(op.grid(), rng);
    const double l2 = u.l2_norm_squared(), n2 = op.norm_squared(u);
    r.record(l2, n2);
    r.record(n2, factor * l2);
  }
  return r;
}

SuiteRecord gradient_suite(const FormOperator<double>& op, const Nonlinearity& f, int points, int directions,
                           Rng& rng, double tol) {
  SuiteRecord r = start("gradient", tol);
  for (int p = 0; p < points; ++p) {
    const Function u = unit(op, random_function(op.grid(), rng));
    for (int d = 0; d < directions; ++d) {
      const Function v = unit(op, random_function(op.grid(), rng));
      r.record_excess(check_gradient(op, f, u, v).relative_error);
    }
  }
  return r;
}

SuiteRecord oracle_suite(const FormOperator<double>& op, int samples, Rng& rng, double tol) {
  SuiteRecord r = start("oracle", tol);
  for (int t = 0; t < samples; ++t) {
    const Eigen::VectorXd u = random_function(op.grid(), rng).values();
    const Eigen::VectorXd direct = op.apply_direct(u);
    r.record_excess((op.apply(u) - direct).norm() / std::max(direct.norm(), 1e-300));
  }
  return r;
}

}  // namespace nloc
