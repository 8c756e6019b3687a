#include "nloc/rearrange.hpp"

#include <algorithm>
#include <cmath>

namespace nloc {

RearrangementTable::RearrangementTable(const LatticeWeights& weights, double cell_volume)
    : volume_(cell_volume),
      tail_(weights.J.outside_mass()),
      tail_uncertainty_(weights.tail_uncertainty),
      singular_(!std::isfinite(weights.center_mass)) {
  const Stencil<double>& J = weights.J;
  entries_.reserve(J.size());
  for (Index i = 0; i < J.size(); ++i) {
    const Multi k = J.unravel(i);
    const bool center = k[0] == 0 && k[1] == 0;
    if (center && singular_) continue;
    const double mass = center ? weights.center_mass : J.values()(i);
    entries_.push_back({k, mass / volume_, mass});
  }
  std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
    if (a.value != b.value) return a.value > b.value;
    return a.offset < b.offset;
  });
  suffix_.assign(entries_.size() + 1, 0.0L);
  for (std::size_t i = entries_.size(); i-- > 0;) suffix_[i] = suffix_[i + 1] + entries_[i].mass;
}

double RearrangementTable::level_measure(double c) const {
  // First entry with value <= c.
  auto it = std::partition_point(entries_.begin(), entries_.end(),
                                 [c](const Entry& e) { return e.value > c; });
  return static_cast<double>(it - entries_.begin()) * volume_;
}

double RearrangementTable::level_measure_closed(double c) const {
  auto it = std::partition_point(entries_.begin(), entries_.end(),
                                 [c](const Entry& e) { return e.value >= c; });
  return static_cast<double>(it - entries_.begin()) * volume_;
}

std::size_t RearrangementTable::rank(double r) const {
  if (!(r >= 0.0)) throw Error("domain-error", "r must be nonnegative");
  // r = m h^N computed in floating point may land just below m h^N.
  const double cells = r / volume_;
  return static_cast<std::size_t>(std::floor(cells + 1e-9 * std::max(1.0, cells)));
}

double RearrangementTable::d_of_r(double r) const {
  const std::size_t m = rank(r);
  return m < entries_.size() ? entries_[m].value : 0.0;
}

double RearrangementTable::kappa_of_r(double r) const {
  const double d = d_of_r(r);
  if (d <= 0.0) return 0.0;
  auto it = std::partition_point(entries_.begin(), entries_.end(),
                                 [d](const Entry& e) { return e.value >= d; });
  const std::size_t at_least = static_cast<std::size_t>(it - entries_.begin());
  const long double below = suffix_[at_least];
  const long double excess = static_cast<long double>(d) *
                             (static_cast<long double>(at_least) * volume_ - static_cast<long double>(r));
  return static_cast<double>(below + tail_ + excess);
}

KappaCurve kappa_curve(const RearrangementTable& table, double r_max) {
  KappaCurve c;
  const double v = table.cell_volume();
  for (std::size_t m = 0; m <= table.count(); ++m) {
    const double r = static_cast<double>(m) * v;
    if (r > r_max * (1.0 + 1e-12)) break;
    c.r.push_back(r);
    c.d.push_back(table.d_of_r(r));
    c.kappa.push_back(table.kappa_of_r(r));
  }
  return c;
}

Eigen::VectorXd killing_measures(const FormOperator<double>& op, const CellSet& mask) {
  require_same_grid(op.grid(), mask.grid());
  const GridFunction<double> chi = mask.indicator();
  // Off-center mass seen inside the mask, over the box only.
  const Eigen::VectorXd inside = op.convolve(chi.values());
  const double center = op.weights().center_mass;
  const bool finite_center = std::isfinite(center);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(op.grid().size());
  for (Index x = 0; x < op.grid().size(); ++x) {
    if (mask.contains(x))
      out(x) = op.diagonal() - inside(x);
    else if (finite_center)
      out(x) = op.diagonal() + center - inside(x);
  }
  // A mask covering the whole kernel support leaves rounding-level negatives.
  return out.cwiseMax(0.0);
}

double killing_measure(const FormOperator<double>& op, const CellSet& mask, Index x) {
  require_same_grid(op.grid(), mask.grid());
  if (x < 0 || x >= op.grid().size()) throw Error("domain-error", "x must be a cell of the box");
  const bool singular = !std::isfinite(op.weights().center_mass);
  if (singular && !mask.contains(x))
    throw Error("singular-cell-touched", "x lies outside the mask, so the singular cell is counted");
  const Grid& g = op.grid();
  const Multi xi = g.unravel(x);
  long double inside = 0.0L;
  for (Index y : mask.indices()) {
    if (y == x) continue;
    const Multi yi = g.unravel(y);
    inside += op.stencil().at({xi[0] - yi[0], xi[1] - yi[1]});
  }
  long double total = op.diagonal();
  if (!mask.contains(x)) total += op.weights().center_mass;
  return std::max(0.0, static_cast<double>(total - inside));
}

double killing_measure(const Kernel& kernel, const CellSet& mask, Index x) {
  return killing_measure(FormOperator<double>(kernel, mask.grid()), mask, x);
}

}  // namespace nloc
