#pragma once

#include <vector>

#include "nloc/form_operator.hpp"

namespace nloc {

// Decreasing rearrangement of the cell-averaged kernel: every lattice offset
// of the stencil with its mass J_k and level J_k / h^N, sorted by level
// descending, ties by offset ascending. The singular offset-0 cell of a
// non-integrable kernel is left out (its mass is infinite).
class RearrangementTable {
 public:
  struct Entry {
    Multi offset;
    double value;  // cell average J_k / h^N
    double mass;   // J_k
  };

  RearrangementTable(const LatticeWeights& weights, double cell_volume);
  explicit RearrangementTable(const FormOperator<double>& op)
      : RearrangementTable(op.weights(), op.grid().cell_volume()) {}

  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::size_t count() const noexcept { return entries_.size(); }
  double cell_volume() const noexcept { return volume_; }
  double tail_mass() const noexcept { return tail_; }
  double tail_uncertainty() const noexcept { return tail_uncertainty_; }
  bool singular_cell_excluded() const noexcept { return singular_; }
  // Mass of all table cells plus the tail.
  double total_mass() const { return static_cast<double>(suffix_.front()) + tail_; }
  double support_measure() const { return static_cast<double>(count()) * volume_; }

  // h^N #{cells with value > c}
  double level_measure(double c) const;
  // h^N #{cells with value >= c}
  double level_measure_closed(double c) const;
  // Level of the (floor(r / h^N) + 1)-th largest cell; 0 past the table.
  double d_of_r(double r) const;
  // sum_{value < d} J + tail [d > 0] + d (h^N #{value >= d} - r), d = d_of_r(r).
  double kappa_of_r(double r) const;

 private:
  std::size_t rank(double r) const;

  std::vector<Entry> entries_;
  std::vector<long double> suffix_;  // suffix_[i] = sum of masses of entries i..
  double volume_;
  double tail_;
  double tail_uncertainty_;
  bool singular_;
};

struct KappaCurve {
  std::vector<double> r;
  std::vector<double> d;
  std::vector<double> kappa;
};

// Breakpoints r = m h^N, m = 0.. while r <= r_max.
KappaCurve kappa_curve(const RearrangementTable& table, double r_max);

// kappa_Omega(x): mass of J_{x - .} over the lattice cells outside mask,
// including everything beyond the box. Throws "singular-cell-touched" when
// x is outside the mask and the offset-0 cell carries infinite mass.
double killing_measure(const FormOperator<double>& op, const CellSet& mask, Index x);
// kappa_Omega at every cell of the mask (entries off the mask are 0 unless
// the kernel is integrable, in which case they hold the exact value).
Eigen::VectorXd killing_measures(const FormOperator<double>& op, const CellSet& mask);
double killing_measure(const Kernel& kernel, const CellSet& mask, Index x);

}  // namespace nloc
