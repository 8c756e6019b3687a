#pragma once

#include <Eigen/Dense>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace nloc {

// Lattice points and directions live in at most two dimensions; the fixed
// upper bound keeps them off the heap in the quadrature hot loops.
inline constexpr int kMaxDim = 2;
using Point = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class KernelFamily { fractional, zero_order, anisotropic, integrable, custom };

// j(z) = |z|^{-N-alpha}
struct Fractional {
  double alpha;
};

// j(z) = |z|^{-beta} on |z| < cutoff; beta = N is the logarithmic (zero-order) case.
struct ZeroOrder {
  double beta;
  double cutoff = 1.0;
};

// j(z) = (z^T M z)^{-(N+alpha)/2}
struct Anisotropic {
  Eigen::MatrixXd metric;
  double alpha;
};

enum class Profile { indicator, gaussian };

// indicator: 1_{|z| < radius};  gaussian: exp(-|z|^2 / radius^2)
struct Integrable {
  Profile profile = Profile::indicator;
  double radius = 1.0;
};

// User-supplied evaluator. It is integrated numerically up to truncation_radius;
// the mass beyond it is not computed, only bounded by tail_bound.
struct Custom {
  std::function<double(const Point&)> evaluator;
  double singular_exponent = 0.0;
  bool integrable = false;
  double truncation_radius = 1.0;
  double tail_bound = 0.0;
  std::string label = "custom";
};

using KernelParams = std::variant<Fractional, ZeroOrder, Anisotropic, Integrable, Custom>;

// Symmetric nonnegative jump kernel on R^N (N = 1 or 2). Immutable after
// construction; every query is const and thread-safe.
class Kernel {
 public:
  Kernel(int dim, KernelParams params);

  static Kernel fractional(int dim, double alpha) { return {dim, Fractional{alpha}}; }
  static Kernel zero_order(int dim, double beta, double cutoff = 1.0) {
    return {dim, ZeroOrder{beta, cutoff}};
  }
  static Kernel indicator(int dim, double radius = 1.0) {
    return {dim, Integrable{Profile::indicator, radius}};
  }
  static Kernel gaussian(int dim, double radius = 1.0) {
    return {dim, Integrable{Profile::gaussian, radius}};
  }
  static Kernel anisotropic(Eigen::MatrixXd metric, double alpha) {
    const int n = static_cast<int>(metric.rows());
    return {n, Anisotropic{std::move(metric), alpha}};
  }

  int dim() const noexcept { return dim_; }
  KernelFamily family() const noexcept;
  const KernelParams& params() const noexcept { return params_; }
  std::string name() const;

  // May return +inf at the origin.
  double operator()(const Point& z) const;

  double singular_exponent() const;
  bool integrable() const;
  bool radial() const;
  double support_radius() const;
  bool closed_form_tails() const { return family() != KernelFamily::custom; }
  // Unresolved exterior mass: the custom tail bound, zero for built-in families.
  double tail_uncertainty() const;

  // Radial tail along a unit direction: int_r^inf j(rho dir) rho^{N-1} drho.
  double direction_tail(double r, const Point& dir) const;

  double mass_outside_ball(double r) const;
  // Mass outside the centered box prod_i [-hw_i, hw_i].
  double mass_outside_box(std::span<const double> half_widths) const;
  // Mass of the slab complement {|z_1| > w}.
  double mass_outside_slab(double w) const;
  double total_mass() const { return mass_outside_ball(0.0); }

  // int over the axis-aligned cell [lo, hi]; +inf for a cell holding the
  // origin when j is not integrable there.
  double cell_mass(const Point& lo, const Point& hi) const;

 private:
  double radial_value(double rho) const;
  double radial_shell_1d(double a, double b) const;
  double angular_integral(const std::function<double(const Point&)>& f,
                          std::vector<double> breaks) const;
  double numeric_cell_2d(const Point& lo, const Point& hi) const;

  int dim_;
  KernelParams params_;
};

// A kernel restricted to the complement of the open ball B_delta.
struct TruncatedKernel {
  Kernel base;
  double delta;
  double l1_norm;

  double operator()(const Point& z) const { return z.norm() < delta ? 0.0 : base(z); }
  // Normalized weight j_delta / ||j_delta||_1.
  double weight(const Point& z) const { return (*this)(z) / l1_norm; }
};

struct LevyReport {
  std::vector<double> estimates;  // one per refinement level
  double tail = 0.0;              // mass beyond |z| = 1
  double tail_uncertainty = 0.0;
  bool converged = false;
  bool a1_violated = false;
  std::string diagnostic;
};

struct NonIntegrabilityReport {
  std::vector<double> deltas;
  std::vector<double> l1_norms;
  bool divergent = false;
};

// Successive estimates of int min{1,|z|^2} j over shells reaching down to 2^{-8 l}.
LevyReport check_levy(const Kernel& kernel, int refinement_levels);

NonIntegrabilityReport check_non_integrable(const Kernel& kernel, std::span<const double> deltas,
                                            double threshold = 1e6);

TruncatedKernel truncate(const Kernel& kernel, double delta);

// int min{1,|z|^2} j(z) dz, to quadrature accuracy.
double levy_integral(const Kernel& kernel);

}  // namespace nloc
