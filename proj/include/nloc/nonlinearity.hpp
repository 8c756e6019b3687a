#pragma once

#include <functional>
#include <string>

namespace nloc {

enum class NonlinearityFamily { rational_quartic, integrated_sigmoid, zero, custom };

// Scalar nonlinearity F with F(0) = 0, F <= c_inf t^2 and F(t)/t^2
// nondecreasing in |t|.
class Nonlinearity {
 public:
  // t^4 / (1 + t^2), c_inf = 1
  static Nonlinearity rational_quartic();
  // int_0^t s^3 / (1 + s^2) ds = (t^2 - log(1 + t^2)) / 2, c_inf = 1/2
  static Nonlinearity integrated_sigmoid();
  // F = 0
  static Nonlinearity zero();
  // Without a derivative, F' comes from central differences with step 1e-6 (1 + |t|).
  static Nonlinearity custom(std::function<double(double)> f, double c_infinity,
                             std::function<double(double)> derivative = {}, std::string label = "custom");

  double operator()(double t) const;
  double derivative(double t) const;
  double c_infinity() const noexcept { return c_inf_; }
  NonlinearityFamily family() const noexcept { return family_; }
  const std::string& name() const noexcept { return name_; }

  // sup_{0 < |t| <= eps} |F(t)| / t^2
  double c_epsilon(double eps) const;

 private:
  Nonlinearity(NonlinearityFamily family, std::string name, double c_inf)
      : family_(family), name_(std::move(name)), c_inf_(c_inf) {}

  NonlinearityFamily family_;
  std::string name_;
  double c_inf_;
  std::function<double(double)> f_;
  std::function<double(double)> df_;
};

struct NonlinearityAudit {
  bool vanishes_at_zero = false;
  bool nonnegative = false;
  bool quadratic_bound = false;  // F(t) <= c_inf t^2
  bool ratio_monotone = false;   // F(t)/t^2 nondecreasing on t > 0, nonincreasing on t < 0
};

// Checks the structural conditions on a symmetric sample of [-t_max, t_max].
NonlinearityAudit audit(const Nonlinearity& f, double t_max = 50.0, int samples = 4001);

}  // namespace nloc
