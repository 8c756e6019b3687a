#include "nloc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>

namespace nloc::quad {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
// Gauss weights for kXgk[1], kXgk[3], kXgk[5], kXgk[7].
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

Segment rule(const Integrand& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double r = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int i = 0; i < 7; ++i) {
    const double dx = r * kXgk[i];
    const double s = f(c - dx) + f(c + dx);
    kronrod += kWgk[i] * s;
    if (i % 2 == 1) gauss += kWg[i / 2] * s;
  }
  return {a, b, kronrod * r, std::abs((kronrod - gauss) * r)};
}

}  // namespace

Result gauss_kronrod(const Integrand& f, double a, double b, const Options& opt) {
  if (a == b) return {};
  std::priority_queue<Segment> heap;
  Segment first = rule(f, a, b);
  double total = first.value;
  double err = first.error;
  heap.push(first);
  int count = 1;
  while (err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) && count < opt.max_intervals) {
    Segment worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) break;
    heap.pop();
    Segment left = rule(f, worst.a, mid);
    Segment right = rule(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++count;
  }
  // Re-sum to shed the drift of the running updates.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return {total, err, count};
}

Result gauss_kronrod(const Integrand& f, double a, double b, std::span<const double> breaks,
                     const Options& opt) {
  std::vector<double> pts{a};
  for (double p : breaks)
    if (p > std::min(a, b) && p < std::max(a, b)) pts.push_back(p);
  pts.push_back(b);
  if (a < b)
    std::sort(pts.begin(), pts.end());
  else
    std::sort(pts.begin(), pts.end(), std::greater<>());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  Result out;
  Options piece = opt;
  piece.max_intervals = std::max(16, opt.max_intervals / static_cast<int>(pts.size() - 1));
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const Result r = gauss_kronrod(f, pts[i], pts[i + 1], piece);
    out.value += r.value;
    out.error += r.error;
    out.intervals += r.intervals;
  }
  return out;
}

Result gauss_kronrod_to_infinity(const Integrand& f, double a, const Options& opt) {
  auto g = [&](double t) {
    const double s = 1.0 - t;
    return f(a + t / s) / (s * s);
  };
  return gauss_kronrod(g, 0.0, 1.0, opt);
}

}  // namespace nloc::quad
