// Test-only reference computations, independent of the library code paths
// they are compared against.
#ifndef WAVEBASIS_TESTS_ORACLES_HPP
#define WAVEBASIS_TESTS_ORACLES_HPP

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace oracle {

/// Composite Simpson rule with `intervals` (even) subintervals.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, std::size_t intervals) {
  if (intervals % 2) ++intervals;
  const double h = (hi - lo) / static_cast<double>(intervals);
  double sum = f(lo) + f(hi);
  for (std::size_t i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(lo + h * static_cast<double>(i));
  return sum * h / 3.0;
}

/// Simpson on each knot interval separately, sampling the endpoints just
/// inside the interval so one-sided limits are used at jumps.
inline double piecewise_simpson(const std::function<double(double)>& f, double lo, double hi, double knot_step,
                                std::size_t intervals_per_piece) {
  double total = 0.0;
  for (double a = lo; a < hi - 1e-15; a += knot_step) {
    const double b = std::min(a + knot_step, hi);
    const double a_in = std::nextafter(a, b), b_in = std::nextafter(b, a);
    total += simpson(f, a_in, b_in, intervals_per_piece);
  }
  return total;
}

/// Textbook B-spline via the Cox-de Boor recursion on integer knots 0..n+1.
inline double cox_de_boor(int n, double x) {
  if (n == 0) return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0;
  return (x * cox_de_boor(n - 1, x) + (n + 1 - x) * cox_de_boor(n - 1, x - 1.0)) / n;
}

/// H(phi, E) evaluated from its sum definition over a recorded trace of
/// E(s_t) * phi(s_t) products, t = 1..T.
inline double h_sum(const std::vector<double>& products, double omega, double eps) {
  const std::size_t t_count = products.size();
  if (t_count == 0) return 0.0;
  double sum = 0.0;
  for (std::size_t t = 1; t <= t_count; ++t) {
    sum += std::pow(eps, static_cast<double>(t_count - t)) * products[t - 1];
  }
  const double tt = static_cast<double>(t_count);
  return (tt - 1.0) / tt * omega * (1.0 - eps) * sum;
}

}  // namespace oracle

#endif
