#include "wavebasis/relevance.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace wavebasis {

namespace {

void check_decay(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("relevance decay must lie in (0, 1)");
}

double read_out(const RelevanceStats& stats, double acc, double eps) {
  if (stats.samples <= 1) return 0.0;
  const double t = static_cast<double>(stats.samples);
  return (t - 1.0) / t * stats.omega * (1.0 - eps) * acc;
}

}  // namespace

void record(RelevanceStats& stats, double phi_value, double delta, double eps) {
  check_decay(eps);
  stats.samples += 1;
  stats.acc_rho = eps * stats.acc_rho + delta * phi_value;
  stats.acc_obs = eps * stats.acc_obs + std::abs(delta) * phi_value;
  // Holds for nonnegative features, which all B-spline products are.
  assert(phi_value < 0.0 ||
         stats.acc_obs + 1e-12 * std::abs(stats.acc_obs) >= std::abs(stats.acc_rho));
}

double rho(const RelevanceStats& stats, double eps) {
  check_decay(eps);
  return read_out(stats, stats.acc_rho, eps);
}

double obs(const RelevanceStats& stats, double eps) {
  check_decay(eps);
  return read_out(stats, stats.acc_obs, eps);
}

double criterion(const RelevanceStats& stats, double eps) { return obs(stats, eps) - rho(stats, eps); }

}  // namespace wavebasis
