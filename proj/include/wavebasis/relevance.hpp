#ifndef WAVEBASIS_RELEVANCE_HPP
#define WAVEBASIS_RELEVANCE_HPP

#include <cstdint>

namespace wavebasis {

inline constexpr double kDefaultRelevanceDecay = 0.99;

/// Exponentially decayed running sums of delta*phi and |delta|*phi for one
/// feature. The newest sample enters with weight 1; the (1 - eps) and
/// (T - 1)/T factors are applied when reading.
struct RelevanceStats {
  std::uint64_t samples = 0;
  double acc_rho = 0.0;
  double acc_obs = 0.0;
  double omega = 1.0;  ///< support volume of the feature within the unit box
};

/// Adds one sample where the feature was nonzero. Throws
/// std::invalid_argument unless 0 < eps < 1.
void record(RelevanceStats& stats, double phi_value, double delta, double eps);

/// Estimate of <phi, delta>.
double rho(const RelevanceStats& stats, double eps);

/// Estimate of <phi, |delta|>.
double obs(const RelevanceStats& stats, double eps);

/// obs - rho; large when the feature sees error of both signs.
double criterion(const RelevanceStats& stats, double eps);

}  // namespace wavebasis

#endif
