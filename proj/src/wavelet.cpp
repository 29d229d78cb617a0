#include "wavebasis/wavelet.hpp"

#include <cmath>
#include <string>

namespace wavebasis {

namespace {

// 1/sqrt(integral of B_n^2). The integrals are 1, 2/3 and 11/20; the unit
// tests re-derive them by quadrature.
constexpr std::array<double, kMaxOrder + 1> kNormalization = {
    1.0,
    1.2247448713915890491,  // sqrt(3/2)
    1.3483997249264841444,  // sqrt(20/11)
};

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

}  // namespace

unsupported_order::unsupported_order(int order)
    : std::domain_error("unimplemented B-spline order " + std::to_string(order) +
                        " (supported: 0.." + std::to_string(kMaxOrder) + ")") {}

void check_order(int order) {
  if (order < 0 || order > kMaxOrder) throw unsupported_order(order);
}

double eval_bspline_raw(int order, double x) {
  switch (order) {
    case 0:
      return (x >= 0.0 && x < 1.0) ? 1.0 : 0.0;
    case 1:
      if (x < 0.0 || x > 2.0) return 0.0;
      return x <= 1.0 ? x : 2.0 - x;
    case 2: {
      if (x < 0.0 || x > 3.0) return 0.0;
      if (x <= 1.0) return 0.5 * x * x;
      if (x <= 2.0) {
        const double u = x - 1.5;
        return 0.75 - u * u;
      }
      // Standard quadratic B-spline tail; (x-3)^3 would break continuity.
      const double u = 3.0 - x;
      return 0.5 * u * u;
    }
    default:
      throw unsupported_order(order);
  }
}

double normalization_constant(int order) {
  check_order(order);
  return kNormalization[static_cast<std::size_t>(order)];
}

double eval_atom(const WaveletAtom& atom, double x) {
  const double dilated = std::ldexp(x, atom.scale) - atom.translation;
  const double raw = eval_bspline_raw(atom.order, dilated);
  if (raw == 0.0) return 0.0;
  return std::sqrt(std::ldexp(1.0, atom.scale)) * normalization_constant(atom.order) * raw;
}

RefinementMask refinement_mask(int order) {
  check_order(order);
  RefinementMask mask;
  mask.order = order;
  mask.dilation = 2;
  const double base = std::pow(2.0, -order - 0.5);
  for (int t = 0; t <= order + 1; ++t) mask.coeffs.push_back(base * binomial(order + 1, t));
  return mask;
}

Interval atom_support(const WaveletAtom& atom) {
  return {std::ldexp(static_cast<double>(atom.translation), -atom.scale),
          std::ldexp(static_cast<double>(atom.translation + atom.order + 1), -atom.scale)};
}

std::vector<int> unit_interval_translations(int order, int scale) {
  check_order(order);
  if (scale < 0) throw std::invalid_argument("scale must be non-negative");
  std::vector<int> out;
  const int upper = 1 << scale;
  for (int k = -order; k < upper; ++k) out.push_back(k);
  return out;
}

}  // namespace wavebasis
