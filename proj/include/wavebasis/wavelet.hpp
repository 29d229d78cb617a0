#ifndef WAVEBASIS_WAVELET_HPP
#define WAVEBASIS_WAVELET_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace wavebasis {

/// Highest B-spline order supported by the library.
inline constexpr int kMaxOrder = 2;

/// Thrown when a spline order outside [0, kMaxOrder] is requested.
class unsupported_order : public std::domain_error {
 public:
  explicit unsupported_order(int order);
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi > lo ? hi - lo : 0.0; }
  bool contains(double x) const { return x >= lo && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// One dilated and translated B-spline father wavelet acting on a single
/// state dimension: 2^(j/2) * nu_n * B_n(2^j x - k).
///
/// Atoms are plain values. Two atoms are the same feature factor iff all four
/// fields match; the ordering sorts by dimension first so that a sorted atom
/// list reads left-to-right over the state vector.
struct WaveletAtom {
  int dim = 0;
  int order = 0;
  int scale = 0;
  int translation = 0;

  friend auto operator<=>(const WaveletAtom&, const WaveletAtom&) = default;
};

/// Two-scale coefficients for normalized atoms: an atom (n, j, k) equals
/// sum_t coeffs[t] * atom(n, j+1, 2k+t).
struct RefinementMask {
  int order = 0;
  int dilation = 2;
  std::vector<double> coeffs;
};

/// Unnormalized cardinal B-spline of the given order, supported on
/// [0, order+1]. Order 0 is the half-open indicator of [0, 1) so that
/// translates tile the line without overlap.
double eval_bspline_raw(int order, double x);

/// 1 / ||B_n||_2.
double normalization_constant(int order);

double eval_atom(const WaveletAtom& atom, double x);

RefinementMask refinement_mask(int order);

/// Closed support [k/2^j, (k+n+1)/2^j].
Interval atom_support(const WaveletAtom& atom);

/// Translations -n <= k < 2^j whose atoms meet the unit interval.
std::vector<int> unit_interval_translations(int order, int scale);

void check_order(int order);

}  // namespace wavebasis

#endif
