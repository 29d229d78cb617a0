#ifndef WAVEBASIS_BASIS_HPP
#define WAVEBASIS_BASIS_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "wavebasis/wavelet.hpp"

namespace wavebasis {

using FeatureId = std::uint64_t;

enum class FeatureKind { wavelet, fourier };

/// Default refusal threshold for basis construction.
inline constexpr std::size_t kDefaultSizeCap = 1'000'000;

/// A single linear feature: either a product of wavelet atoms over pairwise
/// distinct dimensions, or a Fourier cosine term cos(pi c . s).
class BasisFunction {
 public:
  /// Atoms are sorted by dimension. Throws if two atoms share a dimension.
  static BasisFunction product(std::vector<WaveletAtom> atoms);
  static BasisFunction fourier(std::vector<int> coeffs);

  FeatureKind kind() const { return kind_; }
  const std::vector<WaveletAtom>& atoms() const { return atoms_; }
  const std::vector<int>& coefficients() const { return coeffs_; }

  /// Atom acting on `dim`, or nullptr when the function is constant along it.
  const WaveletAtom* atom_in(int dim) const;

  /// Full value at `s`. Dimensions without an atom contribute a factor 1.
  double value(std::span<const double> s) const;

  /// Per-dimension support; unconstrained dimensions span the whole line.
  std::vector<Interval> support_box(int dims) const;

  /// True when the two functions touch disjoint sets of dimensions.
  bool disjoint_dims(const BasisFunction& other) const;

  /// Product of two wavelet functions over disjoint dimensions.
  BasisFunction times(const BasisFunction& other) const;

  /// Step-size multiplier: 1 for wavelets, 1/||c||_2 for Fourier terms (1 for c = 0).
  double learning_rate_scale() const { return lr_scale_; }

  /// Canonical structural key; equal keys mean the same feature.
  std::vector<int> key() const;

  friend bool operator==(const BasisFunction&, const BasisFunction&) = default;

 private:
  FeatureKind kind_ = FeatureKind::wavelet;
  std::vector<WaveletAtom> atoms_;
  std::vector<int> coeffs_;
  double lr_scale_ = 1.0;
};

/// Measure of the function's support clipped to the unit box. Throws
/// std::logic_error for Fourier terms.
double support_volume(const BasisFunction& f);

struct ActiveFeature {
  std::size_t index = 0;
  FeatureId id = 0;
  double value = 0.0;
};

/// Clamps a state into [0, 1) per coordinate. The open upper end keeps the
/// last order-0 tile active at the domain boundary.
std::vector<double> clamp_state(std::span<const double> s);

/// Ordered set of features plus per-action weight and eligibility-trace
/// vectors. Ids are append-only and never reused.
class BasisSet {
 public:
  BasisSet(int dims, std::size_t num_actions);

  int dims() const { return dims_; }
  std::size_t num_actions() const { return weights_.size(); }
  std::size_t size() const { return functions_.size(); }
  bool empty() const { return functions_.empty(); }

  const std::vector<BasisFunction>& functions() const { return functions_; }
  const BasisFunction& function(std::size_t index) const { return functions_.at(index); }
  FeatureId id_at(std::size_t index) const { return ids_.at(index); }
  const std::vector<FeatureId>& ids() const { return ids_; }
  FeatureId next_id() const { return next_id_; }

  std::vector<double>& weights(std::size_t action) { return weights_.at(action); }
  const std::vector<double>& weights(std::size_t action) const { return weights_.at(action); }
  std::vector<double>& traces(std::size_t action) { return traces_.at(action); }
  const std::vector<double>& traces(std::size_t action) const { return traces_.at(action); }

  /// Appends a feature. `weights`/`traces`, when given, hold one entry per
  /// action; otherwise zeros. Throws if an identical feature exists.
  FeatureId add(BasisFunction f, std::span<const double> weights = {},
                std::span<const double> traces = {});

  /// As add(), but with a caller-chosen id (used when restoring from disk).
  void restore(FeatureId id, BasisFunction f, std::span<const double> weights);
  void set_next_id(FeatureId next);

  void remove(FeatureId id);

  std::optional<std::size_t> index_of(FeatureId id) const;
  std::optional<FeatureId> find(const BasisFunction& f) const;
  bool contains(FeatureId id) const { return index_.contains(id); }

  /// Nonzero features at `s` (clamped first). Fourier terms are always listed.
  std::vector<ActiveFeature> active_features(std::span<const double> s) const;
  void active_features(std::span<const double> s, std::vector<ActiveFeature>& out) const;

  void clear_traces();

 private:
  void check_dims(const BasisFunction& f) const;
  void insert(FeatureId id, BasisFunction f, std::span<const double> weights,
              std::span<const double> traces);
  void reindex();

  int dims_;
  std::vector<BasisFunction> functions_;
  std::vector<FeatureId> ids_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> traces_;
  std::unordered_map<FeatureId, std::size_t> index_;
  std::map<std::vector<int>, FeatureId> by_key_;
  FeatureId next_id_ = 0;
};

/// Every d-fold tensor product of the per-dimension atoms (n + 2^j)^d terms.
BasisSet build_fixed_coupled(int dims, int order, int scale, std::size_t num_actions = 1,
                             std::size_t size_cap = kDefaultSizeCap);

/// One feature per single atom: (n + 2^j) * d terms, no bias.
BasisSet build_decoupled(int dims, int order, int scale, std::size_t num_actions = 1,
                         std::size_t size_cap = kDefaultSizeCap);

/// All coefficient vectors in [0, order]^d.
BasisSet build_fourier(int dims, int order, std::size_t num_actions = 1,
                       std::size_t size_cap = kDefaultSizeCap);

/// Line-oriented text format: a header, then one function per line with its
/// per-action weights. Traces are not stored.
void write_basis(std::ostream& out, const BasisSet& basis);
BasisSet read_basis(std::istream& in);

}  // namespace wavebasis

#endif
