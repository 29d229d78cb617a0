#ifndef WAVEBASIS_ADAPTIVE_HPP
#define WAVEBASIS_ADAPTIVE_HPP

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wavebasis/basis.hpp"
#include "wavebasis/relevance.hpp"

namespace wavebasis {

inline constexpr double kNever = std::numeric_limits<double>::infinity();

struct AdaptiveConfig {
  double tau_split = kNever;
  double tau_combine = kNever;
  double eps = kDefaultRelevanceDecay;
  std::uint64_t check_interval = 100;
  int max_scale = 6;
  std::size_t max_features = 10'000;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

enum class AdaptiveMode { none, awr, ibfdd, mawb };

enum class EditKind { split, combine };

struct EditRecord {
  EditKind kind = EditKind::split;
  std::vector<FeatureId> removed;
  std::vector<FeatureId> added;
  double score = 0.0;  ///< C for splits, rho for combines
  std::size_t basis_size = 0;
  std::uint64_t step = 0;
  int episode = 0;
};

using RelevanceTable = std::unordered_map<FeatureId, RelevanceStats>;

/// Replaces feature `id` by the children of its atom along `dim`, each
/// carrying parent weight and trace times the mask coefficient. Children
/// that vanish on [0,1] are dropped and children that already exist absorb
/// the contribution. Returns the ids that received mass, in mask order.
///
/// Throws std::out_of_range for an unknown id, std::invalid_argument for a
/// Fourier feature or a dimension without an atom, std::length_error when
/// the atom is already at `max_scale`.
std::vector<FeatureId> split_feature(BasisSet& basis, FeatureId id, int dim,
                                     int max_scale = std::numeric_limits<int>::max());

/// Adds the product of two features with zero weight. Returns nullopt when
/// the product is already in the basis.
std::optional<FeatureId> combine_features(BasisSet& basis, FeatureId first, FeatureId second);

/// Coarsest atom of `f` that can still be refined, ties to the lowest dim.
std::optional<int> split_dimension(const BasisFunction& f, int max_scale);

/// Pairs of co-active features over disjoint dimensions, each with the
/// relevance of their product.
class CandidatePool {
 public:
  using Key = std::pair<FeatureId, FeatureId>;

  /// Ensures every eligible active pair is present and records delta
  /// against each pair's product value.
  void observe(const BasisSet& basis, std::span<const ActiveFeature> active, double delta, double eps);

  /// Drops candidates that reference `id`.
  void forget(FeatureId id);
  void erase(const Key& key) { pool_.erase(key); }

  const std::map<Key, RelevanceStats>& entries() const { return pool_; }
  std::size_t size() const { return pool_.size(); }

 private:
  std::map<Key, RelevanceStats> pool_;
};

/// Records delta for every active wavelet feature.
void observe_relevance(RelevanceTable& table, const BasisSet& basis,
                       std::span<const ActiveFeature> active, double delta, double eps);

/// Splits the refinable feature with the largest C when it exceeds tau_split.
std::optional<EditRecord> awr_check(BasisSet& basis, RelevanceTable& stats, CandidatePool* pool,
                                    const AdaptiveConfig& config, std::string* skip_reason = nullptr);

/// Adds the candidate product with the largest |rho| when it exceeds tau_combine.
std::optional<EditRecord> ibfdd_check(BasisSet& basis, CandidatePool& pool, RelevanceTable& stats,
                                      const AdaptiveConfig& config, std::string* skip_reason = nullptr);

/// At multiples of check_interval runs both checks, IBFDD first on even
/// checks and AWR first on odd ones; at most one edit per check.
std::optional<EditRecord> mawb_step(BasisSet& basis, RelevanceTable& stats, CandidatePool& pool,
                                    const AdaptiveConfig& config, std::uint64_t step_count);

/// Owns the relevance bookkeeping for one agent and dispatches checks
/// according to the chosen scheme.
class AdaptiveController {
 public:
  AdaptiveController(AdaptiveMode mode, AdaptiveConfig config);

  AdaptiveMode mode() const { return mode_; }
  const AdaptiveConfig& config() const { return config_; }

  /// Called once per environment step with the features active at s_t.
  void observe(const BasisSet& basis, std::span<const ActiveFeature> active, double delta);

  /// Called once per environment step after the weight update.
  std::optional<EditRecord> on_step(BasisSet& basis, std::uint64_t step_count);

  const RelevanceTable& relevance() const { return stats_; }
  const CandidatePool& candidates() const { return pool_; }
  std::uint64_t edit_count() const { return edits_; }

 private:
  AdaptiveMode mode_;
  AdaptiveConfig config_;
  RelevanceTable stats_;
  CandidatePool pool_;
  std::uint64_t edits_ = 0;
};

const char* to_string(EditKind kind);
const char* to_string(AdaptiveMode mode);

}  // namespace wavebasis

#endif
