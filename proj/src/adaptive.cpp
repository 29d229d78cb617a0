#include "wavebasis/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wavebasis {

void AdaptiveConfig::validate() const {
  if (!(tau_split >= 0.0)) throw std::invalid_argument("tau_split must be >= 0");
  if (!(tau_combine >= 0.0)) throw std::invalid_argument("tau_combine must be >= 0");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("relevance decay must lie in (0, 1)");
  if (check_interval < 1) throw std::invalid_argument("check_interval must be >= 1");
  if (max_scale < 0) throw std::invalid_argument("max_scale must be >= 0");
  if (max_features < 1) throw std::invalid_argument("max_features must be >= 1");
}

const char* to_string(EditKind kind) { return kind == EditKind::split ? "split" : "combine"; }

const char* to_string(AdaptiveMode mode) {
  switch (mode) {
    case AdaptiveMode::none: return "none";
    case AdaptiveMode::awr: return "awr";
    case AdaptiveMode::ibfdd: return "ibfdd";
    case AdaptiveMode::mawb: return "mawb";
  }
  return "?";
}

std::vector<FeatureId> split_feature(BasisSet& basis, FeatureId id, int dim, int max_scale) {
  const auto idx = basis.index_of(id);
  if (!idx) throw std::out_of_range("unknown feature id " + std::to_string(id));
  const BasisFunction parent = basis.function(*idx);
  if (parent.kind() != FeatureKind::wavelet) throw std::invalid_argument("Fourier features cannot be split");
  const WaveletAtom* found = parent.atom_in(dim);
  if (found == nullptr) {
    throw std::invalid_argument("feature " + std::to_string(id) + " has no atom in dimension " + std::to_string(dim));
  }
  const WaveletAtom atom = *found;
  if (atom.scale >= max_scale) throw std::length_error("scale cap reached for feature " + std::to_string(id));

  const std::size_t actions = basis.num_actions();
  std::vector<double> w(actions), e(actions);
  for (std::size_t a = 0; a < actions; ++a) {
    w[a] = basis.weights(a)[*idx];
    e[a] = basis.traces(a)[*idx];
  }
  basis.remove(id);

  const RefinementMask mask = refinement_mask(atom.order);
  std::vector<FeatureId> touched;
  std::vector<double> cw(actions), ce(actions);
  for (std::size_t t = 0; t < mask.coeffs.size(); ++t) {
    const WaveletAtom child{atom.dim, atom.order, atom.scale + 1, 2 * atom.translation + static_cast<int>(t)};
    const Interval s = atom_support(child);
    if (s.hi < 0.0 || s.lo > 1.0) continue;  // disjoint from the unit interval

    std::vector<WaveletAtom> atoms = parent.atoms();
    for (auto& a : atoms) {
      if (a.dim == dim) a = child;
    }
    BasisFunction f = BasisFunction::product(std::move(atoms));
    const double c = mask.coeffs[t];
    for (std::size_t a = 0; a < actions; ++a) {
      cw[a] = w[a] * c;
      ce[a] = e[a] * c;
    }
    if (const auto existing = basis.find(f)) {
      const std::size_t j = *basis.index_of(*existing);
      for (std::size_t a = 0; a < actions; ++a) {
        basis.weights(a)[j] += cw[a];
        basis.traces(a)[j] += ce[a];
      }
      touched.push_back(*existing);
    } else {
      touched.push_back(basis.add(std::move(f), cw, ce));
    }
  }
  return touched;
}

std::optional<FeatureId> combine_features(BasisSet& basis, FeatureId first, FeatureId second) {
  const auto i = basis.index_of(first);
  const auto j = basis.index_of(second);
  if (!i) throw std::out_of_range("unknown feature id " + std::to_string(first));
  if (!j) throw std::out_of_range("unknown feature id " + std::to_string(second));
  const auto& f = basis.function(*i);
  const auto& g = basis.function(*j);
  if (f.kind() != FeatureKind::wavelet || g.kind() != FeatureKind::wavelet) {
    throw std::invalid_argument("only wavelet features can be combined");
  }
  if (!f.disjoint_dims(g)) throw std::invalid_argument("combined features must act on disjoint dimensions");
  BasisFunction product = f.times(g);
  if (basis.find(product)) return std::nullopt;
  return basis.add(std::move(product));
}

std::optional<int> split_dimension(const BasisFunction& f, int max_scale) {
  if (f.kind() != FeatureKind::wavelet) return std::nullopt;
  std::optional<int> best;
  int best_scale = 0;
  for (const auto& a : f.atoms()) {  // sorted by dim
    if (a.scale >= max_scale) continue;
    if (!best || a.scale < best_scale) {
      best = a.dim;
      best_scale = a.scale;
    }
  }
  return best;
}

void CandidatePool::observe(const BasisSet& basis, std::span<const ActiveFeature> active, double delta,
                            double eps) {
  for (std::size_t p = 0; p < active.size(); ++p) {
    const auto& fp = basis.function(active[p].index);
    if (fp.kind() != FeatureKind::wavelet) continue;
    for (std::size_t q = p + 1; q < active.size(); ++q) {
      const auto& fq = basis.function(active[q].index);
      if (fq.kind() != FeatureKind::wavelet || !fp.disjoint_dims(fq)) continue;
      const Key key = std::minmax(active[p].id, active[q].id);
      auto it = pool_.find(key);
      if (it == pool_.end()) {
        const BasisFunction product = fp.times(fq);
        if (basis.find(product)) continue;
        it = pool_.emplace(key, RelevanceStats{.omega = support_volume(product)}).first;
      }
      record(it->second, active[p].value * active[q].value, delta, eps);
    }
  }
}

void CandidatePool::forget(FeatureId id) {
  std::erase_if(pool_, [id](const auto& entry) { return entry.first.first == id || entry.first.second == id; });
}

void observe_relevance(RelevanceTable& table, const BasisSet& basis, std::span<const ActiveFeature> active,
                       double delta, double eps) {
  for (const auto& af : active) {
    const auto& f = basis.function(af.index);
    if (f.kind() != FeatureKind::wavelet) continue;
    auto it = table.find(af.id);
    if (it == table.end()) it = table.emplace(af.id, RelevanceStats{.omega = support_volume(f)}).first;
    record(it->second, af.value, delta, eps);
  }
}

std::optional<EditRecord> awr_check(BasisSet& basis, RelevanceTable& stats, CandidatePool* pool,
                                    const AdaptiveConfig& config, std::string* skip_reason) {
  std::optional<std::size_t> best;
  double best_c = 0.0;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto it = stats.find(basis.id_at(i));
    if (it == stats.end()) continue;
    if (!split_dimension(basis.function(i), config.max_scale)) continue;
    const double c = criterion(it->second, config.eps);
    if (!best || c > best_c) {
      best = i;
      best_c = c;
    }
  }
  if (!best || !(best_c > config.tau_split)) {
    if (skip_reason) *skip_reason = "no feature above tau_split";
    return std::nullopt;
  }
  const BasisFunction& f = basis.function(*best);
  const int dim = *split_dimension(f, config.max_scale);
  const int order = f.atom_in(dim)->order;
  // n+2 children replace one parent
  if (basis.size() + static_cast<std::size_t>(order) + 1 > config.max_features) {
    if (skip_reason) *skip_reason = "feature budget exhausted";
    return std::nullopt;
  }

  const FeatureId parent = basis.id_at(*best);
  const auto touched_before = basis.next_id();
  EditRecord rec;
  rec.kind = EditKind::split;
  rec.removed = {parent};
  rec.added = split_feature(basis, parent, dim, config.max_scale);
  rec.score = best_c;
  rec.basis_size = basis.size();

  stats.erase(parent);
  for (FeatureId id : rec.added) {
    if (id >= touched_before) stats.erase(id);  // fresh ids start with no history
  }
  if (pool) pool->forget(parent);
  return rec;
}

std::optional<EditRecord> ibfdd_check(BasisSet& basis, CandidatePool& pool, RelevanceTable& stats,
                                      const AdaptiveConfig& config, std::string* skip_reason) {
  std::optional<CandidatePool::Key> best;
  double best_r = 0.0;
  for (const auto& [key, s] : pool.entries()) {
    const double r = std::abs(rho(s, config.eps));
    if (!best || r > best_r) {
      best = key;
      best_r = r;
    }
  }
  if (!best || !(best_r > config.tau_combine)) {
    if (skip_reason) *skip_reason = "no candidate above tau_combine";
    return std::nullopt;
  }
  if (basis.size() + 1 > config.max_features) {
    if (skip_reason) *skip_reason = "feature budget exhausted";
    return std::nullopt;
  }
  const CandidatePool::Key key = *best;
  pool.erase(key);
  if (!basis.contains(key.first) || !basis.contains(key.second)) {
    if (skip_reason) *skip_reason = "stale candidate";
    return std::nullopt;
  }
  const auto added = combine_features(basis, key.first, key.second);
  if (!added) {
    if (skip_reason) *skip_reason = "product already present";
    return std::nullopt;
  }
  stats.erase(*added);
  EditRecord rec;
  rec.kind = EditKind::combine;
  rec.removed = {};
  rec.added = {*added};
  rec.score = best_r;
  rec.basis_size = basis.size();
  return rec;
}

std::optional<EditRecord> mawb_step(BasisSet& basis, RelevanceTable& stats, CandidatePool& pool,
                                    const AdaptiveConfig& config, std::uint64_t step_count) {
  if (step_count == 0 || step_count % config.check_interval != 0) return std::nullopt;
  const bool combine_first = (step_count / config.check_interval) % 2 == 0;
  if (combine_first) {
    if (auto rec = ibfdd_check(basis, pool, stats, config)) return rec;
    return awr_check(basis, stats, &pool, config);
  }
  if (auto rec = awr_check(basis, stats, &pool, config)) return rec;
  return ibfdd_check(basis, pool, stats, config);
}

AdaptiveController::AdaptiveController(AdaptiveMode mode, AdaptiveConfig config)
    : mode_(mode), config_(config) {
  config_.validate();
}

void AdaptiveController::observe(const BasisSet& basis, std::span<const ActiveFeature> active, double delta) {
  if (mode_ == AdaptiveMode::awr || mode_ == AdaptiveMode::mawb) {
    observe_relevance(stats_, basis, active, delta, config_.eps);
  }
  if (mode_ == AdaptiveMode::ibfdd || mode_ == AdaptiveMode::mawb) {
    pool_.observe(basis, active, delta, config_.eps);
  }
}

std::optional<EditRecord> AdaptiveController::on_step(BasisSet& basis, std::uint64_t step_count) {
  if (step_count == 0 || step_count % config_.check_interval != 0) return std::nullopt;
  std::optional<EditRecord> rec;
  switch (mode_) {
    case AdaptiveMode::none:
      return std::nullopt;
    case AdaptiveMode::awr:
      rec = awr_check(basis, stats_, nullptr, config_);
      break;
    case AdaptiveMode::ibfdd:
      rec = ibfdd_check(basis, pool_, stats_, config_);
      break;
    case AdaptiveMode::mawb:
      rec = mawb_step(basis, stats_, pool_, config_, step_count);
      break;
  }
  if (rec) {
    rec->step = step_count;
    ++edits_;
  }
  return rec;
}

}  // namespace wavebasis
