#include "wavebasis/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace wavebasis {

namespace {

constexpr double kStateUpper = 0x1.fffffffffffffp-1;  // nextafter(1, 0)

std::size_t checked_power(std::size_t base, int exponent, std::size_t cap) {
  std::size_t out = 1;
  for (int i = 0; i < exponent; ++i) {
    if (out > cap / std::max<std::size_t>(base, 1)) {
      throw std::length_error("basis would exceed the size cap of " + std::to_string(cap));
    }
    out *= base;
  }
  if (out > cap) throw std::length_error("basis would exceed the size cap of " + std::to_string(cap));
  return out;
}

void check_build_args(int dims, int order, int scale) {
  if (dims < 1) throw std::invalid_argument("state dimension must be at least 1");
  check_order(order);
  if (scale < 0) throw std::invalid_argument("scale must be non-negative");
  if (scale > 30) throw std::invalid_argument("scale too large");
}

}  // namespace

BasisFunction BasisFunction::product(std::vector<WaveletAtom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("wavelet feature needs at least one atom");
  std::sort(atoms.begin(), atoms.end());
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    check_order(atoms[i].order);
    if (atoms[i].dim < 0) throw std::invalid_argument("negative atom dimension");
    if (atoms[i].scale < 0) throw std::invalid_argument("negative atom scale");
    if (i > 0 && atoms[i].dim == atoms[i - 1].dim) {
      throw std::invalid_argument("atoms of one feature must act on distinct dimensions");
    }
  }
  BasisFunction f;
  f.kind_ = FeatureKind::wavelet;
  f.atoms_ = std::move(atoms);
  return f;
}

BasisFunction BasisFunction::fourier(std::vector<int> coeffs) {
  if (coeffs.empty()) throw std::invalid_argument("Fourier feature needs a coefficient vector");
  for (int c : coeffs) {
    if (c < 0) throw std::invalid_argument("Fourier coefficients must be non-negative");
  }
  BasisFunction f;
  f.kind_ = FeatureKind::fourier;
  f.coeffs_ = std::move(coeffs);
  double sq = 0.0;
  for (int c : f.coeffs_) sq += static_cast<double>(c) * c;
  f.lr_scale_ = sq == 0.0 ? 1.0 : 1.0 / std::sqrt(sq);
  return f;
}

const WaveletAtom* BasisFunction::atom_in(int dim) const {
  for (const auto& a : atoms_) {
    if (a.dim == dim) return &a;
  }
  return nullptr;
}

double BasisFunction::value(std::span<const double> s) const {
  if (kind_ == FeatureKind::fourier) {
    double dot = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) dot += coeffs_[i] * s[i];
    return std::cos(std::numbers::pi * dot);
  }
  double out = 1.0;
  for (const auto& a : atoms_) {
    out *= eval_atom(a, s[static_cast<std::size_t>(a.dim)]);
    if (out == 0.0) return 0.0;
  }
  return out;
}

std::vector<Interval> BasisFunction::support_box(int dims) const {
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<Interval> box(static_cast<std::size_t>(dims), Interval{-inf, inf});
  if (kind_ == FeatureKind::wavelet) {
    for (const auto& a : atoms_) box.at(static_cast<std::size_t>(a.dim)) = atom_support(a);
  }
  return box;
}

bool BasisFunction::disjoint_dims(const BasisFunction& other) const {
  for (const auto& a : atoms_) {
    if (other.atom_in(a.dim) != nullptr) return false;
  }
  return true;
}

BasisFunction BasisFunction::times(const BasisFunction& other) const {
  if (kind_ != FeatureKind::wavelet || other.kind_ != FeatureKind::wavelet) {
    throw std::invalid_argument("only wavelet features can be combined");
  }
  std::vector<WaveletAtom> atoms = atoms_;
  atoms.insert(atoms.end(), other.atoms_.begin(), other.atoms_.end());
  return product(std::move(atoms));
}

std::vector<int> BasisFunction::key() const {
  std::vector<int> k;
  k.push_back(static_cast<int>(kind_));
  if (kind_ == FeatureKind::fourier) {
    k.insert(k.end(), coeffs_.begin(), coeffs_.end());
  } else {
    for (const auto& a : atoms_) {
      k.insert(k.end(), {a.dim, a.order, a.scale, a.translation});
    }
  }
  return k;
}

double support_volume(const BasisFunction& f) {
  if (f.kind() != FeatureKind::wavelet) {
    throw std::logic_error("support volume is only defined for wavelet features");
  }
  double volume = 1.0;
  for (const auto& a : f.atoms()) {
    const Interval s = atom_support(a);
    volume *= Interval{std::max(s.lo, 0.0), std::min(s.hi, 1.0)}.length();
  }
  return volume;
}

std::vector<double> clamp_state(std::span<const double> s) {
  std::vector<double> out(s.begin(), s.end());
  for (auto& x : out) x = std::clamp(x, 0.0, kStateUpper);
  return out;
}

BasisSet::BasisSet(int dims, std::size_t num_actions)
    : dims_(dims), weights_(num_actions), traces_(num_actions) {
  if (dims < 1) throw std::invalid_argument("state dimension must be at least 1");
  if (num_actions < 1) throw std::invalid_argument("need at least one action");
}

void BasisSet::check_dims(const BasisFunction& f) const {
  if (f.kind() == FeatureKind::fourier) {
    if (f.coefficients().size() != static_cast<std::size_t>(dims_)) {
      throw std::invalid_argument("Fourier coefficient vector length differs from state dimension");
    }
    return;
  }
  for (const auto& a : f.atoms()) {
    if (a.dim >= dims_) throw std::invalid_argument("atom dimension out of range");
  }
}

FeatureId BasisSet::add(BasisFunction f, std::span<const double> weights,
                        std::span<const double> traces) {
  const FeatureId id = next_id_;
  insert(id, std::move(f), weights, traces);
  ++next_id_;
  return id;
}

void BasisSet::restore(FeatureId id, BasisFunction f, std::span<const double> weights) {
  if (index_.contains(id)) throw std::invalid_argument("duplicate feature id");
  insert(id, std::move(f), weights, {});
  next_id_ = std::max(next_id_, id + 1);
}

void BasisSet::insert(FeatureId id, BasisFunction f, std::span<const double> weights,
                      std::span<const double> traces) {
  check_dims(f);
  const std::size_t n_actions = num_actions();
  if (!weights.empty() && weights.size() != n_actions) {
    throw std::invalid_argument("need one initial weight per action");
  }
  if (!traces.empty() && traces.size() != n_actions) {
    throw std::invalid_argument("need one initial trace per action");
  }
  auto key = f.key();
  if (by_key_.contains(key)) throw std::invalid_argument("feature already present in basis");
  by_key_.emplace(std::move(key), id);
  index_.emplace(id, functions_.size());
  functions_.push_back(std::move(f));
  ids_.push_back(id);
  for (std::size_t a = 0; a < n_actions; ++a) {
    weights_[a].push_back(weights.empty() ? 0.0 : weights[a]);
    traces_[a].push_back(traces.empty() ? 0.0 : traces[a]);
  }
}

void BasisSet::set_next_id(FeatureId next) {
  for (FeatureId id : ids_) {
    if (id >= next) throw std::invalid_argument("next id must exceed every existing id");
  }
  next_id_ = next;
}

void BasisSet::remove(FeatureId id) {
  const auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown feature id " + std::to_string(id));
  const std::size_t idx = it->second;
  by_key_.erase(functions_[idx].key());
  functions_.erase(functions_.begin() + static_cast<std::ptrdiff_t>(idx));
  ids_.erase(ids_.begin() + static_cast<std::ptrdiff_t>(idx));
  for (std::size_t a = 0; a < num_actions(); ++a) {
    weights_[a].erase(weights_[a].begin() + static_cast<std::ptrdiff_t>(idx));
    traces_[a].erase(traces_[a].begin() + static_cast<std::ptrdiff_t>(idx));
  }
  reindex();
}

void BasisSet::reindex() {
  index_.clear();
  for (std::size_t i = 0; i < ids_.size(); ++i) index_.emplace(ids_[i], i);
}

std::optional<std::size_t> BasisSet::index_of(FeatureId id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<FeatureId> BasisSet::find(const BasisFunction& f) const {
  const auto it = by_key_.find(f.key());
  if (it == by_key_.end()) return std::nullopt;
  return it->second;
}

std::vector<ActiveFeature> BasisSet::active_features(std::span<const double> s) const {
  std::vector<ActiveFeature> out;
  active_features(s, out);
  return out;
}

void BasisSet::active_features(std::span<const double> s, std::vector<ActiveFeature>& out) const {
  if (s.size() != static_cast<std::size_t>(dims_)) {
    throw std::invalid_argument("state has " + std::to_string(s.size()) +
                                " dimensions, basis expects " + std::to_string(dims_));
  }
  out.clear();
  double clamped[16];
  std::vector<double> heap;
  double* x = clamped;
  if (s.size() > 16) {
    heap.resize(s.size());
    x = heap.data();
  }
  for (std::size_t i = 0; i < s.size(); ++i) x[i] = std::clamp(s[i], 0.0, kStateUpper);
  const std::span<const double> state(x, s.size());

  for (std::size_t i = 0; i < functions_.size(); ++i) {
    const auto& f = functions_[i];
    if (f.kind() == FeatureKind::fourier) {
      out.push_back({i, ids_[i], f.value(state)});
      continue;
    }
    bool inside = true;
    for (const auto& a : f.atoms()) {
      if (!atom_support(a).contains(state[static_cast<std::size_t>(a.dim)])) {
        inside = false;
        break;
      }
    }
    if (!inside) continue;
    const double v = f.value(state);
    if (v != 0.0) out.push_back({i, ids_[i], v});
  }
}

void BasisSet::clear_traces() {
  for (auto& t : traces_) std::fill(t.begin(), t.end(), 0.0);
}

namespace {

std::vector<std::vector<WaveletAtom>> atoms_per_dim(int dims, int order, int scale) {
  std::vector<std::vector<WaveletAtom>> out(static_cast<std::size_t>(dims));
  const auto ks = unit_interval_translations(order, scale);
  for (int d = 0; d < dims; ++d) {
    for (int k : ks) out[static_cast<std::size_t>(d)].push_back({d, order, scale, k});
  }
  return out;
}

}  // namespace

BasisSet build_fixed_coupled(int dims, int order, int scale, std::size_t num_actions,
                             std::size_t size_cap) {
  check_build_args(dims, order, scale);
  const std::size_t per_dim = static_cast<std::size_t>(order) + (std::size_t{1} << scale);
  const std::size_t total = checked_power(per_dim, dims, size_cap);
  const auto atoms = atoms_per_dim(dims, order, scale);

  BasisSet basis(dims, num_actions);
  std::vector<std::size_t> digit(static_cast<std::size_t>(dims), 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<WaveletAtom> term;
    term.reserve(digit.size());
    for (std::size_t d = 0; d < digit.size(); ++d) term.push_back(atoms[d][digit[d]]);
    basis.add(BasisFunction::product(std::move(term)));
    // odometer with the last dimension varying fastest
    for (std::size_t d = digit.size(); d-- > 0;) {
      if (++digit[d] < per_dim) break;
      digit[d] = 0;
    }
  }
  return basis;
}

BasisSet build_decoupled(int dims, int order, int scale, std::size_t num_actions,
                         std::size_t size_cap) {
  check_build_args(dims, order, scale);
  const std::size_t per_dim = static_cast<std::size_t>(order) + (std::size_t{1} << scale);
  if (per_dim * static_cast<std::size_t>(dims) > size_cap) {
    throw std::length_error("basis would exceed the size cap of " + std::to_string(size_cap));
  }
  BasisSet basis(dims, num_actions);
  for (const auto& dim_atoms : atoms_per_dim(dims, order, scale)) {
    for (const auto& a : dim_atoms) basis.add(BasisFunction::product({a}));
  }
  return basis;
}

BasisSet build_fourier(int dims, int order, std::size_t num_actions, std::size_t size_cap) {
  if (dims < 1) throw std::invalid_argument("state dimension must be at least 1");
  if (order < 0) throw std::invalid_argument("Fourier order must be non-negative");
  const std::size_t per_dim = static_cast<std::size_t>(order) + 1;
  const std::size_t total = checked_power(per_dim, dims, size_cap);
  BasisSet basis(dims, num_actions);
  std::vector<int> c(static_cast<std::size_t>(dims), 0);
  for (std::size_t n = 0; n < total; ++n) {
    basis.add(BasisFunction::fourier(c));
    for (std::size_t d = c.size(); d-- > 0;) {
      if (++c[d] <= order) break;
      c[d] = 0;
    }
  }
  return basis;
}

}  // namespace wavebasis
