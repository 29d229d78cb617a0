#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "wavebasis/basis.hpp"

using namespace wavebasis;

namespace {

std::set<std::vector<WaveletAtom>> atom_sets(const BasisSet& b) {
  std::set<std::vector<WaveletAtom>> out;
  for (const auto& f : b.functions()) out.insert(f.atoms());
  return out;
}

}  // namespace

TEST_CASE("coupled basis for d=2, n=1, j=0 matches the worked example") {
  const BasisSet b = build_fixed_coupled(2, 1, 0);
  REQUIRE(b.size() == 4);
  // phi(s1 - 0) phi(s2 - 0), phi(s1 - 0) phi(s2 + 1), phi(s1 + 1) phi(s2 - 0), phi(s1 + 1) phi(s2 + 1)
  const std::set<std::vector<WaveletAtom>> expected = {
      {{0, 1, 0, 0}, {1, 1, 0, 0}},
      {{0, 1, 0, 0}, {1, 1, 0, -1}},
      {{0, 1, 0, -1}, {1, 1, 0, 0}},
      {{0, 1, 0, -1}, {1, 1, 0, -1}},
  };
  CHECK(atom_sets(b) == expected);
}

TEST_CASE("decoupled basis for d=2, n=1, j=0 matches the worked example") {
  const BasisSet b = build_decoupled(2, 1, 0);
  const std::set<std::vector<WaveletAtom>> expected = {
      {{0, 1, 0, 0}}, {{0, 1, 0, -1}}, {{1, 1, 0, 0}}, {{1, 1, 0, -1}}};
  CHECK(atom_sets(b) == expected);
}

TEST_CASE("basis counts") {
  CHECK(build_fixed_coupled(1, 0, 0).size() == 1);
  CHECK(build_fixed_coupled(2, 2, 2).size() == 36);
  CHECK(build_decoupled(4, 1, 1).size() == 12);
  CHECK(build_decoupled(1, 0, 0).size() == 1);
  CHECK(build_fourier(2, 5).size() == 36);
  for (int d = 1; d <= 3; ++d) {
    for (int n = 0; n <= 2; ++n) {
      for (int j = 0; j <= 2; ++j) {
        const std::size_t per = static_cast<std::size_t>(n + (1 << j));
        CHECK(build_fixed_coupled(d, n, j).size() == static_cast<std::size_t>(std::pow(per, d)));
        CHECK(build_decoupled(d, n, j).size() == per * static_cast<std::size_t>(d));
      }
      CHECK(build_fourier(d, n).size() == static_cast<std::size_t>(std::pow(n + 1, d)));
    }
  }
}

TEST_CASE("size cap refuses oversized bases") {
  CHECK_THROWS_AS(build_fixed_coupled(4, 2, 2, 1, 1000), std::length_error);
  CHECK_NOTHROW(build_fixed_coupled(4, 2, 2, 1, 1296));
  CHECK_THROWS_AS(build_fourier(10, 9), std::length_error);
  CHECK_THROWS_AS(build_fixed_coupled(2, 3, 0), unsupported_order);
  CHECK_THROWS_AS(build_decoupled(0, 1, 0), std::invalid_argument);
}

TEST_CASE("Fourier terms") {
  const auto zero = BasisFunction::fourier({0, 0});
  CHECK(zero.value(std::vector<double>{0.3, 0.9}) == 1.0);
  const auto one = BasisFunction::fourier({1});
  CHECK(one.value(std::vector<double>{1.0}) == -1.0);
  CHECK(one.learning_rate_scale() == 1.0);
  CHECK(BasisFunction::fourier({3, 4}).learning_rate_scale() == doctest::Approx(0.2));
  CHECK(zero.learning_rate_scale() == 1.0);

  const BasisSet b = build_fourier(1, 1);
  const auto active = b.active_features(std::vector<double>{1.0});
  REQUIRE(active.size() == 2);
  CHECK(active[1].value == doctest::Approx(-1.0).epsilon(1e-15));
}

TEST_CASE("product features reject repeated dimensions") {
  CHECK_THROWS_AS(BasisFunction::product({{0, 1, 0, 0}, {0, 1, 0, -1}}), std::invalid_argument);
  CHECK_THROWS_AS(BasisFunction::product({}), std::invalid_argument);
}

TEST_CASE("active features on order-0 bases are a single tile") {
  const BasisSet b = build_fixed_coupled(2, 0, 2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const std::vector<double> s{u(rng), u(rng)};
    CHECK(b.active_features(s).size() == 1);
  }
  CHECK(b.active_features(std::vector<double>{1.0, 1.0}).size() == 1);
  CHECK(b.active_features(std::vector<double>{0.0, 0.0}).size() == 1);
}

TEST_CASE("order-1 1-D basis has two active atoms at generic points") {
  for (int j = 0; j <= 3; ++j) {
    const BasisSet b = build_decoupled(1, 1, j);
    for (int i = 1; i < 997; ++i) {
      const double x = i / 997.0;
      // dense scan oracle
      int dense = 0;
      for (const auto& f : b.functions()) dense += f.value(std::vector<double>{x}) != 0.0;
      const auto sparse = b.active_features(std::vector<double>{x});
      CHECK(dense == 2);
      CHECK(sparse.size() == 2);
    }
  }
}

TEST_CASE("sparse and dense evaluation agree") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0), w(-1.0, 1.0);
  for (const auto& b : {build_fixed_coupled(2, 2, 2, 3), build_fixed_coupled(3, 1, 1, 3), build_decoupled(4, 2, 1, 3),
                        build_fourier(2, 3, 3)}) {
    std::vector<double> weights(b.size());
    for (auto& x : weights) x = w(rng);
    for (int i = 0; i < 1000; ++i) {
      std::vector<double> s(static_cast<std::size_t>(b.dims()));
      for (auto& x : s) x = u(rng);
      const auto active = b.active_features(s);
      std::set<std::size_t> sparse_set;
      double sparse = 0.0;
      for (const auto& a : active) {
        sparse += weights[a.index] * a.value;
        sparse_set.insert(a.index);
        CHECK(b.id_at(a.index) == a.id);
      }
      double dense = 0.0;
      std::set<std::size_t> dense_set;
      for (std::size_t k = 0; k < b.size(); ++k) {
        const double v = b.function(k).value(s);
        dense += weights[k] * v;
        if (v != 0.0 || b.function(k).kind() == FeatureKind::fourier) dense_set.insert(k);
      }
      CHECK(sparse_set == dense_set);
      CHECK(std::abs(sparse - dense) < 1e-12);
    }
  }
}

TEST_CASE("coupled values are products of atom values") {
  const BasisSet b = build_fixed_coupled(3, 2, 1);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    const std::vector<double> s{u(rng), u(rng), u(rng)};
    for (const auto& f : b.functions()) {
      double expected = 1.0;
      for (const auto& a : f.atoms()) {
        const double y = std::ldexp(s[static_cast<std::size_t>(a.dim)], a.scale) - a.translation;
        expected *= std::sqrt(std::ldexp(1.0, a.scale)) * normalization_constant(a.order) * eval_bspline_raw(a.order, y);
      }
      CHECK(f.value(s) == doctest::Approx(expected).epsilon(1e-14));
    }
  }
}

TEST_CASE("dimension mismatch is an error") {
  const BasisSet b = build_decoupled(2, 1, 0);
  CHECK_THROWS_AS(b.active_features(std::vector<double>{0.5}), std::invalid_argument);
}

TEST_CASE("support volume") {
  CHECK(support_volume(BasisFunction::product({{0, 0, 0, 0}})) == 1.0);
  CHECK(support_volume(BasisFunction::product({{0, 0, 1, 0}, {1, 0, 1, 1}})) == 0.25);
  CHECK(support_volume(BasisFunction::product({{0, 1, 0, -1}})) == 1.0);
  CHECK(support_volume(BasisFunction::product({{0, 2, 2, 3}})) == 0.25);
  CHECK_THROWS_AS(support_volume(BasisFunction::fourier({1, 0})), std::logic_error);
}

TEST_CASE("ids are append-only") {
  BasisSet b = build_decoupled(2, 0, 1, 2);
  const FeatureId first = b.id_at(0);
  b.remove(first);
  CHECK_FALSE(b.contains(first));
  const FeatureId fresh = b.add(BasisFunction::product({{0, 0, 3, 0}}));
  CHECK(fresh == 4);
  CHECK(b.weights(0).size() == b.size());
  CHECK(b.traces(1).size() == b.size());
  CHECK_THROWS_AS(b.add(BasisFunction::product({{0, 0, 3, 0}})), std::invalid_argument);
  CHECK_THROWS_AS(b.remove(first), std::out_of_range);
  CHECK(b.find(BasisFunction::product({{0, 0, 3, 0}})) == fresh);
}

TEST_CASE("serialization round trip preserves features, ids and weights") {
  BasisSet b = build_fixed_coupled(2, 2, 1, 3);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (std::size_t a = 0; a < 3; ++a) {
    for (auto& w : b.weights(a)) w = g(rng);
  }
  b.remove(b.id_at(2));
  b.add(BasisFunction::product({{0, 2, 3, 5}}));

  std::stringstream text;
  write_basis(text, b);
  const BasisSet back = read_basis(text);
  CHECK(back.dims() == b.dims());
  CHECK(back.num_actions() == b.num_actions());
  CHECK(back.next_id() == b.next_id());
  CHECK(back.functions() == b.functions());
  CHECK(back.ids() == b.ids());
  for (std::size_t a = 0; a < 3; ++a) CHECK(back.weights(a) == b.weights(a));

  BasisSet f = build_fourier(2, 2, 2);
  f.weights(1)[4] = 0.125;
  std::stringstream ft;
  write_basis(ft, f);
  CHECK(read_basis(ft).functions() == f.functions());
}

TEST_CASE("malformed basis files are rejected") {
  std::stringstream bad("not-a-basis 1\n");
  CHECK_THROWS_AS(read_basis(bad), std::runtime_error);
  std::stringstream short_weights("wavebasis-basis 1\ndims 1\nactions 2\nnext_id 1\nW 0 (0,0,0,0) 1.0\n");
  CHECK_THROWS_AS(read_basis(short_weights), std::runtime_error);
}
