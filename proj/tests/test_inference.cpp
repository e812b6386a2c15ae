#include <doctest.h>

#include "inference.hpp"
#include "testutil.hpp"

using namespace hiercos;

namespace {

Vec ideal_a1(const HierarchyTree& t, const BasisAssignment& bases) {
  const double mags[] = {0.6, 0.8};
  return construct_ideal_vector(t, bases, t.index_of("a1"), mags);
}

std::vector<std::string> names(const HierarchyTree& t, const std::vector<int>& nodes) {
  std::vector<std::string> out;
  for (int v : nodes) out.push_back(t.name(v));
  return out;
}

}  // namespace

TEST_CASE("leaf scores are projection norms in leaf order") {
  const HierarchyTree t = testutil::t1();
  auto [bases, idx] = assign_bases(t);

  const Vec scores = leaf_scores(ideal_a1(t, bases), t, idx);
  CHECK(scores[0] == doctest::Approx(1.0));
  CHECK(scores[1] == doctest::Approx(0.6));
  CHECK(scores[2] == doctest::Approx(0.0));

  CHECK(leaf_scores(Vec(7, 0.0), t, idx) == Vec(5, 0.0));

  Vec on_b(7, 0.0);
  on_b[bases.axis_of[t.index_of("B")]] = 0.4;
  const Vec sb = leaf_scores(on_b, t, idx);
  CHECK(sb == Vec{0.0, 0.0, 0.4, 0.4, 0.4});
}

TEST_CASE("leaf argmax breaks ties toward the smaller index") {
  CHECK(predict_leaf(Vec{1.0, 0.6, 0, 0, 0}) == 0);
  CHECK(predict_leaf(Vec{0.5, 0.5, 0.5, 0.5, 0.5}) == 0);
  CHECK(predict_leaf(Vec{0, 0, 0.9, 0.9, 0.1}) == 2);
}

TEST_CASE("per-level argmax follows the worked example") {
  const HierarchyTree t = testutil::t1();
  auto [bases, idx] = assign_bases(t);

  CHECK(names(t, predict_levels(ideal_a1(t, bases), t, idx, LevelMode::per_level_argmax)) ==
        std::vector<std::string>{"A", "a1"});

  Vec adversarial(7, 0.0);
  adversarial[bases.axis_of[t.index_of("B")]] = 10.0;
  adversarial[bases.axis_of[t.index_of("a1")]] = 1.0;
  const auto path = predict_levels(adversarial, t, idx, LevelMode::per_level_argmax);
  CHECK(names(t, path) == std::vector<std::string>{"B", "b1"});
  CHECK(is_consistent_path(t, path));
}

TEST_CASE("leaf-ancestor mode is consistent for arbitrary vectors") {
  std::mt19937_64 rng(7);
  const HierarchyTree t = testutil::random_tree(rng, 6, 32);
  auto [bases, idx] = assign_bases(t);
  for (int trial = 0; trial < 100; ++trial) {
    const Vec x = testutil::random_vector(rng, t.node_count(), 2.0);
    REQUIRE(is_consistent_path(t, predict_levels(x, t, idx, LevelMode::leaf_ancestor_path)));
  }
}

TEST_CASE("path consistency checks edges and the starting level") {
  const HierarchyTree t = testutil::t1();
  const std::vector<int> good = {t.index_of("A"), t.index_of("a1")};
  const std::vector<int> bad = {t.index_of("B"), t.index_of("a1")};
  const std::vector<int> single = {t.index_of("A")};
  const std::vector<int> wrong_start = {t.index_of("a1")};
  CHECK(is_consistent_path(t, good));
  CHECK_FALSE(is_consistent_path(t, bad));
  CHECK(is_consistent_path(t, single));
  CHECK_FALSE(is_consistent_path(t, wrong_start));
  CHECK_THROWS_AS((void)is_consistent_path(t, std::vector<int>{}), Error);
}

TEST_CASE("ideal vectors always resolve to their own path") {
  std::mt19937_64 rng(43);
  int cases = 0;
  while (cases < 300) {
    const HierarchyTree t = testutil::random_tree(rng, 6, 40);
    auto [bases, idx] = assign_bases(t);
    for (int rep = 0; rep < 10 && cases < 300; ++rep, ++cases) {
      const int leaf = t.leaves()[rng() % t.leaves().size()];
      const Vec mags = testutil::random_ideal_magnitudes(rng, t.level(leaf));
      const Vec x = construct_ideal_vector(t, bases, leaf, mags);
      const auto path = predict_levels(x, t, idx, LevelMode::per_level_argmax);
      REQUIRE(is_consistent_path(t, path));
      REQUIRE(path.back() == leaf);
      auto anc = t.ancestors(leaf);
      std::vector<int> want(anc.rbegin(), anc.rend());
      want.push_back(leaf);
      REQUIRE(path == want);
    }
  }
}

TEST_CASE("projection norms never grow with depth along a root path") {
  std::mt19937_64 rng(47);
  const HierarchyTree t = testutil::random_tree(rng, 7, 48);
  auto [bases, idx] = assign_bases(t);
  for (int trial = 0; trial < 50; ++trial) {
    const Vec x = testutil::random_vector(rng, t.node_count(), 1.5);
    for (int leaf : t.leaves()) {
      double prev = std::numeric_limits<double>::infinity();
      auto anc = t.ancestors(leaf);
      std::vector<int> path(anc.rbegin(), anc.rend());
      path.push_back(leaf);
      for (int v : path) {
        const double norm = projection_norm(x, v, idx);
        REQUIRE(norm <= prev + 1e-12);
        prev = norm;
      }
    }
  }
}

TEST_CASE("ranking is invariant under positive scaling") {
  std::mt19937_64 rng(53);
  const HierarchyTree t = testutil::random_tree(rng, 5, 24);
  auto [bases, idx] = assign_bases(t);
  for (int trial = 0; trial < 30; ++trial) {
    const Vec x = testutil::random_vector(rng, t.node_count(), 1.0);
    Vec scaled = x;
    for (double& v : scaled) v *= 37.5;
    const Vec a = leaf_scores(x, t, idx);
    const Vec b = leaf_scores(scaled, t, idx);
    REQUIRE(ranked_leaves(a) == ranked_leaves(b));
    REQUIRE(predict_leaf(a) == predict_leaf(b));
  }
}
