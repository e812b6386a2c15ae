#include <doctest.h>

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "subspace.hpp"
#include "testutil.hpp"

using namespace hiercos;

namespace {

Vec ideal_a1(const HierarchyTree& t, const BasisAssignment& bases) {
  const double mags[] = {0.6, 0.8};
  return construct_ideal_vector(t, bases, t.index_of("a1"), mags);
}

}  // namespace

TEST_CASE("axes follow breadth-first file order") {
  const HierarchyTree t = testutil::t1();
  auto [bases, idx] = assign_bases(t);
  CHECK(bases.dim() == 7);
  CHECK(bases.axis_of[t.index_of("A")] == 0);
  CHECK(bases.axis_of[t.index_of("B")] == 1);
  CHECK(bases.axis_of[t.index_of("a1")] == 2);
  CHECK(bases.axis_of[t.index_of("b3")] == 6);

  CHECK(idx.basis[t.index_of("a1")] == std::vector<int>{0, 2});
  CHECK(idx.basis[t.index_of("B")] == std::vector<int>{1, 4, 5, 6});
  CHECK(idx.complement[t.index_of("a1")] == std::vector<int>{1, 3, 4, 5, 6});
}

TEST_CASE("single-node tree has a full basis and empty complement") {
  const HierarchyTree t = HierarchyTree::parse("A\t-\n");
  auto [bases, idx] = assign_bases(t);
  CHECK(idx.basis[t.index_of("A")] == std::vector<int>{0});
  CHECK(idx.complement[t.index_of("A")].empty());
}

TEST_CASE("project zeroes components outside the axis set") {
  const HierarchyTree t = testutil::t1();
  auto [bases, idx] = assign_bases(t);
  const Vec x = ideal_a1(t, bases);

  const std::vector<int> all = {0, 1, 2, 3, 4, 5, 6};
  CHECK(project(x, all) == x);
  CHECK(project(x, {}) == Vec(7, 0.0));

  const Vec onto_a2 = project(x, idx.basis[t.index_of("a2")]);
  CHECK(onto_a2[0] == 0.6);
  for (int a = 1; a < 7; ++a) CHECK(onto_a2[a] == 0.0);

  const std::vector<int> bad = {9};
  CHECK_THROWS_AS((void)project(x, bad), Error);
}

TEST_CASE("subspace distances on the worked example") {
  const HierarchyTree t = testutil::t1();
  auto [bases, idx] = assign_bases(t);
  const Vec x = ideal_a1(t, bases);
  CHECK(subspace_distance_sq(x, t.index_of("a1"), idx) == doctest::Approx(0.0));
  CHECK(subspace_distance_sq(x, t.index_of("a2"), idx) == doctest::Approx(0.64));
  CHECK(subspace_distance_sq(x, t.index_of("b1"), idx) == doctest::Approx(1.0));
  CHECK(projection_norm(x, t.index_of("a1"), idx) == doctest::Approx(1.0));
  CHECK(projection_norm(x, t.index_of("a2"), idx) == doctest::Approx(0.6));
  CHECK(projection_norm(x, t.index_of("B"), idx) == doctest::Approx(0.0));
  CHECK_THROWS_AS((void)subspace_distance_sq(x, t.root(), idx), Error);
}

TEST_CASE("ideal-vector factory validates its inputs") {
  const HierarchyTree t = testutil::t1();
  auto [bases, idx] = assign_bases(t);
  const double bad_mag[] = {0.6, 0.0};
  CHECK_THROWS_AS((void)construct_ideal_vector(t, bases, t.index_of("a1"), bad_mag), Error);
  const double mags[] = {0.6, 0.8};
  CHECK_THROWS_AS((void)construct_ideal_vector(t, bases, t.index_of("B"), mags), Error);
}

TEST_CASE("havs check finds no violations on t1 or random trees") {
  {
    const HierarchyTree t = testutil::t1();
    auto [bases, idx] = assign_bases(t);
    const HavsReport report = havs_check(t, bases, idx, 100, 7);
    CHECK(report.violations == 0);
    CHECK(report.trials == 100);
  }
  std::mt19937_64 rng(99);
  const HierarchyTree t = testutil::random_tree(rng, 4, 20);
  auto [bases, idx] = assign_bases(t);
  CHECK(havs_check(t, bases, idx, 100, 7).violations == 0);
}

TEST_CASE("leaf-only support breaks the theorem hypothesis, not the theorem") {
  // All mass on e_a1: distances to a2 and b1 tie at |x_a1|, exactly the
  // flat-classification degeneracy the construction is designed to avoid.
  const HierarchyTree t = testutil::t1();
  auto [bases, idx] = assign_bases(t);
  Vec x(7, 0.0);
  x[bases.axis_of[t.index_of("a1")]] = 0.7;
  const double d_a2 = std::sqrt(subspace_distance_sq(x, t.index_of("a2"), idx));
  const double d_b1 = std::sqrt(subspace_distance_sq(x, t.index_of("b1"), idx));
  CHECK(d_a2 == doctest::Approx(0.7));
  CHECK(d_a2 == doctest::Approx(d_b1));
}

TEST_CASE("child basis sets nest inside parent basis sets") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const HierarchyTree t = testutil::random_tree(rng, 6, 48);
    auto [bases, idx] = assign_bases(t);
    const Vec x = testutil::random_vector(rng, t.node_count());
    for (int v = 0; v < t.total_nodes(); ++v) {
      if (v == t.root() || t.parent(v) == t.root()) continue;
      const int p = t.parent(v);
      const std::set<int> child(idx.basis[v].begin(), idx.basis[v].end());
      const std::set<int> parent(idx.basis[p].begin(), idx.basis[p].end());
      REQUIRE(std::includes(parent.begin(), parent.end(), child.begin(), child.end()));
      // Strict growth whenever the parent has a second child; a single-child
      // parent spans exactly its child's subspace.
      if (t.children(p).size() > 1) REQUIRE(child.size() < parent.size());
      else REQUIRE(child.size() == parent.size());
      REQUIRE(projection_norm(x, p, idx) >= projection_norm(x, v, idx));
    }
    for (int v = 0; v < t.total_nodes(); ++v) {
      if (v == t.root()) continue;
      REQUIRE(static_cast<int>(idx.basis[v].size()) ==
              t.level(v) + static_cast<int>(t.descendants(v).size()));
    }
  }
}

TEST_CASE("pythagorean identity holds for random vectors") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 8; ++trial) {
    const HierarchyTree t = testutil::random_tree(rng, 6, 48);
    auto [bases, idx] = assign_bases(t);
    const Vec x = testutil::random_vector(rng, t.node_count(), 2.0);
    double norm_sq = 0;
    for (double c : x) norm_sq += c * c;
    for (int v = 0; v < t.total_nodes(); ++v) {
      if (v == t.root()) continue;
      const double inside = projection_norm(x, v, idx);
      const double outside = subspace_distance_sq(x, v, idx);
      REQUIRE(inside * inside + outside ==
              doctest::Approx(norm_sq).epsilon(1e-9));
    }
  }
}

TEST_CASE("distances and norms are rotation invariant") {
  std::mt19937_64 rng(31);
  const HierarchyTree t = testutil::random_tree(rng, 5, 24);
  auto [plain, idx] = assign_bases(t);
  auto [rotated, idx2] = assign_bases(t, 4242);
  REQUIRE(rotated.rotated());

  const int n = t.node_count();
  for (int trial = 0; trial < 20; ++trial) {
    const Vec components = testutil::random_vector(rng, n, 1.5);
    // Ambient vector with the given frame components: y = sum_i c_i q_i.
    Vec ambient(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) ambient[k] += components[i] * rotated.frame[i][k];
    const Vec recovered = frame_components(rotated, ambient);
    for (int v = 0; v < t.total_nodes(); ++v) {
      if (v == t.root()) continue;
      REQUIRE(subspace_distance_sq(recovered, v, idx2) ==
              doctest::Approx(subspace_distance_sq(components, v, idx)).epsilon(1e-9));
      REQUIRE(projection_norm(recovered, v, idx2) ==
              doctest::Approx(projection_norm(components, v, idx)).epsilon(1e-9));
    }
  }
}

TEST_CASE("basis set differences count path nodes below the join") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 6; ++trial) {
    const HierarchyTree t = testutil::random_tree(rng, 5, 32, /*equal_depth=*/true);
    auto [bases, idx] = assign_bases(t);
    const auto& leaves = t.leaves();
    for (size_t a = 0; a < leaves.size(); ++a)
      for (size_t b = 0; b < leaves.size(); ++b) {
        if (a == b) continue;
        const std::set<int> ea(idx.basis[leaves[a]].begin(), idx.basis[leaves[a]].end());
        const std::set<int> eb(idx.basis[leaves[b]].begin(), idx.basis[leaves[b]].end());
        int diff = 0;
        for (int e : ea) diff += !eb.count(e);
        const int lca_level = t.level(t.lca(leaves[a], leaves[b]));
        REQUIRE(diff == t.level(leaves[a]) - lca_level);
      }
  }
}

TEST_CASE("ideal vectors order subspace distances exactly like tree distances") {
  std::mt19937_64 rng(53);
  for (int trial = 0; trial < 30; ++trial) {
    const HierarchyTree t = testutil::random_tree(rng, 6, 40);
    auto [bases, idx] = assign_bases(t);
    const auto& leaves = t.leaves();
    const int leaf = leaves[rng() % leaves.size()];
    const Vec mags = testutil::random_ideal_magnitudes(rng, t.level(leaf));
    const Vec x = construct_ideal_vector(t, bases, leaf, mags);
    for (size_t j = 0; j < leaves.size(); ++j)
      for (size_t k = 0; k < leaves.size(); ++k) {
        if (t.lca_distance(leaf, leaves[j]) >= t.lca_distance(leaf, leaves[k])) continue;
        REQUIRE(subspace_distance_sq(x, leaves[j], idx) <
                subspace_distance_sq(x, leaves[k], idx));
      }
  }
}
