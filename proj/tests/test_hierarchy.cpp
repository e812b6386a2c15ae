#include <doctest.h>

#include <functional>

#include "hierarchy.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace hiercos;

namespace {

Err code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Err::IoError;
}

}  // namespace

TEST_CASE("t1 fixture parses with the documented shape") {
  const HierarchyTree t = testutil::t1();
  CHECK(t.node_count() == 7);
  CHECK(t.height() == 2);
  CHECK(t.leaf_count() == 5);
  CHECK(t.level_sizes() == std::vector<int>{2, 5});
  std::vector<std::string> leaf_names;
  for (int v : t.leaves()) leaf_names.push_back(t.name(v));
  CHECK(leaf_names == std::vector<std::string>{"a1", "a2", "b1", "b2", "b3"});
  CHECK(t.name(t.root()) == "r");
}

TEST_CASE("single-line file is a one-class tree") {
  const HierarchyTree t = HierarchyTree::parse("A\t-\n");
  CHECK(t.node_count() == 1);
  CHECK(t.height() == 1);
  CHECK(t.leaf_count() == 1);
  CHECK(t.name(t.leaves()[0]) == "A");
}

TEST_CASE("structural errors carry the offending line") {
  CHECK(code_of([] { HierarchyTree::parse("A\tB\nB\tA\n"); }) == Err::CycleDetected);
  CHECK(code_of([] { HierarchyTree::parse("r\t-\nA\tr\nA\tr\n"); }) == Err::DuplicateNode);
  CHECK(code_of([] { HierarchyTree::parse("r\t-\nA\tr\nq\t-\n"); }) == Err::MultipleRoots);
  CHECK(code_of([] { HierarchyTree::parse("A\tB\n"); }) == Err::DanglingParent);
  CHECK(code_of([] { HierarchyTree::parse("# only a comment\n"); }) == Err::MissingRoot);
  CHECK(code_of([] { HierarchyTree::parse("A B\n"); }) == Err::MalformedLine);
  try {
    HierarchyTree::parse("r\t-\nA\tr\nA\tr\n");
  } catch (const Error& e) {
    CHECK(e.input_line() == 3);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("ancestors walk up to but not including the root") {
  const HierarchyTree t = testutil::t1();
  auto names = [&](const std::vector<int>& v) {
    std::vector<std::string> out;
    for (int u : v) out.push_back(t.name(u));
    return out;
  };
  CHECK(names(t.ancestors(t.index_of("a1"))) == std::vector<std::string>{"A"});
  CHECK(t.ancestors(t.index_of("A")).empty());
  CHECK(names(t.ancestors(t.index_of("b3"))) == std::vector<std::string>{"B"});
  CHECK_THROWS_AS((void)t.index_of("nope"), Error);
}

TEST_CASE("descendants are strict and file-ordered") {
  const HierarchyTree t = testutil::t1();
  CHECK(t.descendants(t.index_of("B")).size() == 3);
  CHECK(t.descendants(t.index_of("a1")).empty());
  CHECK(t.descendants(t.root()).size() == 7);
}

TEST_CASE("lca distance is subtree height at the join") {
  const HierarchyTree t = testutil::t1();
  const int a1 = t.index_of("a1");
  CHECK(t.lca_distance(a1, a1) == 0);
  CHECK(t.lca_distance(a1, t.index_of("a2")) == 1);
  CHECK(t.lca_distance(a1, t.index_of("b1")) == 2);
  CHECK(code_of([&] { t.lca_distance(t.index_of("A"), a1); }) == Err::NotALeaf);
}

TEST_CASE("level_nodes respects file order and bounds") {
  const HierarchyTree t = testutil::t1();
  CHECK(t.level_nodes(1).size() == 2);
  CHECK(t.name(t.level_nodes(1)[0]) == "A");
  CHECK(t.level_nodes(2).size() == 5);
  CHECK(code_of([&] { t.level_nodes(3); }) == Err::LevelOutOfRange);
  CHECK(code_of([&] { t.level_nodes(0); }) == Err::LevelOutOfRange);
}

TEST_CASE("serialize round-trips to an isomorphic tree") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 25; ++trial) {
    const std::string text = testutil::random_tree_tsv(rng, 6, 40);
    const HierarchyTree a = HierarchyTree::parse(text);
    const HierarchyTree b = HierarchyTree::parse(a.serialize());
    REQUIRE(a.node_count() == b.node_count());
    REQUIRE(a.height() == b.height());
    REQUIRE(a.leaf_count() == b.leaf_count());
    for (int j = 0; j < a.leaf_count(); ++j)
      REQUIRE(a.name(a.leaves()[j]) == b.name(b.leaves()[j]));
    for (int v = 0; v < a.total_nodes(); ++v) {
      if (v == a.root()) continue;
      const int w = b.index_of(a.name(v));
      REQUIRE(a.level(v) == b.level(w));
      if (a.parent(v) != a.root()) REQUIRE(a.name(a.parent(v)) == b.name(b.parent(w)));
    }
  }
}

TEST_CASE("lca distance agrees with the brute-force oracle on random trees") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 12; ++trial) {
    const HierarchyTree t = testutil::random_tree(rng, 12, 600);
    const auto& leaves = t.leaves();
    REQUIRE(t.height() <= 12);
    REQUIRE(static_cast<int>(leaves.size()) <= 600);
    for (int v = 0; v < t.total_nodes(); ++v)
      if (v != t.root())
        REQUIRE(static_cast<int>(t.ancestors(v).size()) == t.level(v) - 1);
    const int K = static_cast<int>(leaves.size());
    for (int probe = 0; probe < 200; ++probe) {
      const int a = leaves[rng() % K], b = leaves[rng() % K];
      const int d = t.lca_distance(a, b);
      REQUIRE(d == t.lca_distance(b, a));
      REQUIRE((d == 0) == (a == b));
      REQUIRE(d <= t.height());
      REQUIRE(d == oracle::lca_distance(t, a, b));
    }
  }
}
