#include "inference.hpp"

#include <algorithm>
#include <numeric>

namespace hiercos {

Vec leaf_scores(const Vec& x, const HierarchyTree& tree, const SubspaceIndex& idx) {
  const auto& leaves = tree.leaves();
  Vec scores(leaves.size());
  for (size_t j = 0; j < leaves.size(); ++j) scores[j] = projection_norm(x, leaves[j], idx);
  return scores;
}

int predict_leaf(std::span<const double> scores) {
  if (scores.empty()) throw Error(Err::InvalidArgument, "empty score vector");
  int best = 0;
  for (int j = 1; j < static_cast<int>(scores.size()); ++j)
    if (scores[j] > scores[best]) best = j;
  return best;
}

std::vector<int> ranked_leaves(std::span<const double> scores) {
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

std::vector<int> predict_levels(const Vec& x, const HierarchyTree& tree,
                                const SubspaceIndex& idx, LevelMode mode) {
  const Vec scores = leaf_scores(x, tree, idx);
  const int leaf = tree.leaves()[predict_leaf(scores)];
  const int depth = tree.level(leaf);

  std::vector<int> path;
  if (mode == LevelMode::leaf_ancestor_path) {
    auto anc = tree.ancestors(leaf);
    path.assign(anc.rbegin(), anc.rend());
    path.push_back(leaf);
    return path;
  }
  for (int l = 1; l <= depth; ++l) {
    const auto& nodes = tree.level_nodes(l);
    int best = 0;
    double best_norm = projection_norm(x, nodes[0], idx);
    for (int j = 1; j < static_cast<int>(nodes.size()); ++j) {
      double norm = projection_norm(x, nodes[j], idx);
      if (norm > best_norm) {
        best = j;
        best_norm = norm;
      }
    }
    path.push_back(nodes[best]);
  }
  return path;
}

bool is_consistent_path(const HierarchyTree& tree, std::span<const int> path) {
  if (path.empty()) throw Error(Err::InvalidArgument, "empty path");
  for (int v : path)
    if (v < 0 || v >= tree.total_nodes() || v == tree.root())
      throw Error(Err::UnknownNode, "path references an unknown node");
  if (tree.level(path[0]) != 1) return false;
  for (size_t i = 1; i < path.size(); ++i)
    if (tree.parent(path[i]) != path[i - 1]) return false;
  return true;
}

}  // namespace hiercos
