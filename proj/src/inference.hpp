#pragma once

#include "subspace.hpp"

namespace hiercos {

enum class LevelMode {
  per_level_argmax,  // independent argmax over each level's nodes
  leaf_ancestor_path,  // predicted leaf's root path (consistent by construction)
};

// Projection norms for every leaf, in leaf file order.
Vec leaf_scores(const Vec& x, const HierarchyTree& tree, const SubspaceIndex& idx);

// Argmax with smallest-index tie-break; returns a leaf position (0..K-1).
int predict_leaf(std::span<const double> scores);

// Leaf positions sorted by descending score, stable index tie-break.
std::vector<int> ranked_leaves(std::span<const double> scores);

// Per-level class predictions, truncated at the predicted leaf's depth.
std::vector<int> predict_levels(const Vec& x, const HierarchyTree& tree,
                                const SubspaceIndex& idx, LevelMode mode);

// True iff consecutive entries are parent->child edges starting at level 1.
bool is_consistent_path(const HierarchyTree& tree, std::span<const int> path);

}  // namespace hiercos
