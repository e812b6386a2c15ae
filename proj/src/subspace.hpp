#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hierarchy.hpp"

namespace hiercos {

using Vec = std::vector<double>;

// One orthonormal axis per non-root node, assigned breadth-first in file
// order. The canonical frame is axis-aligned; an explicit rotated frame can be
// attached for invariance tests (geometry then runs on frame components).
struct BasisAssignment {
  const HierarchyTree* tree = nullptr;
  std::vector<int> axis_of;   // node index -> axis, -1 for the root
  std::vector<int> node_of;   // axis -> node index
  std::vector<Vec> frame;     // frame[i] = i-th basis vector; empty => identity

  int dim() const { return static_cast<int>(node_of.size()); }
  bool rotated() const { return !frame.empty(); }
};

// Per-node basis sets over the assignment: E_i = E^a_i u {e_i} u E^d_i, its
// complement, per-level axis sets, and root-path axes (level order).
struct SubspaceIndex {
  std::vector<std::vector<int>> basis;       // node -> E_i, sorted axes
  std::vector<std::vector<int>> complement;  // node -> axes not in E_i
  std::vector<std::vector<int>> level;       // l-1 -> E^(l)
  std::vector<std::vector<int>> path;        // node -> axes of root path incl. self, level order
};

std::pair<BasisAssignment, SubspaceIndex> assign_bases(
    const HierarchyTree& tree, std::optional<std::uint64_t> rotation_seed = std::nullopt);

// Components of an ambient vector along the frame axes (<x, q_i>); with the
// canonical frame this is the identity.
Vec frame_components(const BasisAssignment& bases, const Vec& ambient);

// Zeroes every component outside `axes`; idempotent.
Vec project(const Vec& x, std::span<const int> axes);

// Squared distance from x to V_i: sum of squared components over the
// complement of E_i (Pythagorean counterpart of projection_norm).
double subspace_distance_sq(const Vec& x, int node, const SubspaceIndex& idx);

// ||P_{E_i} x||.
double projection_norm(const Vec& x, int node, const SubspaceIndex& idx);

// Vector supported exactly on a leaf's basis set with the given strictly
// positive per-path-node magnitudes (root-side first).
Vec construct_ideal_vector(const HierarchyTree& tree, const BasisAssignment& bases,
                           int leaf, std::span<const double> magnitudes);

struct HavsReport {
  long trials = 0;
  long checks = 0;
  long violations = 0;
};

// Brute-force check of the vector-space ordering condition: draws ideal
// vectors for random leaves and verifies that a smaller tree distance always
// means a smaller gap in subspace distances, over all leaf pairs.
HavsReport havs_check(const HierarchyTree& tree, const BasisAssignment& bases,
                      const SubspaceIndex& idx, int trials, std::uint64_t seed);

}  // namespace hiercos
