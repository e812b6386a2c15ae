#pragma once

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "error.hpp"

namespace hiercos {

// Label taxonomy. Nodes are referenced by dense indices in file (declaration)
// order; the root is excluded from all counts (n, H, K_l) but reachable via
// root(). Immutable after parsing, so every query is safe for concurrent
// readers.
class HierarchyTree {
public:
  // TSV: one `node_id<TAB>parent_id` line per node, `#` comments, LF endings.
  // A parent of `-` either declares the named root (when that node has
  // children) or attaches a single-class node directly under an implicit
  // root (degenerate one-line file). Exactly one `-` line is allowed.
  static HierarchyTree parse(std::string_view text);
  static HierarchyTree parse_file(const std::string& path);

  // Emits the same document shape parse() accepts; re-parsing yields an
  // isomorphic tree with identical leaf order.
  std::string serialize() const;

  int node_count() const { return n_; }    // n, non-root nodes
  int height() const { return height_; }   // H
  int leaf_count() const { return static_cast<int>(leaves_.size()); }
  const std::vector<int>& level_sizes() const { return level_sizes_; }  // K_l, index l-1

  int root() const { return root_; }
  int total_nodes() const { return static_cast<int>(names_.size()); }  // incl. root

  bool has_node(std::string_view id) const;
  int index_of(std::string_view id) const;  // throws UnknownNode
  const std::string& name(int v) const { return names_.at(v); }
  int parent(int v) const { return parent_.at(v); }  // -1 for the root
  const std::vector<int>& children(int v) const { return children_.at(v); }
  int level(int v) const { return level_.at(v); }
  bool is_leaf(int v) const { return children_.at(v).empty(); }
  int subtree_height(int v) const { return subtree_height_.at(v); }

  const std::vector<int>& leaves() const { return leaves_; }  // file order = y_1..y_K
  int leaf_pos(int v) const;                                  // throws NotALeaf

  // Path from v's parent up to (and excluding) the root, nearest first.
  std::vector<int> ancestors(int v) const;
  // Strict descendants, depth-first in file order.
  std::vector<int> descendants(int v) const;
  // Nodes at level l (1..H) in file order; length K_l.
  const std::vector<int>& level_nodes(int l) const;

  // Height (in edges) of the subtree rooted at the lowest common ancestor of
  // two leaves; 0 iff the leaves coincide.
  int lca_distance(int leaf_a, int leaf_b) const;
  int lca(int a, int b) const;

  // Longest leaf-to-leaf path in edges (D_T for NDCG relevance).
  int leaf_diameter() const { return leaf_diameter_; }

  bool leaves_equal_depth() const { return leaves_equal_depth_; }

private:
  HierarchyTree() = default;
  void finalize(long root_decl_line);

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> parent_;
  std::vector<std::vector<int>> children_;
  std::vector<int> level_;
  std::vector<int> subtree_height_;
  std::vector<int> leaves_;
  std::unordered_map<int, int> leaf_pos_;
  std::vector<std::vector<int>> level_nodes_;
  std::vector<int> level_sizes_;
  int root_ = -1;
  bool implicit_root_ = false;
  int n_ = 0;
  int height_ = 0;
  int leaf_diameter_ = 0;
  bool leaves_equal_depth_ = true;
  std::vector<int> decl_order_;  // node indices in declaration order, root included if declared
};

}  // namespace hiercos
