#include "hierarchy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace hiercos {

namespace {

struct RawLine {
  std::string id;
  std::string parent;
  long line = 0;
};

std::vector<RawLine> read_lines(std::string_view text) {
  std::vector<RawLine> out;
  long line_no = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t eol = text.find('\n', pos);
    std::string_view line = (eol == std::string_view::npos)
                                ? text.substr(pos)
                                : text.substr(pos, eol - pos);
    pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    size_t tab = line.find('\t');
    if (tab == std::string_view::npos || tab == 0 || tab + 1 >= line.size())
      throw Error(Err::MalformedLine, "expected `node_id<TAB>parent_id`", line_no);
    if (line.find('\t', tab + 1) != std::string_view::npos)
      throw Error(Err::MalformedLine, "extra tab in hierarchy line", line_no);
    out.push_back({std::string(line.substr(0, tab)), std::string(line.substr(tab + 1)), line_no});
  }
  return out;
}

}  // namespace

HierarchyTree HierarchyTree::parse(std::string_view text) {
  const std::vector<RawLine> lines = read_lines(text);

  HierarchyTree t;
  std::vector<std::string> parent_name(lines.size());
  std::vector<long> decl_line;
  int root_decl = -1;
  long root_decl_line = -1;
  for (const RawLine& rl : lines) {
    if (t.index_.count(rl.id))
      throw Error(Err::DuplicateNode, "duplicate node `" + rl.id + "`", rl.line);
    if (rl.parent == "-") {
      if (root_decl >= 0)
        throw Error(Err::MultipleRoots, "second root declaration `" + rl.id + "`", rl.line);
      root_decl = static_cast<int>(t.names_.size());
      root_decl_line = rl.line;
    }
    int idx = static_cast<int>(t.names_.size());
    t.index_.emplace(rl.id, idx);
    t.names_.push_back(rl.id);
    parent_name[idx] = rl.parent;
    decl_line.push_back(rl.line);
  }

  const int declared = static_cast<int>(t.names_.size());
  t.parent_.assign(declared, -1);
  for (int v = 0; v < declared; ++v) {
    if (v == root_decl) continue;
    auto it = t.index_.find(parent_name[v]);
    if (it == t.index_.end())
      throw Error(Err::DanglingParent,
                  "node `" + t.names_[v] + "` references undefined parent `" + parent_name[v] + "`",
                  decl_line[v]);
    t.parent_[v] = it->second;
  }

  // Cycle check: walk parent chains, coloring nodes (0 new, 1 on stack, 2 done).
  {
    std::vector<int> color(declared, 0);
    for (int start = 0; start < declared; ++start) {
      if (color[start]) continue;
      std::vector<int> stack;
      int v = start;
      while (v >= 0 && color[v] == 0) {
        color[v] = 1;
        stack.push_back(v);
        v = t.parent_[v];
      }
      if (v >= 0 && color[v] == 1)
        throw Error(Err::CycleDetected,
                    "cycle through node `" + t.names_[v] + "`", decl_line[v]);
      for (int u : stack) color[u] = 2;
    }
  }

  if (root_decl < 0) {
    // Acyclic with every parent resolved implies some `-` line exists, so the
    // only way here is an empty document.
    throw Error(Err::MissingRoot, "no root declaration (`node_id<TAB>-`) found");
  }

  t.decl_order_.resize(declared);
  for (int v = 0; v < declared; ++v) t.decl_order_[v] = v;

  // A childless `-` node is a degenerate single-class tree hanging off an
  // implicit root; a `-` node with children is the named root itself.
  bool has_child = false;
  for (int v = 0; v < declared; ++v)
    if (t.parent_[v] == root_decl) { has_child = true; break; }

  if (has_child) {
    t.root_ = root_decl;
    t.implicit_root_ = false;
  } else {
    t.root_ = declared;
    t.implicit_root_ = true;
    t.names_.push_back("");
    t.parent_[root_decl] = t.root_;
    t.parent_.push_back(-1);
  }

  t.finalize(root_decl_line);
  return t;
}

void HierarchyTree::finalize(long root_decl_line) {
  const int total = static_cast<int>(names_.size());
  children_.assign(total, {});
  for (int v : decl_order_)
    if (parent_[v] >= 0) children_[parent_[v]].push_back(v);

  level_.assign(total, -1);
  level_[root_] = 0;
  // Declaration order is not guaranteed to be topological; fixpoint over the
  // parent links instead (tree is already known to be acyclic and rooted).
  {
    std::vector<int> order;
    order.reserve(total);
    order.push_back(root_);
    for (size_t i = 0; i < order.size(); ++i)
      for (int c : children_[order[i]]) order.push_back(c);
    if (static_cast<int>(order.size()) != total)
      throw Error(Err::CycleDetected, "unreachable nodes in hierarchy", root_decl_line);
    for (int v : order)
      if (v != root_) level_[v] = level_[parent_[v]] + 1;
  }

  n_ = total - 1;
  height_ = 0;
  for (int v = 0; v < total; ++v) height_ = std::max(height_, level_[v]);

  level_nodes_.assign(height_, {});
  for (int v : decl_order_)
    if (v != root_) level_nodes_[level_[v] - 1].push_back(v);
  level_sizes_.resize(height_);
  for (int l = 0; l < height_; ++l) level_sizes_[l] = static_cast<int>(level_nodes_[l].size());

  for (int v : decl_order_)
    if (children_[v].empty() && v != root_) {
      leaf_pos_.emplace(v, static_cast<int>(leaves_.size()));
      leaves_.push_back(v);
    }

  // Subtree heights and the longest leaf-to-leaf path, bottom-up.
  subtree_height_.assign(total, 0);
  leaf_diameter_ = 0;
  {
    std::vector<int> order;
    order.push_back(root_);
    for (size_t i = 0; i < order.size(); ++i)
      for (int c : children_[order[i]]) order.push_back(c);
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      int v = *it;
      int best1 = -1, best2 = -1;  // two deepest leaf depths among children, in edges from v
      for (int c : children_[v]) {
        int d = subtree_height_[c] + 1;
        if (d > best1) { best2 = best1; best1 = d; }
        else if (d > best2) { best2 = d; }
      }
      subtree_height_[v] = std::max(best1, 0);
      if (best2 >= 0) leaf_diameter_ = std::max(leaf_diameter_, best1 + best2);
    }
  }

  leaves_equal_depth_ = true;
  for (int v : leaves_)
    if (level_[v] != height_) { leaves_equal_depth_ = false; break; }
}

HierarchyTree HierarchyTree::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Err::IoError, "cannot open hierarchy file `" + path + "`");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.what());
  }
}

std::string HierarchyTree::serialize() const {
  std::string out;
  for (int v : decl_order_) {
    out += names_[v];
    out += '\t';
    if (v == root_ || (implicit_root_ && parent_[v] == root_))
      out += '-';
    else
      out += names_[parent_[v]];
    out += '\n';
  }
  return out;
}

bool HierarchyTree::has_node(std::string_view id) const {
  return index_.count(std::string(id)) > 0;
}

int HierarchyTree::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end())
    throw Error(Err::UnknownNode, "unknown node `" + std::string(id) + "`");
  return it->second;
}

int HierarchyTree::leaf_pos(int v) const {
  auto it = leaf_pos_.find(v);
  if (it == leaf_pos_.end())
    throw Error(Err::NotALeaf, "node `" + names_.at(v) + "` is not a leaf");
  return it->second;
}

std::vector<int> HierarchyTree::ancestors(int v) const {
  if (v < 0 || v >= total_nodes()) throw Error(Err::UnknownNode, "node index out of range");
  std::vector<int> out;
  for (int p = parent_[v]; p >= 0 && p != root_; p = parent_[p]) out.push_back(p);
  return out;
}

std::vector<int> HierarchyTree::descendants(int v) const {
  if (v < 0 || v >= total_nodes()) throw Error(Err::UnknownNode, "node index out of range");
  std::vector<int> out;
  std::vector<int> stack(children_[v].rbegin(), children_[v].rend());
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    out.push_back(u);
    for (auto it = children_[u].rbegin(); it != children_[u].rend(); ++it) stack.push_back(*it);
  }
  return out;
}

const std::vector<int>& HierarchyTree::level_nodes(int l) const {
  if (l < 1 || l > height_)
    throw Error(Err::LevelOutOfRange,
                "level " + std::to_string(l) + " outside [1, " + std::to_string(height_) + "]");
  return level_nodes_[l - 1];
}

int HierarchyTree::lca(int a, int b) const {
  int u = a, v = b;
  while (u != v) {
    if (level_[u] >= level_[v]) u = parent_[u];
    else v = parent_[v];
  }
  return u;
}

int HierarchyTree::lca_distance(int leaf_a, int leaf_b) const {
  leaf_pos(leaf_a);  // validates leaf-ness
  leaf_pos(leaf_b);
  if (leaf_a == leaf_b) return 0;
  return subtree_height_[lca(leaf_a, leaf_b)];
}

}  // namespace hiercos
