#include "subspace.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace hiercos {

namespace {

// Random orthonormal frame: Gaussian matrix + modified Gram-Schmidt with one
// re-orthogonalization pass.
std::vector<Vec> random_orthonormal(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Vec> q(n, Vec(n));
  for (auto& col : q)
    for (double& v : col) v = gauss(rng);
  for (int i = 0; i < n; ++i) {
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j < i; ++j) {
        double dot = 0;
        for (int k = 0; k < n; ++k) dot += q[i][k] * q[j][k];
        for (int k = 0; k < n; ++k) q[i][k] -= dot * q[j][k];
      }
    }
    double norm = 0;
    for (double v : q[i]) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : q[i]) v /= norm;
  }
  return q;
}

}  // namespace

std::pair<BasisAssignment, SubspaceIndex> assign_bases(const HierarchyTree& tree,
                                                       std::optional<std::uint64_t> rotation_seed) {
  const int total = tree.total_nodes();
  const int n = tree.node_count();

  BasisAssignment bases;
  bases.tree = &tree;
  bases.axis_of.assign(total, -1);
  bases.node_of.reserve(n);
  for (int l = 1; l <= tree.height(); ++l)
    for (int v : tree.level_nodes(l)) {
      bases.axis_of[v] = static_cast<int>(bases.node_of.size());
      bases.node_of.push_back(v);
    }
  if (rotation_seed) {
    bases.frame = random_orthonormal(n, *rotation_seed);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double dot = 0;
        for (int k = 0; k < n; ++k) dot += bases.frame[i][k] * bases.frame[j][k];
        if (std::abs(dot - (i == j ? 1.0 : 0.0)) > 1e-10)
          throw Error(Err::InvalidArgument, "rotation frame failed the orthonormality check");
      }
  }

  SubspaceIndex idx;
  idx.basis.assign(total, {});
  idx.complement.assign(total, {});
  idx.path.assign(total, {});
  idx.level.resize(tree.height());
  for (int l = 1; l <= tree.height(); ++l) {
    auto& axes = idx.level[l - 1];
    for (int v : tree.level_nodes(l)) axes.push_back(bases.axis_of[v]);
    std::sort(axes.begin(), axes.end());
  }

  std::vector<char> member(n);
  for (int v = 0; v < total; ++v) {
    if (v == tree.root()) continue;
    auto& e = idx.basis[v];
    for (int a : tree.ancestors(v)) e.push_back(bases.axis_of[a]);
    e.push_back(bases.axis_of[v]);
    for (int d : tree.descendants(v)) e.push_back(bases.axis_of[d]);
    std::sort(e.begin(), e.end());

    std::fill(member.begin(), member.end(), 0);
    for (int a : e) member[a] = 1;
    auto& c = idx.complement[v];
    for (int a = 0; a < n; ++a)
      if (!member[a]) c.push_back(a);

    auto anc = tree.ancestors(v);
    auto& p = idx.path[v];
    for (auto it = anc.rbegin(); it != anc.rend(); ++it) p.push_back(bases.axis_of[*it]);
    p.push_back(bases.axis_of[v]);
  }
  return {std::move(bases), std::move(idx)};
}

Vec frame_components(const BasisAssignment& bases, const Vec& ambient) {
  if (!bases.rotated()) return ambient;
  const int n = bases.dim();
  if (static_cast<int>(ambient.size()) != n)
    throw Error(Err::DimensionMismatch, "ambient vector has wrong dimension");
  Vec out(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double dot = 0;
    for (int k = 0; k < n; ++k) dot += ambient[k] * bases.frame[i][k];
    out[i] = dot;
  }
  return out;
}

Vec project(const Vec& x, std::span<const int> axes) {
  const int n = static_cast<int>(x.size());
  Vec out(n, 0.0);
  for (int a : axes) {
    if (a < 0 || a >= n)
      throw Error(Err::AxisOutOfRange, "axis " + std::to_string(a) + " outside [0, " +
                                           std::to_string(n) + ")");
    out[a] = x[a];
  }
  return out;
}

double subspace_distance_sq(const Vec& x, int node, const SubspaceIndex& idx) {
  if (node < 0 || node >= static_cast<int>(idx.basis.size()) || idx.basis[node].empty())
    throw Error(Err::UnknownNode, "no subspace for node index " + std::to_string(node));
  double sum = 0;
  for (int a : idx.complement[node]) sum += x[a] * x[a];
  return sum;
}

double projection_norm(const Vec& x, int node, const SubspaceIndex& idx) {
  if (node < 0 || node >= static_cast<int>(idx.basis.size()) || idx.basis[node].empty())
    throw Error(Err::UnknownNode, "no subspace for node index " + std::to_string(node));
  double sum = 0;
  for (int a : idx.basis[node]) sum += x[a] * x[a];
  return std::sqrt(sum);
}

Vec construct_ideal_vector(const HierarchyTree& tree, const BasisAssignment& bases,
                           int leaf, std::span<const double> magnitudes) {
  tree.leaf_pos(leaf);  // throws NotALeaf
  std::vector<int> path;
  {
    auto anc = tree.ancestors(leaf);
    path.assign(anc.rbegin(), anc.rend());
    path.push_back(leaf);
  }
  if (magnitudes.size() != path.size())
    throw Error(Err::DimensionMismatch,
                "expected " + std::to_string(path.size()) + " magnitudes, got " +
                    std::to_string(magnitudes.size()));
  for (double m : magnitudes)
    if (!(m > 0))
      throw Error(Err::NonPositiveMagnitude, "ideal-vector magnitudes must be strictly positive");
  Vec x(bases.dim(), 0.0);
  for (size_t i = 0; i < path.size(); ++i) x[bases.axis_of[path[i]]] = magnitudes[i];
  return x;
}

HavsReport havs_check(const HierarchyTree& tree, const BasisAssignment& bases,
                      const SubspaceIndex& idx, int trials, std::uint64_t seed) {
  if (trials < 1) throw Error(Err::InvalidArgument, "havs_check needs at least one trial");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.1, 2.0);
  const auto& leaves = tree.leaves();
  const int K = static_cast<int>(leaves.size());

  HavsReport report;
  std::vector<double> dist(K);
  for (int t = 0; t < trials; ++t) {
    int yi = static_cast<int>(rng() % K);
    int leaf = leaves[yi];
    std::vector<double> mags(tree.level(leaf));
    for (double& m : mags) m = mag(rng);
    Vec x = construct_ideal_vector(tree, bases, leaf, mags);

    for (int j = 0; j < K; ++j) dist[j] = std::sqrt(subspace_distance_sq(x, leaves[j], idx));
    std::vector<int> tree_dist(K);
    for (int j = 0; j < K; ++j) tree_dist[j] = tree.lca_distance(leaf, leaves[j]);
    ++report.trials;
    // D_i = 0 for the ideal vector, so the ordering condition reduces to
    // comparing |D_j| against |D_k| directly.
    for (int j = 0; j < K; ++j)
      for (int k = 0; k < K; ++k) {
        if (tree_dist[j] >= tree_dist[k]) continue;
        ++report.checks;
        if (!(std::abs(dist[yi] - dist[j]) < std::abs(dist[yi] - dist[k]))) ++report.violations;
      }
  }
  return report;
}

}  // namespace hiercos
