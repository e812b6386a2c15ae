#include "objective.hpp"

#include <algorithm>
#include <cmath>

namespace hiercos {

namespace {

inline double sign_of(double v) { return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0); }

void check_finite(const Vec& x) {
  for (double v : x)
    if (!std::isfinite(v)) throw Error(Err::NonFiniteInput, "non-finite vector component");
}

std::vector<int> leaf_path(const HierarchyTree& tree, int leaf) {
  auto anc = tree.ancestors(leaf);
  std::vector<int> path(anc.rbegin(), anc.rend());
  path.push_back(leaf);
  return path;
}

}  // namespace

std::vector<double> level_weights(int h) {
  if (h < 1) throw Error(Err::NonPositiveDepth, "leaf depth must be >= 1");
  std::vector<double> w(h);
  for (int l = 1; l <= h; ++l) w[l - 1] = std::exp(1.0 / (h + 1 - l));
  return w;
}

Vec target_distribution(const HierarchyTree& tree, const BasisAssignment& bases,
                        int leaf, WeightOrder order) {
  tree.leaf_pos(leaf);
  const auto path = leaf_path(tree, leaf);
  std::vector<double> w = level_weights(static_cast<int>(path.size()));
  if (order == WeightOrder::reversed) std::reverse(w.begin(), w.end());
  double sum = 0;
  for (double v : w) sum += v;
  Vec p(bases.dim(), 0.0);
  for (size_t l = 0; l < path.size(); ++l) p[bases.axis_of[path[l]]] = w[l] / sum;
  return p;
}

Vec predicted_distribution(const Vec& x) {
  check_finite(x);
  double m = 0;
  for (double v : x) m = std::max(m, std::abs(v));
  Vec p(x.size());
  double sum = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    p[i] = std::exp(std::abs(x[i]) - m);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return p;
}

double kl_loss(const Vec& target, const Vec& predicted) {
  double kl = 0;
  for (size_t i = 0; i < target.size(); ++i)
    if (target[i] > 0) kl += target[i] * (std::log(target[i]) - std::log(predicted[i]));
  return kl;
}

double reg_loss(const Vec& x, int leaf, const HierarchyTree& tree, const SubspaceIndex& idx) {
  tree.leaf_pos(leaf);
  const int h = tree.level(leaf);
  const int H = tree.height();
  const auto& path_axes = idx.path[leaf];

  double loss = 0;
  for (int l = 1; l <= H; ++l) {
    const auto& axes = idx.level[l - 1];
    double norm_sq = 0;
    for (int a : axes) norm_sq += x[a] * x[a];
    const double norm = std::sqrt(norm_sq);
    if (l <= h) {
      const int path_axis = path_axes[l - 1];
      if (norm < kZeroBlockTol) {
        loss += 1.0;  // ||delta_l||_1, the zero-block convention
        continue;
      }
      for (int a : axes) {
        double u = std::abs(x[a]) / norm;
        loss += (a == path_axis) ? std::abs(1.0 - u) : u;
      }
    } else {
      if (norm < kZeroBlockTol) continue;
      for (int a : axes) loss += std::abs(x[a]) / norm;
    }
  }
  return loss;
}

LossBreakdown total_loss(const Vec& x, int leaf, double alpha, const HierarchyTree& tree,
                         const BasisAssignment& bases, const SubspaceIndex& idx,
                         WeightOrder order) {
  if (alpha < 0) throw Error(Err::InvalidArgument, "alpha must be >= 0");
  LossBreakdown out;
  out.alpha = alpha;
  out.kl = kl_loss(target_distribution(tree, bases, leaf, order), predicted_distribution(x));
  out.reg = reg_loss(x, leaf, tree, idx);
  out.total = out.kl + alpha * out.reg;
  return out;
}

Vec loss_gradient(const Vec& x, int leaf, double alpha, const HierarchyTree& tree,
                  const BasisAssignment& bases, const SubspaceIndex& idx,
                  WeightOrder order) {
  check_finite(x);
  const int n = static_cast<int>(x.size());
  const Vec target = target_distribution(tree, bases, leaf, order);
  const Vec phat = predicted_distribution(x);

  // d KL / dx_j = sign(x_j) (Phat_j - P_j).
  Vec grad(n, 0.0);
  for (int j = 0; j < n; ++j) grad[j] = sign_of(x[j]) * (phat[j] - target[j]);

  if (alpha > 0) {
    const int h = tree.level(leaf);
    const int H = tree.height();
    const auto& path_axes = idx.path[leaf];
    for (int l = 1; l <= H; ++l) {
      const auto& axes = idx.level[l - 1];
      double norm_sq = 0;
      for (int a : axes) norm_sq += x[a] * x[a];
      const double norm = std::sqrt(norm_sq);
      if (norm < kZeroBlockTol) continue;  // constant contribution, zero gradient

      // With b_a = |x_a| and u = b / ||b||, the block term is
      //   sum_a s_a u_a (+1 constant for l <= h), s_a = -1 on the path axis.
      // d/db_f = s_f/||b|| - (sum_a s_a b_a) b_f / ||b||^3, chain sign(x_f).
      const int path_axis = (l <= h) ? path_axes[l - 1] : -1;
      double weighted = 0;
      for (int a : axes) weighted += (a == path_axis ? -1.0 : 1.0) * std::abs(x[a]);
      for (int a : axes) {
        double s = (a == path_axis) ? -1.0 : 1.0;
        double db = s / norm - weighted * std::abs(x[a]) / (norm * norm * norm);
        grad[a] += alpha * sign_of(x[a]) * db;
      }
    }
  }
  return grad;
}

}  // namespace hiercos
