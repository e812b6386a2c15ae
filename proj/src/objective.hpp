#pragma once

#include "subspace.hpp"

namespace hiercos {

// Level blocks with L2 norm below this are treated as exactly zero when
// normalizing in the regularizer.
inline constexpr double kZeroBlockTol = 1e-12;

enum class WeightOrder {
  increasing,  // w_l = exp(1/(h+1-l)), largest at the leaf level
  reversed,    // same weights flipped across the path (ablation)
};

// Strictly increasing level weights w_l = exp(1/(h+1-l)), l = 1..h.
std::vector<double> level_weights(int h);

// Length-n simplex vector supported on the leaf's root path; the level-l path
// node gets w_l / sum(w).
Vec target_distribution(const HierarchyTree& tree, const BasisAssignment& bases,
                        int leaf, WeightOrder order = WeightOrder::increasing);

// Softmax over |x_i| with max subtraction.
Vec predicted_distribution(const Vec& x);

// KL(P || Phat) accumulated over P's support.
double kl_loss(const Vec& target, const Vec& predicted);

// Level-wise L1 deviation of the normalized magnitude blocks from the path
// one-hots for l <= h, plus the L1 mass of normalized blocks for l > h.
// A zero-norm block contributes 1 for l <= h and 0 for l > h.
double reg_loss(const Vec& x, int leaf, const HierarchyTree& tree, const SubspaceIndex& idx);

struct LossBreakdown {
  double kl = 0;
  double reg = 0;
  double total = 0;
  double alpha = 0;
};

LossBreakdown total_loss(const Vec& x, int leaf, double alpha, const HierarchyTree& tree,
                         const BasisAssignment& bases, const SubspaceIndex& idx,
                         WeightOrder order = WeightOrder::increasing);

// d(total_loss)/dx. |x_i| contributes sign(x_i), with subgradient 0 at x_i=0.
Vec loss_gradient(const Vec& x, int leaf, double alpha, const HierarchyTree& tree,
                  const BasisAssignment& bases, const SubspaceIndex& idx,
                  WeightOrder order = WeightOrder::increasing);

}  // namespace hiercos
