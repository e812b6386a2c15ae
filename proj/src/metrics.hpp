#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>

#include "hierarchy.hpp"

namespace hiercos {

// Preference structure for one true class: leaves grouped by LCA distance
// (empty distances dropped, survivors re-indexed compactly), the desired
// order z, decay weights eta, and the worst-order normalizers.
struct RankTemplate {
  int true_leaf = -1;             // node index
  int K = 0;
  std::vector<int> rank_of;       // leaf position -> compact rank
  std::vector<int> group_size;    // rank -> multiplicity |S^i|
  std::vector<int> z;             // desired order, non-decreasing, z[0] = 0
  std::vector<int> z_rev;         // z reversed
  std::vector<double> eta;        // strictly positive, non-increasing, eta[0] = 1
  double s_max_full = 0;          // sum eta_j |z_j - z_rev_j|

  // Worst top-k normalizer: z*_k = [z_k..z_1, z_{k+1}..z_K], weights cut at k.
  double s_max_at(int k) const;
  std::vector<int> worst_order_at(int k) const;
};

RankTemplate rank_template(const HierarchyTree& tree, int true_leaf);

// Maps a ranked prediction (leaf positions, most preferred first) through the
// template's rank function.
std::vector<int> predicted_order(const RankTemplate& tpl, std::span<const int> ranked);

// 1 - s/s_max clamped to [0, 1]. The raw ratio can exceed 1 for orders that
// beat the plain reversal under the position-dependent weights, so the same
// clamp HOPS@k carries is applied here.
double hops(const RankTemplate& tpl, std::span<const int> zhat);

// max(0, 1 - s^k / s^k_max) with eta zeroed past k; when the normalizer
// degenerates to 0 (k = 1), falls back to the exact-match indicator, which
// makes batch HOPS@1 equal top-1 accuracy.
double hops_at_k(const RankTemplate& tpl, std::span<const int> zhat, int k);

// One evaluated prediction. `ranked` is always materialized (from dense
// scores or given directly); optional per-level data unlocks FPA/TICE/MNR.
struct EvalSample {
  std::string id;
  int true_leaf_pos = -1;
  std::vector<int> ranked;                       // leaf positions
  std::vector<int> level_path;                   // node indices, may be empty
  std::vector<std::vector<double>> level_scores; // per level, aligned with level_nodes
};

struct MetricReport {
  long samples = 0;
  double accuracy = 0;
  double mistake_severity = 0;
  long mistakes = 0;
  double hops = 0;
  double mrr = 0;
  std::optional<double> mnr;
  std::optional<double> fpa;
  std::optional<double> tice;
  std::optional<double> mean_cosine_alignment;
  struct AtK {
    int k = 0;
    double ahd = 0;
    double hp = 0;
    double hr = 0;
    double hops = 0;
    double ndcg = 0;
    double correct_order = 0;
  };
  std::vector<AtK> at_k;
};

// Caches one RankTemplate per distinct true class.
class TemplateCache {
public:
  explicit TemplateCache(const HierarchyTree& tree) : tree_(&tree) {}
  const RankTemplate& get(int true_leaf_pos);

private:
  const HierarchyTree* tree_;
  std::map<int, RankTemplate> cache_;
};

double mistake_severity(const HierarchyTree& tree, std::span<const EvalSample> batch,
                        long* mistake_count = nullptr);
double ahd_at_k(const HierarchyTree& tree, std::span<const EvalSample> batch, int k);
std::pair<double, double> hp_hr_at_k(const HierarchyTree& tree,
                                     std::span<const EvalSample> batch, int k);
double fpa(const HierarchyTree& tree, std::span<const EvalSample> batch);
double tice(const HierarchyTree& tree, std::span<const EvalSample> batch);
double mrr(std::span<const EvalSample> batch);
double mnr(const HierarchyTree& tree, std::span<const EvalSample> batch);
double ndcg_at_k(const HierarchyTree& tree, std::span<const EvalSample> batch, int k);
double correct_order_fraction(const HierarchyTree& tree, std::span<const EvalSample> batch,
                              int k, TemplateCache* cache = nullptr);

// Tree-aware relevance for NDCG: 1 - (edges from each class to their LCA) / D_T.
double ndcg_relevance(const HierarchyTree& tree, int leaf_a, int leaf_b);

MetricReport evaluate(const HierarchyTree& tree, std::span<const EvalSample> batch,
                      std::span<const int> ks);

}  // namespace hiercos
