#include "metrics.hpp"

#include <algorithm>
#include <cmath>

#include "inference.hpp"

namespace hiercos {

namespace {

void check_k(int k, int K) {
  if (k < 1 || k > K)
    throw Error(Err::KOutOfRange,
                "k = " + std::to_string(k) + " outside [1, " + std::to_string(K) + "]");
}

void check_batch(std::span<const EvalSample> batch) {
  if (batch.empty()) throw Error(Err::InvalidArgument, "empty evaluation batch");
}

std::vector<int> true_path(const HierarchyTree& tree, int leaf) {
  auto anc = tree.ancestors(leaf);
  std::vector<int> path(anc.rbegin(), anc.rend());
  path.push_back(leaf);
  return path;
}

void require_level_paths(std::span<const EvalSample> batch) {
  for (const auto& s : batch)
    if (s.level_path.empty())
      throw Error(Err::MissingLevelPredictions,
                  "sample `" + s.id + "` carries no per-level predictions");
}

}  // namespace

RankTemplate rank_template(const HierarchyTree& tree, int true_leaf) {
  const int pos = tree.leaf_pos(true_leaf);
  const auto& leaves = tree.leaves();
  const int K = static_cast<int>(leaves.size());

  // Group leaves by LCA distance; ordered map drops nothing but skips gaps.
  std::map<int, std::vector<int>> by_dist;
  for (int j = 0; j < K; ++j)
    by_dist[tree.lca_distance(true_leaf, leaves[j])].push_back(j);

  RankTemplate tpl;
  tpl.true_leaf = true_leaf;
  tpl.K = K;
  tpl.rank_of.assign(K, -1);
  int rank = 0;
  for (const auto& [dist, members] : by_dist) {
    (void)dist;
    for (int j : members) tpl.rank_of[j] = rank;
    tpl.group_size.push_back(static_cast<int>(members.size()));
    ++rank;
  }

  tpl.z.reserve(K);
  tpl.eta.reserve(K);
  for (int r = 0; r < static_cast<int>(tpl.group_size.size()); ++r) {
    const int m = tpl.group_size[r];
    const double hi = std::ldexp(1.0, -r);        // 2^-r at the first occurrence
    const double lo = std::ldexp(1.0, -(r + 1));  // open endpoint of the linear ramp
    for (int t = 0; t < m; ++t) {
      tpl.z.push_back(r);
      tpl.eta.push_back((1.0 - static_cast<double>(t) / m) * hi +
                        (static_cast<double>(t) / m) * lo);
    }
  }
  tpl.z_rev.assign(tpl.z.rbegin(), tpl.z.rend());
  tpl.s_max_full = 0;
  for (int j = 0; j < K; ++j) tpl.s_max_full += tpl.eta[j] * std::abs(tpl.z[j] - tpl.z_rev[j]);
  (void)pos;
  return tpl;
}

std::vector<int> RankTemplate::worst_order_at(int k) const {
  check_k(k, K);
  std::vector<int> out(z.size());
  for (int j = 0; j < k; ++j) out[j] = z[k - 1 - j];
  for (int j = k; j < K; ++j) out[j] = z[j];
  return out;
}

double RankTemplate::s_max_at(int k) const {
  const std::vector<int> worst = worst_order_at(k);
  double s = 0;
  for (int j = 0; j < k; ++j) s += eta[j] * std::abs(z[j] - worst[j]);
  return s;
}

std::vector<int> predicted_order(const RankTemplate& tpl, std::span<const int> ranked) {
  if (static_cast<int>(ranked.size()) != tpl.K)
    throw Error(Err::NotAPermutation, "ranked list has wrong length");
  std::vector<char> seen(tpl.K, 0);
  std::vector<int> zhat(tpl.K);
  for (int j = 0; j < tpl.K; ++j) {
    const int leaf = ranked[j];
    if (leaf < 0 || leaf >= tpl.K || seen[leaf])
      throw Error(Err::NotAPermutation, "ranked list is not a permutation of the leaves");
    seen[leaf] = 1;
    zhat[j] = tpl.rank_of[leaf];
  }
  return zhat;
}

double hops(const RankTemplate& tpl, std::span<const int> zhat) {
  if (static_cast<int>(zhat.size()) != tpl.K)
    throw Error(Err::InvalidArgument, "predicted order has wrong length");
  double s = 0;
  for (int j = 0; j < tpl.K; ++j) s += tpl.eta[j] * std::abs(tpl.z[j] - zhat[j]);
  if (tpl.s_max_full <= 0) return s == 0 ? 1.0 : 0.0;  // K = 1
  return std::clamp(1.0 - s / tpl.s_max_full, 0.0, 1.0);
}

double hops_at_k(const RankTemplate& tpl, std::span<const int> zhat, int k) {
  check_k(k, tpl.K);
  if (static_cast<int>(zhat.size()) != tpl.K)
    throw Error(Err::InvalidArgument, "predicted order has wrong length");
  double s = 0;
  for (int j = 0; j < k; ++j) s += tpl.eta[j] * std::abs(tpl.z[j] - zhat[j]);
  const double s_max = tpl.s_max_at(k);
  if (s_max <= 0) return s == 0 ? 1.0 : 0.0;
  return std::max(0.0, 1.0 - s / s_max);
}

const RankTemplate& TemplateCache::get(int true_leaf_pos) {
  auto it = cache_.find(true_leaf_pos);
  if (it == cache_.end())
    it = cache_.emplace(true_leaf_pos, rank_template(*tree_, tree_->leaves()[true_leaf_pos]))
             .first;
  return it->second;
}

double mistake_severity(const HierarchyTree& tree, std::span<const EvalSample> batch,
                        long* mistake_count) {
  check_batch(batch);
  const auto& leaves = tree.leaves();
  long mistakes = 0;
  double sum = 0;
  for (const auto& s : batch) {
    if (s.ranked.front() == s.true_leaf_pos) continue;
    ++mistakes;
    sum += tree.lca_distance(leaves[s.true_leaf_pos], leaves[s.ranked.front()]);
  }
  if (mistake_count) *mistake_count = mistakes;
  return mistakes == 0 ? 0.0 : sum / static_cast<double>(mistakes);
}

double ahd_at_k(const HierarchyTree& tree, std::span<const EvalSample> batch, int k) {
  check_batch(batch);
  check_k(k, tree.leaf_count());
  const auto& leaves = tree.leaves();
  double total = 0;
  for (const auto& s : batch) {
    double sum = 0;
    for (int j = 0; j < k; ++j)
      sum += tree.lca_distance(leaves[s.true_leaf_pos], leaves[s.ranked[j]]);
    total += sum / k;
  }
  return total / static_cast<double>(batch.size());
}

std::pair<double, double> hp_hr_at_k(const HierarchyTree& tree,
                                     std::span<const EvalSample> batch, int k) {
  check_batch(batch);
  check_k(k, tree.leaf_count());
  const auto& leaves = tree.leaves();
  double hp_total = 0, hr_total = 0;
  for (const auto& s : batch) {
    const auto truth = true_path(tree, leaves[s.true_leaf_pos]);
    double hp_sum = 0, hr_sum = 0;
    for (int j = 0; j < k; ++j) {
      const auto pred = true_path(tree, leaves[s.ranked[j]]);
      int common = 0;
      for (int a : pred)
        if (std::find(truth.begin(), truth.end(), a) != truth.end()) ++common;
      hp_sum += static_cast<double>(common) / pred.size();
      hr_sum += static_cast<double>(common) / truth.size();
    }
    hp_total += hp_sum / k;
    hr_total += hr_sum / k;
  }
  const double count = static_cast<double>(batch.size());
  return {hp_total / count, hr_total / count};
}

double fpa(const HierarchyTree& tree, std::span<const EvalSample> batch) {
  check_batch(batch);
  if (!tree.leaves_equal_depth())
    throw Error(Err::UnequalLeafDepths, "full-path accuracy needs all leaves at the same depth");
  require_level_paths(batch);
  const auto& leaves = tree.leaves();
  long hits = 0;
  for (const auto& s : batch) {
    if (static_cast<int>(s.level_path.size()) != tree.height())
      throw Error(Err::MissingLevelPredictions,
                  "sample `" + s.id + "` has a partial level path");
    if (s.level_path == true_path(tree, leaves[s.true_leaf_pos])) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(batch.size());
}

double tice(const HierarchyTree& tree, std::span<const EvalSample> batch) {
  check_batch(batch);
  require_level_paths(batch);
  long invalid = 0;
  for (const auto& s : batch)
    if (!is_consistent_path(tree, s.level_path)) ++invalid;
  return static_cast<double>(invalid) / static_cast<double>(batch.size());
}

double mrr(std::span<const EvalSample> batch) {
  check_batch(batch);
  double total = 0;
  for (const auto& s : batch) {
    auto it = std::find(s.ranked.begin(), s.ranked.end(), s.true_leaf_pos);
    total += 1.0 / (1.0 + static_cast<double>(it - s.ranked.begin()));  // 1-based rank
  }
  return total / static_cast<double>(batch.size());
}

double mnr(const HierarchyTree& tree, std::span<const EvalSample> batch) {
  check_batch(batch);
  if (!tree.leaves_equal_depth())
    throw Error(Err::UnequalLeafDepths, "mean normalized rank needs all leaves at the same depth");
  const auto& leaves = tree.leaves();
  const int H = tree.height();
  double total = 0;
  for (const auto& s : batch) {
    if (static_cast<int>(s.level_scores.size()) != H)
      throw Error(Err::MissingLevelPredictions,
                  "sample `" + s.id + "` carries no per-level scores");
    const auto truth = true_path(tree, leaves[s.true_leaf_pos]);
    double acc = 0;
    for (int l = 1; l <= H; ++l) {
      const auto& nodes = tree.level_nodes(l);
      const auto& scores = s.level_scores[l - 1];
      if (scores.size() != nodes.size())
        throw Error(Err::RowLengthMismatch, "level score vector has wrong length");
      int true_idx = -1;
      for (int j = 0; j < static_cast<int>(nodes.size()); ++j)
        if (nodes[j] == truth[l - 1]) { true_idx = j; break; }
      // 0-based rank: strictly better scores, plus earlier equal scores
      // (stable descending order with index tie-break).
      int rank0 = 0;
      for (int j = 0; j < static_cast<int>(nodes.size()); ++j) {
        if (j == true_idx) continue;
        if (scores[j] > scores[true_idx] || (scores[j] == scores[true_idx] && j < true_idx))
          ++rank0;
      }
      acc += static_cast<double>(rank0) / static_cast<double>(nodes.size());
    }
    total += acc / H;
  }
  return total / static_cast<double>(batch.size());
}

double ndcg_relevance(const HierarchyTree& tree, int leaf_a, int leaf_b) {
  const int diameter = tree.leaf_diameter();
  if (diameter == 0) return 1.0;  // single-class tree
  const int l = tree.level(tree.lca(leaf_a, leaf_b));
  const int edges = (tree.level(leaf_a) - l) + (tree.level(leaf_b) - l);
  return 1.0 - static_cast<double>(edges) / diameter;
}

double ndcg_at_k(const HierarchyTree& tree, std::span<const EvalSample> batch, int k) {
  check_batch(batch);
  check_k(k, tree.leaf_count());
  const auto& leaves = tree.leaves();
  double total = 0;
  for (const auto& s : batch) {
    const int truth = leaves[s.true_leaf_pos];
    std::vector<double> rel(leaves.size());
    for (size_t j = 0; j < leaves.size(); ++j) rel[j] = ndcg_relevance(tree, truth, leaves[j]);
    double dcg = 0;
    for (int j = 0; j < k; ++j) dcg += rel[s.ranked[j]] / std::log2(j + 2.0);
    std::vector<double> ideal = rel;
    std::sort(ideal.begin(), ideal.end(), std::greater<>());
    double idcg = 0;
    for (int j = 0; j < k; ++j) idcg += ideal[j] / std::log2(j + 2.0);
    total += idcg > 0 ? dcg / idcg : 1.0;
  }
  return total / static_cast<double>(batch.size());
}

double correct_order_fraction(const HierarchyTree& tree, std::span<const EvalSample> batch,
                              int k, TemplateCache* cache) {
  check_batch(batch);
  check_k(k, tree.leaf_count());
  TemplateCache local(tree);
  TemplateCache& templates = cache ? *cache : local;
  long hits = 0;
  for (const auto& s : batch) {
    const RankTemplate& tpl = templates.get(s.true_leaf_pos);
    const auto zhat = predicted_order(tpl, s.ranked);
    bool ok = true;
    for (int j = 0; j < k; ++j)
      if (zhat[j] != tpl.z[j]) { ok = false; break; }
    if (ok) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(batch.size());
}

MetricReport evaluate(const HierarchyTree& tree, std::span<const EvalSample> batch,
                      std::span<const int> ks) {
  check_batch(batch);
  TemplateCache templates(tree);

  MetricReport report;
  report.samples = static_cast<long>(batch.size());

  long correct = 0;
  double hops_sum = 0;
  for (const auto& s : batch) {
    if (s.ranked.front() == s.true_leaf_pos) ++correct;
    const RankTemplate& tpl = templates.get(s.true_leaf_pos);
    hops_sum += hops(tpl, predicted_order(tpl, s.ranked));
  }
  report.accuracy = static_cast<double>(correct) / report.samples;
  report.hops = hops_sum / report.samples;
  report.mistake_severity = mistake_severity(tree, batch, &report.mistakes);
  report.mrr = mrr(batch);

  const bool have_paths =
      std::all_of(batch.begin(), batch.end(),
                  [](const EvalSample& s) { return !s.level_path.empty(); });
  if (have_paths) {
    report.tice = tice(tree, batch);
    if (tree.leaves_equal_depth()) report.fpa = fpa(tree, batch);
  }
  const bool have_level_scores =
      std::all_of(batch.begin(), batch.end(), [&](const EvalSample& s) {
        return static_cast<int>(s.level_scores.size()) == tree.height();
      });
  if (have_level_scores && tree.leaves_equal_depth()) report.mnr = mnr(tree, batch);

  for (int k : ks) {
    check_k(k, tree.leaf_count());
    MetricReport::AtK row;
    row.k = k;
    row.ahd = ahd_at_k(tree, batch, k);
    std::tie(row.hp, row.hr) = hp_hr_at_k(tree, batch, k);
    double hk = 0;
    for (const auto& s : batch) {
      const RankTemplate& tpl = templates.get(s.true_leaf_pos);
      hk += hops_at_k(tpl, predicted_order(tpl, s.ranked), k);
    }
    row.hops = hk / report.samples;
    row.ndcg = ndcg_at_k(tree, batch, k);
    row.correct_order = correct_order_fraction(tree, batch, k, &templates);
    report.at_k.push_back(row);
  }
  return report;
}

}  // namespace hiercos
