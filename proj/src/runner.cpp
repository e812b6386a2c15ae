#include "runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace hiercos {

std::vector<int> resolve_ks(std::vector<int> ks, bool explicit_ks, int K) {
  if (ks.empty() && !explicit_ks) ks = {1, 5, 20};
  if (explicit_ks) {
    for (int k : ks)
      if (k < 1 || k > K)
        throw Error(Err::KOutOfRange,
                    "k = " + std::to_string(k) + " outside [1, " + std::to_string(K) + "]");
  } else {
    std::erase_if(ks, [K](int k) { return k < 1 || k > K; });
  }
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  return ks;
}

std::string run_validate_tree(const std::string& hierarchy_path) {
  const HierarchyTree tree = HierarchyTree::parse_file(hierarchy_path);
  std::string summary = "n=" + std::to_string(tree.node_count()) +
                        " H=" + std::to_string(tree.height()) +
                        " K=" + std::to_string(tree.leaf_count()) + " K_l=";
  for (int l = 1; l <= tree.height(); ++l) {
    if (l > 1) summary += ",";
    summary += std::to_string(tree.level_sizes()[l - 1]);
  }
  return summary;
}

namespace {

std::vector<EvalSample> load_eval_batch(const HierarchyTree& tree, const EvalRunConfig& cfg) {
  PredictionFile preds = parse_predictions_file(tree, cfg.predictions_path);
  if (!cfg.levels_path.empty()) {
    attach_level_paths_file(tree, cfg.levels_path, &preds.samples);
  } else if (cfg.mode == LevelMode::leaf_ancestor_path) {
    // Level predictions derivable from the top-1 leaf; per-level argmax needs
    // node scores that prediction files do not carry.
    const auto& leaves = tree.leaves();
    for (EvalSample& s : preds.samples) {
      const int leaf = leaves[s.ranked.front()];
      auto anc = tree.ancestors(leaf);
      s.level_path.assign(anc.rbegin(), anc.rend());
      s.level_path.push_back(leaf);
    }
  }
  return std::move(preds.samples);
}

}  // namespace

EvalOutcome run_eval(const EvalRunConfig& cfg) {
  const HierarchyTree tree = HierarchyTree::parse_file(cfg.hierarchy_path);
  const std::vector<EvalSample> batch = load_eval_batch(tree, cfg);
  const std::vector<int> ks = resolve_ks(cfg.ks, cfg.ks_explicit, tree.leaf_count());

  EvalOutcome out;
  out.report = evaluate(tree, batch, ks);
  out.summary = report_summary_line(out.report);
  if (!cfg.out_path.empty())
    write_file(cfg.out_path, cfg.format == ReportFormat::json ? report_to_json(out.report)
                                                              : report_to_csv(out.report));
  return out;
}

namespace {

MetricReport eval_split(const HierarchyTree& tree, const SubspaceIndex& idx,
                        const TransformationModule& module,
                        const Dataset& data, std::span<const int> ks, LevelMode mode,
                        const std::string& id_prefix,
                        double* correct_order_full = nullptr) {
  std::vector<EvalSample> batch;
  batch.reserve(data.inputs.size());
  double cos_sum = 0;
  for (size_t i = 0; i < data.inputs.size(); ++i) {
    const Vec x = module.forward(data.inputs[i]);
    EvalSample s;
    s.id = id_prefix + std::to_string(i + 1);
    s.true_leaf_pos = tree.leaf_pos(data.leaf[i]);
    s.ranked = ranked_leaves(leaf_scores(x, tree, idx));
    s.level_path = predict_levels(x, tree, idx, mode);
    s.level_scores.resize(tree.height());
    for (int l = 1; l <= tree.height(); ++l) {
      const auto& nodes = tree.level_nodes(l);
      auto& scores = s.level_scores[l - 1];
      scores.resize(nodes.size());
      for (size_t j = 0; j < nodes.size(); ++j) scores[j] = projection_norm(x, nodes[j], idx);
    }
    double norm = 0;
    for (double c : x) norm += c * c;
    norm = std::sqrt(norm);
    cos_sum += norm > 0 ? projection_norm(x, data.leaf[i], idx) / norm : 0.0;
    batch.push_back(std::move(s));
  }
  MetricReport report = evaluate(tree, batch, ks);
  report.mean_cosine_alignment = cos_sum / static_cast<double>(batch.size());
  if (correct_order_full)
    *correct_order_full = correct_order_fraction(tree, batch, tree.leaf_count());
  return report;
}

}  // namespace

DemoOutcome run_demo_train(const DemoRunConfig& cfg) {
  const HierarchyTree tree = HierarchyTree::parse_file(cfg.hierarchy_path);
  auto [bases, idx] = assign_bases(tree);
  const std::vector<int> ks = resolve_ks(cfg.ks, cfg.ks_explicit, tree.leaf_count());

  const Dataset train_data = generate_synthetic(tree, cfg.synth);
  SyntheticSpec test_spec = cfg.synth;
  test_spec.samples_per_leaf = cfg.test_samples_per_leaf;
  const Dataset test_data =
      generate_synthetic_split(tree, test_spec, cfg.synth.seed + 0x7f4a7c15ull);

  ModuleConfig mc;
  mc.d_in = cfg.synth.d_in;
  mc.n = tree.node_count();
  mc.depth = cfg.depth;
  mc.width = cfg.width;
  mc.seed = cfg.train.seed;
  TransformationModule module(mc);

  const TrainResult curve = train(module, train_data, cfg.train, tree, bases, idx);

  DemoOutcome out;
  out.loss_curve = curve.loss_curve;
  out.train_report = eval_split(tree, idx, module, train_data, ks, cfg.mode, "train_");
  out.test_report = eval_split(tree, idx, module, test_data, ks, cfg.mode, "test_",
                               &out.test_correct_order_full);
  out.summary = "test: " + report_summary_line(out.test_report);

  if (!cfg.out_dir.empty()) {
    std::filesystem::create_directories(cfg.out_dir);
    const std::string base = cfg.out_dir + "/";
    std::vector<std::string> axis_names;
    for (int node : bases.node_of) axis_names.push_back(tree.name(node));
    write_file(base + "checkpoint.json", checkpoint_json(module, axis_names));
    write_file(base + "loss_curve.csv",
               loss_curve_csv(curve.loss_curve, curve.kl_curve, curve.reg_curve));
    const char* ext = cfg.format == ReportFormat::json ? ".json" : ".csv";
    auto render = [&](const MetricReport& r) {
      return cfg.format == ReportFormat::json ? report_to_json(r) : report_to_csv(r);
    };
    write_file(base + "report_train" + ext, render(out.train_report));
    write_file(base + "report_test" + ext, render(out.test_report));
  }
  return out;
}

void run_order_analysis(const EvalRunConfig& cfg, const std::string& out_dir) {
  const HierarchyTree tree = HierarchyTree::parse_file(cfg.hierarchy_path);
  const std::vector<EvalSample> batch = load_eval_batch(tree, cfg);
  std::filesystem::create_directories(out_dir);
  write_file(out_dir + "/order_fractions.csv", order_fractions_csv(tree, batch));
  write_file(out_dir + "/lca_matrix.csv", lca_matrix_csv(tree, batch));
}

std::vector<HopsTraceRow> run_hops_trace(const EvalRunConfig& cfg) {
  const HierarchyTree tree = HierarchyTree::parse_file(cfg.hierarchy_path);
  const std::vector<EvalSample> batch = load_eval_batch(tree, cfg);
  std::vector<HopsTraceRow> rows = hops_trace(tree, batch);
  if (!cfg.out_path.empty())
    write_file(cfg.out_path, cfg.format == ReportFormat::json ? hops_trace_to_json(rows)
                                                              : hops_trace_to_csv(rows));
  return rows;
}

}  // namespace hiercos
