#include "hiercos/hiercos.h"

#include <cstring>
#include <string>

#include "runner.hpp"

using namespace hiercos;

struct hcos_tree {
  HierarchyTree tree;
};

namespace {

thread_local std::string g_last_error = "ok";

hcos_status status_for(Err code) {
  switch (exit_code(code)) {
    case 1:
      return code == Err::IoError ? HCOS_ERR_IO : HCOS_ERR_PARSE;
    case 2:
      return HCOS_ERR_STRUCTURE;
    default:
      return HCOS_ERR_EVAL;
  }
}

template <typename Fn>
hcos_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error = "ok";
    return HCOS_OK;
  } catch (const Error& e) {
    g_last_error = std::string(err_name(e.code())) + ": " + e.what();
    return status_for(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return HCOS_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return HCOS_ERR_INTERNAL;
  }
}

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

hcos_status require(bool ok, const char* what) {
  if (ok) return HCOS_OK;
  g_last_error = std::string("InvalidArgument: ") + what;
  return HCOS_ERR_EVAL;
}

EvalRunConfig to_eval_config(const hcos_eval_options& opts) {
  EvalRunConfig cfg;
  cfg.hierarchy_path = opts.hierarchy_path ? opts.hierarchy_path : "";
  cfg.predictions_path = opts.predictions_path ? opts.predictions_path : "";
  cfg.levels_path = opts.levels_path ? opts.levels_path : "";
  cfg.out_path = opts.out_path ? opts.out_path : "";
  if (opts.ks) {
    cfg.ks.assign(opts.ks, opts.ks + opts.ks_count);
    cfg.ks_explicit = true;
  }
  cfg.mode = opts.level_mode == HCOS_LEVELS_LEAF_PATH ? LevelMode::leaf_ancestor_path
                                                      : LevelMode::per_level_argmax;
  cfg.format = opts.format == HCOS_FORMAT_CSV ? ReportFormat::csv : ReportFormat::json;
  return cfg;
}

}  // namespace

extern "C" {

int hcos_exit_code(hcos_status status) {
  switch (status) {
    case HCOS_OK:
      return 0;
    case HCOS_ERR_IO:
    case HCOS_ERR_PARSE:
      return 1;
    case HCOS_ERR_STRUCTURE:
      return 2;
    default:
      return 3;
  }
}

const char* hcos_last_error(void) { return g_last_error.c_str(); }

const char* hcos_version(void) { return "0.1.0"; }

void hcos_string_free(char* s) { delete[] s; }

hcos_status hcos_tree_parse_file(const char* path, hcos_tree** out) {
  if (auto s = require(path && out, "path and out must be non-null")) return s;
  return guarded([&] { *out = new hcos_tree{HierarchyTree::parse_file(path)}; });
}

hcos_status hcos_tree_parse_text(const char* text, hcos_tree** out) {
  if (auto s = require(text && out, "text and out must be non-null")) return s;
  return guarded([&] { *out = new hcos_tree{HierarchyTree::parse(text)}; });
}

void hcos_tree_free(hcos_tree* tree) { delete tree; }

hcos_status hcos_tree_counts(const hcos_tree* tree, uint32_t* nodes, uint32_t* height,
                             uint32_t* leaves) {
  if (auto s = require(tree != nullptr, "tree must be non-null")) return s;
  return guarded([&] {
    if (nodes) *nodes = static_cast<uint32_t>(tree->tree.node_count());
    if (height) *height = static_cast<uint32_t>(tree->tree.height());
    if (leaves) *leaves = static_cast<uint32_t>(tree->tree.leaf_count());
  });
}

hcos_status hcos_tree_level_size(const hcos_tree* tree, uint32_t level, uint32_t* out) {
  if (auto s = require(tree && out, "tree and out must be non-null")) return s;
  return guarded([&] {
    *out = static_cast<uint32_t>(tree->tree.level_nodes(static_cast<int>(level)).size());
  });
}

hcos_status hcos_tree_leaf_name(const hcos_tree* tree, uint32_t index, const char** out) {
  if (auto s = require(tree && out, "tree and out must be non-null")) return s;
  return guarded([&] {
    if (index >= static_cast<uint32_t>(tree->tree.leaf_count()))
      throw Error(Err::KOutOfRange, "leaf index out of range");
    *out = tree->tree.name(tree->tree.leaves()[index]).c_str();
  });
}

hcos_status hcos_tree_lca_distance(const hcos_tree* tree, const char* leaf_a,
                                   const char* leaf_b, uint32_t* out) {
  if (auto s = require(tree && leaf_a && leaf_b && out, "arguments must be non-null")) return s;
  return guarded([&] {
    *out = static_cast<uint32_t>(
        tree->tree.lca_distance(tree->tree.index_of(leaf_a), tree->tree.index_of(leaf_b)));
  });
}

hcos_status hcos_tree_serialize(const hcos_tree* tree, char** out) {
  if (auto s = require(tree && out, "tree and out must be non-null")) return s;
  return guarded([&] { *out = dup_string(tree->tree.serialize()); });
}

hcos_status hcos_hops(const hcos_tree* tree, const char* true_leaf, const char* const* ranked,
                      size_t count, uint32_t k, double* out) {
  if (auto s = require(tree && true_leaf && ranked && out, "arguments must be non-null"))
    return s;
  return guarded([&] {
    const HierarchyTree& t = tree->tree;
    const RankTemplate tpl = rank_template(t, t.index_of(true_leaf));
    std::vector<int> positions(count);
    for (size_t j = 0; j < count; ++j)
      positions[j] = t.leaf_pos(t.index_of(ranked[j]));
    const auto zhat = predicted_order(tpl, positions);
    *out = k == 0 ? hops(tpl, zhat) : hops_at_k(tpl, zhat, static_cast<int>(k));
  });
}

void hcos_eval_options_init(hcos_eval_options* opts) {
  if (!opts) return;
  *opts = hcos_eval_options{};
  opts->level_mode = HCOS_LEVELS_PER_LEVEL;
  opts->format = HCOS_FORMAT_JSON;
}

hcos_status hcos_run_validate_tree(const char* hierarchy_path, char** summary) {
  if (auto s = require(hierarchy_path != nullptr, "hierarchy_path must be non-null")) return s;
  return guarded([&] {
    const std::string line = run_validate_tree(hierarchy_path);
    if (summary) *summary = dup_string(line);
  });
}

hcos_status hcos_run_eval(const hcos_eval_options* opts, char** summary) {
  if (auto s = require(opts && opts->hierarchy_path && opts->predictions_path,
                       "hierarchy_path and predictions_path must be set"))
    return s;
  return guarded([&] {
    const EvalOutcome outcome = run_eval(to_eval_config(*opts));
    if (summary) *summary = dup_string(outcome.summary);
  });
}

hcos_status hcos_run_order_analysis(const hcos_eval_options* opts, const char* out_dir) {
  if (auto s = require(opts && opts->hierarchy_path && opts->predictions_path && out_dir,
                       "hierarchy_path, predictions_path and out_dir must be set"))
    return s;
  return guarded([&] { run_order_analysis(to_eval_config(*opts), out_dir); });
}

hcos_status hcos_run_hops_trace(const hcos_eval_options* opts) {
  if (auto s = require(opts && opts->hierarchy_path && opts->predictions_path && opts->out_path,
                       "hierarchy_path, predictions_path and out_path must be set"))
    return s;
  return guarded([&] { run_hops_trace(to_eval_config(*opts)); });
}

void hcos_demo_options_init(hcos_demo_options* opts) {
  if (!opts) return;
  *opts = hcos_demo_options{};
  opts->d_in = 64;
  opts->train_samples_per_leaf = 50;
  opts->test_samples_per_leaf = 20;
  opts->sigma_node = 1.0;
  opts->sigma_obs = 2.0;
  opts->alpha = 0.05;
  opts->learning_rate = 0.05;
  opts->epochs = 150;
  opts->batch_size = 32;
  opts->depth = 5;
  opts->width = 0;
  opts->seed = 7;
  opts->weight_order = HCOS_WEIGHTS_INCREASING;
  opts->level_mode = HCOS_LEVELS_PER_LEVEL;
  opts->format = HCOS_FORMAT_JSON;
}

hcos_status hcos_run_demo_train(const hcos_demo_options* opts, hcos_demo_result* result,
                                char** summary) {
  if (auto s = require(opts && opts->hierarchy_path, "hierarchy_path must be set")) return s;
  return guarded([&] {
    DemoRunConfig cfg;
    cfg.hierarchy_path = opts->hierarchy_path;
    cfg.out_dir = opts->out_dir ? opts->out_dir : "";
    cfg.synth.d_in = static_cast<int>(opts->d_in);
    cfg.synth.samples_per_leaf = static_cast<int>(opts->train_samples_per_leaf);
    cfg.synth.sigma_node = opts->sigma_node;
    cfg.synth.sigma_obs = opts->sigma_obs;
    cfg.synth.seed = opts->seed;
    cfg.test_samples_per_leaf = static_cast<int>(opts->test_samples_per_leaf);
    cfg.train.learning_rate = opts->learning_rate;
    cfg.train.epochs = static_cast<int>(opts->epochs);
    cfg.train.batch_size = static_cast<int>(opts->batch_size);
    cfg.train.alpha = opts->alpha;
    cfg.train.seed = opts->seed;
    cfg.train.weight_order = opts->weight_order == HCOS_WEIGHTS_REVERSED
                                 ? WeightOrder::reversed
                                 : WeightOrder::increasing;
    cfg.depth = static_cast<int>(opts->depth);
    cfg.width = static_cast<int>(opts->width);
    if (opts->ks) {
      cfg.ks.assign(opts->ks, opts->ks + opts->ks_count);
      cfg.ks_explicit = true;
    }
    cfg.mode = opts->level_mode == HCOS_LEVELS_LEAF_PATH ? LevelMode::leaf_ancestor_path
                                                         : LevelMode::per_level_argmax;
    cfg.format = opts->format == HCOS_FORMAT_CSV ? ReportFormat::csv : ReportFormat::json;

    const DemoOutcome outcome = run_demo_train(cfg);
    if (result) {
      result->test_accuracy = outcome.test_report.accuracy;
      result->test_hops = outcome.test_report.hops;
      result->test_fpa = outcome.test_report.fpa.value_or(-1.0);
      result->test_tice = outcome.test_report.tice.value_or(-1.0);
      result->test_correct_order_full = outcome.test_correct_order_full;
      result->test_cosine_alignment = outcome.test_report.mean_cosine_alignment.value_or(-1.0);
      result->final_loss = outcome.loss_curve.empty() ? -1.0 : outcome.loss_curve.back();
    }
    if (summary) *summary = dup_string(outcome.summary);
  });
}

}  // extern "C"
