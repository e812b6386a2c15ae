// hiercos command-line interface. Thin layer over the shared-library C API:
// argument parsing here, everything else behind hiercos/hiercos.h.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hiercos/hiercos.h"

namespace {

struct CommonFlags {
  std::string hierarchy;
  std::string predictions;
  std::string levels_file;
  std::string out;
  std::string ks_text;
  std::string mode = "per-level";
  std::string format = "json";
};

std::vector<uint32_t> parse_ks(const std::string& text) {
  std::vector<uint32_t> ks;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t comma = text.find(',', pos);
    const std::string cell =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? text.size() : comma + 1;
    if (cell.empty()) continue;
    ks.push_back(static_cast<uint32_t>(std::stoul(cell)));
  }
  return ks;
}

int finish(hcos_status status, char* summary) {
  if (status == HCOS_OK) {
    if (summary) {
      std::printf("%s\n", summary);
      hcos_string_free(summary);
    }
    return 0;
  }
  std::fprintf(stderr, "error: %s\n", hcos_last_error());
  return hcos_exit_code(status);
}

void fill_eval_options(const CommonFlags& flags, const std::vector<uint32_t>& ks,
                       hcos_eval_options* opts) {
  hcos_eval_options_init(opts);
  opts->hierarchy_path = flags.hierarchy.c_str();
  opts->predictions_path = flags.predictions.c_str();
  if (!flags.levels_file.empty()) opts->levels_path = flags.levels_file.c_str();
  if (!flags.out.empty()) opts->out_path = flags.out.c_str();
  if (!ks.empty()) {
    opts->ks = ks.data();
    opts->ks_count = ks.size();
  }
  opts->level_mode =
      flags.mode == "leaf-path" ? HCOS_LEVELS_LEAF_PATH : HCOS_LEVELS_PER_LEVEL;
  opts->format = flags.format == "csv" ? HCOS_FORMAT_CSV : HCOS_FORMAT_JSON;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hierarchy-aware classification toolkit"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto add_mode_format = [&](CLI::App* cmd) {
    cmd->add_option("--mode", flags.mode, "level predictions: per-level|leaf-path")
        ->check(CLI::IsMember({"per-level", "leaf-path"}));
    cmd->add_option("--format", flags.format, "report format: json|csv")
        ->check(CLI::IsMember({"json", "csv"}));
  };

  auto* validate = app.add_subcommand("validate-tree", "parse and validate a hierarchy TSV");
  validate->add_option("--hierarchy", flags.hierarchy, "hierarchy TSV path")->required();

  auto* eval = app.add_subcommand("eval", "score a predictions file against a hierarchy");
  eval->add_option("--hierarchy", flags.hierarchy)->required();
  eval->add_option("--predictions", flags.predictions, "dense or ranked CSV")->required();
  eval->add_option("--levels-file", flags.levels_file, "optional per-level predictions CSV");
  eval->add_option("--ks", flags.ks_text, "comma-separated k list (default 1,5,20)");
  eval->add_option("--out", flags.out, "report output path")->required();
  add_mode_format(eval);

  auto* demo = app.add_subcommand("demo-train", "train on synthetic features and evaluate");
  hcos_demo_options demo_opts;
  hcos_demo_options_init(&demo_opts);
  std::string weights = "increasing";
  uint64_t seed = demo_opts.seed;
  demo->add_option("--hierarchy", flags.hierarchy)->required();
  demo->add_option("--out", flags.out, "output directory")->required();
  demo->add_option("--d-in", demo_opts.d_in, "input feature dimension");
  demo->add_option("--train-per-leaf", demo_opts.train_samples_per_leaf);
  demo->add_option("--test-per-leaf", demo_opts.test_samples_per_leaf);
  demo->add_option("--sigma-node", demo_opts.sigma_node, "per-level cluster offset scale");
  demo->add_option("--sigma-obs", demo_opts.sigma_obs, "observation noise scale");
  demo->add_option("--alpha", demo_opts.alpha, "regularizer weight");
  demo->add_option("--lr", demo_opts.learning_rate);
  demo->add_option("--epochs", demo_opts.epochs);
  demo->add_option("--batch", demo_opts.batch_size);
  demo->add_option("--depth", demo_opts.depth);
  demo->add_option("--width", demo_opts.width, "hidden width (0 = node count)");
  demo->add_option("--seed", seed);
  demo->add_option("--ks", flags.ks_text);
  demo->add_option("--weights", weights, "level-weight direction: increasing|reversed")
      ->check(CLI::IsMember({"increasing", "reversed"}));
  add_mode_format(demo);

  auto* order = app.add_subcommand("order-analysis",
                                   "correct-order fractions and LCA-distance matrix CSVs");
  order->add_option("--hierarchy", flags.hierarchy)->required();
  order->add_option("--predictions", flags.predictions)->required();
  order->add_option("--levels-file", flags.levels_file);
  order->add_option("--out", flags.out, "output directory")->required();
  add_mode_format(order);

  auto* trace = app.add_subcommand("hops-trace", "dump z / z_hat / eta / s / s_max per sample");
  trace->add_option("--hierarchy", flags.hierarchy)->required();
  trace->add_option("--predictions", flags.predictions)->required();
  trace->add_option("--out", flags.out)->required();
  add_mode_format(trace);

  CLI11_PARSE(app, argc, argv);

  std::vector<uint32_t> ks;
  try {
    ks = parse_ks(flags.ks_text);
  } catch (const std::exception&) {
    std::fprintf(stderr, "error: cannot parse --ks `%s`\n", flags.ks_text.c_str());
    return 3;
  }

  char* summary = nullptr;
  if (validate->parsed()) {
    const hcos_status status = hcos_run_validate_tree(flags.hierarchy.c_str(), &summary);
    return finish(status, summary);
  }

  if (eval->parsed()) {
    hcos_eval_options opts;
    fill_eval_options(flags, ks, &opts);
    const hcos_status status = hcos_run_eval(&opts, &summary);
    return finish(status, summary);
  }

  if (demo->parsed()) {
    demo_opts.hierarchy_path = flags.hierarchy.c_str();
    demo_opts.out_dir = flags.out.c_str();
    demo_opts.seed = seed;
    demo_opts.weight_order =
        weights == "reversed" ? HCOS_WEIGHTS_REVERSED : HCOS_WEIGHTS_INCREASING;
    demo_opts.level_mode =
        flags.mode == "leaf-path" ? HCOS_LEVELS_LEAF_PATH : HCOS_LEVELS_PER_LEVEL;
    demo_opts.format = flags.format == "csv" ? HCOS_FORMAT_CSV : HCOS_FORMAT_JSON;
    if (!ks.empty()) {
      demo_opts.ks = ks.data();
      demo_opts.ks_count = ks.size();
    }
    const hcos_status status = hcos_run_demo_train(&demo_opts, nullptr, &summary);
    return finish(status, summary);
  }

  if (order->parsed()) {
    hcos_eval_options opts;
    fill_eval_options(flags, ks, &opts);
    opts.out_path = nullptr;
    const hcos_status status = hcos_run_order_analysis(&opts, flags.out.c_str());
    if (status == HCOS_OK) std::printf("wrote %s/order_fractions.csv and lca_matrix.csv\n",
                                       flags.out.c_str());
    return finish(status, nullptr);
  }

  if (trace->parsed()) {
    hcos_eval_options opts;
    fill_eval_options(flags, ks, &opts);
    const hcos_status status = hcos_run_hops_trace(&opts);
    if (status == HCOS_OK) std::printf("wrote %s\n", flags.out.c_str());
    return finish(status, nullptr);
  }

  return 0;
}
