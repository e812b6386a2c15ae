#pragma once

#include "eval_io.hpp"
#include "inference.hpp"
#include "trainer.hpp"

namespace hiercos {

struct EvalRunConfig {
  std::string hierarchy_path;
  std::string predictions_path;
  std::string levels_path;  // optional
  std::string out_path;     // optional for order-analysis (out_dir used instead)
  std::vector<int> ks;      // empty => default {1,5,20} clamped to K
  bool ks_explicit = false;
  LevelMode mode = LevelMode::per_level_argmax;
  ReportFormat format = ReportFormat::json;
};

std::string run_validate_tree(const std::string& hierarchy_path);

struct EvalOutcome {
  MetricReport report;
  std::string summary;
};
EvalOutcome run_eval(const EvalRunConfig& cfg);

struct DemoRunConfig {
  std::string hierarchy_path;
  std::string out_dir;
  SyntheticSpec synth;          // samples_per_leaf = train split size
  int test_samples_per_leaf = 20;
  TrainConfig train;
  int depth = 5;
  int width = 0;  // 0 => n
  std::vector<int> ks;
  bool ks_explicit = false;
  LevelMode mode = LevelMode::per_level_argmax;
  ReportFormat format = ReportFormat::json;
};

struct DemoOutcome {
  MetricReport train_report;
  MetricReport test_report;
  double test_correct_order_full = 0;  // correct-order fraction at k = K
  std::vector<double> loss_curve;
  std::string summary;
};
DemoOutcome run_demo_train(const DemoRunConfig& cfg);

void run_order_analysis(const EvalRunConfig& cfg, const std::string& out_dir);

std::vector<HopsTraceRow> run_hops_trace(const EvalRunConfig& cfg);

// Default ks {1,5,20} clamped to the class count; explicit lists are
// validated strictly.
std::vector<int> resolve_ks(std::vector<int> ks, bool explicit_ks, int K);

}  // namespace hiercos
