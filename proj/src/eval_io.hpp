#pragma once

#include <iosfwd>

#include "metrics.hpp"

namespace hiercos {

// Floats in all reports use 6 significant digits ("%.6g") and LF endings so
// identical inputs produce byte-identical files.
std::string fmt_g6(double v);

enum class ReportFormat { json, csv };

struct PredictionFile {
  std::vector<EvalSample> samples;
  bool dense = false;  // input carried scores (true) or ranked leaf ids
};

// Two accepted CSV layouts, told apart by the header:
//   dense:  sample_id,true_class,<leaf ids in hierarchy order>  (scores)
//   ranked: sample_id,true_class,rank_1,...,rank_K              (leaf ids)
PredictionFile parse_predictions(const HierarchyTree& tree, const std::string& text,
                                 const std::string& source);
PredictionFile parse_predictions_file(const HierarchyTree& tree, const std::string& path);

// Optional per-level file: sample_id,pred_l1,...,pred_lH. Trailing empty cells
// truncate the path. Joined to samples by sample_id.
void attach_level_paths(const HierarchyTree& tree, const std::string& text,
                        const std::string& source, std::vector<EvalSample>* samples);
void attach_level_paths_file(const HierarchyTree& tree, const std::string& path,
                             std::vector<EvalSample>* samples);

std::string report_to_json(const MetricReport& report);
std::string report_to_csv(const MetricReport& report);
std::string report_summary_line(const MetricReport& report);

// Raw data behind the prediction-order analysis: correct-order fraction for
// every k, and the per-sample LCA-distance matrix over ranked predictions.
std::string order_fractions_csv(const HierarchyTree& tree, std::span<const EvalSample> batch);
std::string lca_matrix_csv(const HierarchyTree& tree, std::span<const EvalSample> batch);

struct HopsTraceRow {
  std::string sample_id;
  std::string true_class;
  std::vector<int> z;
  std::vector<int> zhat;
  std::vector<double> eta;
  double s = 0;
  double s_max = 0;
  double hops = 0;
};

std::vector<HopsTraceRow> hops_trace(const HierarchyTree& tree,
                                     std::span<const EvalSample> batch);
std::string hops_trace_to_csv(std::span<const HopsTraceRow> rows);
std::string hops_trace_to_json(std::span<const HopsTraceRow> rows);

std::string loss_curve_csv(const std::vector<double>& total, const std::vector<double>& kl,
                           const std::vector<double>& reg);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace hiercos
