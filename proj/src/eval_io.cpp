#include "eval_io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "inference.hpp"

namespace hiercos {

namespace {

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> cells;
  size_t pos = 0;
  while (true) {
    size_t comma = line.find(',', pos);
    if (comma == std::string_view::npos) {
      cells.emplace_back(line.substr(pos));
      break;
    }
    cells.emplace_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
  return cells;
}

struct CsvReader {
  std::string_view text;
  size_t pos = 0;
  long line_no = 0;

  bool next(std::vector<std::string>* cells) {
    while (pos <= text.size()) {
      size_t eol = text.find('\n', pos);
      std::string_view line = (eol == std::string_view::npos) ? text.substr(pos)
                                                              : text.substr(pos, eol - pos);
      pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.empty() || line.front() == '#') continue;
      *cells = split_csv(line);
      return true;
    }
    return false;
  }
};

double parse_double(const std::string& cell, long line) {
  double value = 0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw Error(Err::MalformedLine, "cannot parse number `" + cell + "`", line);
  return value;
}

}  // namespace

std::string fmt_g6(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

PredictionFile parse_predictions(const HierarchyTree& tree, const std::string& text,
                                 const std::string& source) {
  CsvReader reader{text};
  std::vector<std::string> cells;
  if (!reader.next(&cells))
    throw Error(Err::MalformedLine, source + ": empty predictions file");
  const int K = tree.leaf_count();
  if (static_cast<int>(cells.size()) != K + 2 || cells[0] != "sample_id" ||
      cells[1] != "true_class")
    throw Error(Err::RowLengthMismatch,
                source + ": header must be sample_id,true_class followed by " +
                    std::to_string(K) + " columns",
                reader.line_no);

  bool dense = true;
  for (int j = 0; j < K; ++j)
    if (cells[j + 2] != tree.name(tree.leaves()[j])) { dense = false; break; }
  if (!dense) {
    for (int j = 0; j < K; ++j)
      if (cells[j + 2] != "rank_" + std::to_string(j + 1))
        throw Error(Err::MalformedLine,
                    source + ": header names neither the leaf ids in hierarchy order nor " +
                        "rank_1..rank_" + std::to_string(K),
                    reader.line_no);
  }

  PredictionFile out;
  out.dense = dense;
  std::map<std::string, long> seen;
  while (reader.next(&cells)) {
    if (static_cast<int>(cells.size()) != K + 2)
      throw Error(Err::RowLengthMismatch,
                  source + ": expected " + std::to_string(K + 2) + " cells, got " +
                      std::to_string(cells.size()),
                  reader.line_no);
    EvalSample sample;
    sample.id = cells[0];
    if (!seen.emplace(sample.id, reader.line_no).second)
      throw Error(Err::MalformedLine, source + ": duplicate sample_id `" + sample.id + "`",
                  reader.line_no);
    if (!tree.has_node(cells[1]))
      throw Error(Err::UnknownClassInPredictions,
                  source + ": unknown true class `" + cells[1] + "`", reader.line_no);
    try {
      sample.true_leaf_pos = tree.leaf_pos(tree.index_of(cells[1]));
    } catch (const Error&) {
      throw Error(Err::UnknownClassInPredictions,
                  source + ": true class `" + cells[1] + "` is not a leaf", reader.line_no);
    }

    if (dense) {
      Vec scores(K);
      for (int j = 0; j < K; ++j) scores[j] = parse_double(cells[j + 2], reader.line_no);
      sample.ranked = ranked_leaves(scores);
    } else {
      std::vector<char> used(K, 0);
      sample.ranked.resize(K);
      for (int j = 0; j < K; ++j) {
        const std::string& id = cells[j + 2];
        if (!tree.has_node(id))
          throw Error(Err::UnknownClassInPredictions, source + ": unknown class `" + id + "`",
                      reader.line_no);
        int pos;
        try {
          pos = tree.leaf_pos(tree.index_of(id));
        } catch (const Error&) {
          throw Error(Err::UnknownClassInPredictions,
                      source + ": class `" + id + "` is not a leaf", reader.line_no);
        }
        if (used[pos])
          throw Error(Err::NotAPermutation, source + ": class `" + id + "` ranked twice",
                      reader.line_no);
        used[pos] = 1;
        sample.ranked[j] = pos;
      }
    }
    out.samples.push_back(std::move(sample));
  }
  if (out.samples.empty())
    throw Error(Err::MalformedLine, source + ": predictions file has no data rows");
  return out;
}

PredictionFile parse_predictions_file(const HierarchyTree& tree, const std::string& path) {
  return parse_predictions(tree, read_file(path), path);
}

void attach_level_paths(const HierarchyTree& tree, const std::string& text,
                        const std::string& source, std::vector<EvalSample>* samples) {
  CsvReader reader{text};
  std::vector<std::string> cells;
  const int H = tree.height();
  if (!reader.next(&cells))
    throw Error(Err::MalformedLine, source + ": empty levels file");
  if (static_cast<int>(cells.size()) != H + 1 || cells[0] != "sample_id")
    throw Error(Err::RowLengthMismatch,
                source + ": header must be sample_id,pred_l1..pred_l" + std::to_string(H),
                reader.line_no);

  std::map<std::string, std::vector<int>> paths;
  while (reader.next(&cells)) {
    if (static_cast<int>(cells.size()) != H + 1)
      throw Error(Err::RowLengthMismatch,
                  source + ": expected " + std::to_string(H + 1) + " cells, got " +
                      std::to_string(cells.size()),
                  reader.line_no);
    std::vector<int> path;
    bool ended = false;
    for (int l = 1; l <= H; ++l) {
      const std::string& id = cells[l];
      if (id.empty()) {
        ended = true;
        continue;
      }
      if (ended)
        throw Error(Err::MalformedLine, source + ": gap in level predictions", reader.line_no);
      if (!tree.has_node(id))
        throw Error(Err::UnknownNode, source + ": unknown node `" + id + "`", reader.line_no);
      path.push_back(tree.index_of(id));
    }
    if (path.empty())
      throw Error(Err::MissingLevelPredictions, source + ": row has no level predictions",
                  reader.line_no);
    if (!paths.emplace(cells[0], std::move(path)).second)
      throw Error(Err::MalformedLine, source + ": duplicate sample_id `" + cells[0] + "`",
                  reader.line_no);
  }

  for (EvalSample& s : *samples) {
    auto it = paths.find(s.id);
    if (it == paths.end())
      throw Error(Err::MissingLevelPredictions,
                  source + ": no level predictions for sample `" + s.id + "`");
    s.level_path = it->second;
  }
}

void attach_level_paths_file(const HierarchyTree& tree, const std::string& path,
                             std::vector<EvalSample>* samples) {
  attach_level_paths(tree, read_file(path), path, samples);
}

namespace {

void append_at_k_json(std::string* out, const MetricReport::AtK& row) {
  *out += "    {\"k\": " + std::to_string(row.k);
  *out += ", \"ahd\": " + fmt_g6(row.ahd);
  *out += ", \"hp\": " + fmt_g6(row.hp);
  *out += ", \"hr\": " + fmt_g6(row.hr);
  *out += ", \"hops\": " + fmt_g6(row.hops);
  *out += ", \"ndcg\": " + fmt_g6(row.ndcg);
  *out += ", \"correct_order_fraction\": " + fmt_g6(row.correct_order) + "}";
}

}  // namespace

std::string report_to_json(const MetricReport& report) {
  std::string out = "{\n";
  out += "  \"schema_version\": 1,\n";
  out += "  \"conventions\": \"mrr: 1-based ranks; mnr: 0-based ranks\",\n";
  out += "  \"samples\": " + std::to_string(report.samples) + ",\n";
  out += "  \"accuracy\": " + fmt_g6(report.accuracy) + ",\n";
  out += "  \"mistake_severity\": " + fmt_g6(report.mistake_severity) + ",\n";
  out += "  \"mistakes\": " + std::to_string(report.mistakes) + ",\n";
  out += "  \"hops\": " + fmt_g6(report.hops) + ",\n";
  out += "  \"mrr\": " + fmt_g6(report.mrr);
  if (report.mnr) out += ",\n  \"mnr\": " + fmt_g6(*report.mnr);
  if (report.fpa) out += ",\n  \"fpa\": " + fmt_g6(*report.fpa);
  if (report.tice) out += ",\n  \"tice\": " + fmt_g6(*report.tice);
  if (report.mean_cosine_alignment)
    out += ",\n  \"mean_cosine_alignment\": " + fmt_g6(*report.mean_cosine_alignment);
  out += ",\n  \"at_k\": [\n";
  for (size_t i = 0; i < report.at_k.size(); ++i) {
    append_at_k_json(&out, report.at_k[i]);
    if (i + 1 < report.at_k.size()) out += ",";
    out += "\n";
  }
  out += "  ]\n}\n";
  return out;
}

std::string report_to_csv(const MetricReport& report) {
  std::string out = "# mrr: 1-based ranks; mnr: 0-based ranks\n";
  out += "metric,k,value\n";
  out += "samples,," + std::to_string(report.samples) + "\n";
  out += "accuracy,," + fmt_g6(report.accuracy) + "\n";
  out += "mistake_severity,," + fmt_g6(report.mistake_severity) + "\n";
  out += "mistakes,," + std::to_string(report.mistakes) + "\n";
  out += "hops,," + fmt_g6(report.hops) + "\n";
  out += "mrr,," + fmt_g6(report.mrr) + "\n";
  if (report.mnr) out += "mnr,," + fmt_g6(*report.mnr) + "\n";
  if (report.fpa) out += "fpa,," + fmt_g6(*report.fpa) + "\n";
  if (report.tice) out += "tice,," + fmt_g6(*report.tice) + "\n";
  if (report.mean_cosine_alignment)
    out += "mean_cosine_alignment,," + fmt_g6(*report.mean_cosine_alignment) + "\n";
  for (const auto& row : report.at_k) {
    const std::string k = std::to_string(row.k);
    out += "ahd," + k + "," + fmt_g6(row.ahd) + "\n";
    out += "hp," + k + "," + fmt_g6(row.hp) + "\n";
    out += "hr," + k + "," + fmt_g6(row.hr) + "\n";
    out += "hops," + k + "," + fmt_g6(row.hops) + "\n";
    out += "ndcg," + k + "," + fmt_g6(row.ndcg) + "\n";
    out += "correct_order_fraction," + k + "," + fmt_g6(row.correct_order) + "\n";
  }
  return out;
}

std::string report_summary_line(const MetricReport& report) {
  std::string out = "samples=" + std::to_string(report.samples);
  out += " accuracy=" + fmt_g6(report.accuracy);
  out += " hops=" + fmt_g6(report.hops);
  out += " ms=" + fmt_g6(report.mistake_severity);
  if (report.fpa) out += " fpa=" + fmt_g6(*report.fpa);
  if (report.tice) out += " tice=" + fmt_g6(*report.tice);
  return out;
}

std::string order_fractions_csv(const HierarchyTree& tree, std::span<const EvalSample> batch) {
  std::string out = "k,correct_order_fraction\n";
  TemplateCache cache(tree);
  for (int k = 1; k <= tree.leaf_count(); ++k)
    out += std::to_string(k) + "," + fmt_g6(correct_order_fraction(tree, batch, k, &cache)) +
           "\n";
  return out;
}

std::string lca_matrix_csv(const HierarchyTree& tree, std::span<const EvalSample> batch) {
  const auto& leaves = tree.leaves();
  std::string out = "sample_id,true_class";
  for (int c = 1; c <= tree.leaf_count(); ++c) out += ",lca_" + std::to_string(c);
  out += "\n";
  for (const auto& s : batch) {
    out += s.id + "," + tree.name(leaves[s.true_leaf_pos]);
    for (int pos : s.ranked)
      out += "," + std::to_string(tree.lca_distance(leaves[s.true_leaf_pos], leaves[pos]));
    out += "\n";
  }
  return out;
}

std::vector<HopsTraceRow> hops_trace(const HierarchyTree& tree,
                                     std::span<const EvalSample> batch) {
  TemplateCache cache(tree);
  std::vector<HopsTraceRow> rows;
  rows.reserve(batch.size());
  for (const auto& s : batch) {
    const RankTemplate& tpl = cache.get(s.true_leaf_pos);
    HopsTraceRow row;
    row.sample_id = s.id;
    row.true_class = tree.name(tree.leaves()[s.true_leaf_pos]);
    row.z = tpl.z;
    row.zhat = predicted_order(tpl, s.ranked);
    row.eta = tpl.eta;
    row.s_max = tpl.s_max_full;
    for (int j = 0; j < tpl.K; ++j) row.s += tpl.eta[j] * std::abs(tpl.z[j] - row.zhat[j]);
    row.hops = hops(tpl, row.zhat);
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

template <typename T, typename Fmt>
std::string join_semi(const std::vector<T>& values, Fmt fmt) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ';';
    out += fmt(values[i]);
  }
  return out;
}

std::string join_json(const std::vector<int>& values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(values[i]);
  }
  return out;
}

}  // namespace

std::string hops_trace_to_csv(std::span<const HopsTraceRow> rows) {
  std::string out = "sample_id,true_class,hops,s,s_max,z,z_hat,eta\n";
  for (const auto& r : rows) {
    out += r.sample_id + "," + r.true_class + "," + fmt_g6(r.hops) + "," + fmt_g6(r.s) + "," +
           fmt_g6(r.s_max);
    out += "," + join_semi(r.z, [](int v) { return std::to_string(v); });
    out += "," + join_semi(r.zhat, [](int v) { return std::to_string(v); });
    out += "," + join_semi(r.eta, [](double v) { return fmt_g6(v); });
    out += "\n";
  }
  return out;
}

std::string hops_trace_to_json(std::span<const HopsTraceRow> rows) {
  std::string out = "{\n  \"schema_version\": 1,\n  \"samples\": [\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    out += "    {\"sample_id\": \"" + r.sample_id + "\", \"true_class\": \"" + r.true_class +
           "\", \"hops\": " + fmt_g6(r.hops) + ", \"s\": " + fmt_g6(r.s) +
           ", \"s_max\": " + fmt_g6(r.s_max);
    out += ", \"z\": [" + join_json(r.z);
    out += "], \"z_hat\": [" + join_json(r.zhat);
    out += "], \"eta\": [";
    for (size_t j = 0; j < r.eta.size(); ++j) {
      if (j) out += ", ";
      out += fmt_g6(r.eta[j]);
    }
    out += "]}";
    if (i + 1 < rows.size()) out += ",";
    out += "\n";
  }
  out += "  ]\n}\n";
  return out;
}

std::string loss_curve_csv(const std::vector<double>& total, const std::vector<double>& kl,
                           const std::vector<double>& reg) {
  std::string out = "epoch,total,kl,reg\n";
  for (size_t e = 0; e < total.size(); ++e)
    out += std::to_string(e + 1) + "," + fmt_g6(total[e]) + "," + fmt_g6(kl[e]) + "," +
           fmt_g6(reg[e]) + "\n";
  return out;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Err::IoError, "cannot open `" + path + "` for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(Err::IoError, "failed writing `" + path + "`");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Err::IoError, "cannot open `" + path + "`");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace hiercos
