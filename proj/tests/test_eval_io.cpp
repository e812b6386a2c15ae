#include <doctest.h>

#include <functional>

#include <filesystem>

#include "eval_io.hpp"
#include "runner.hpp"
#include "testutil.hpp"

using namespace hiercos;

namespace {

Err code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Err::IoError;
}

std::string tmp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "hiercos_eval_io_test";
  std::filesystem::create_directories(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("dense and ranked prediction files yield identical batches") {
  const HierarchyTree t = testutil::t1();
  const PredictionFile dense = parse_predictions_file(t, testutil::data_path("t1_dense.csv"));
  const PredictionFile ranked = parse_predictions_file(t, testutil::data_path("t1_ranked.csv"));
  CHECK(dense.dense);
  CHECK_FALSE(ranked.dense);
  REQUIRE(dense.samples.size() == 2);
  REQUIRE(ranked.samples.size() == 2);
  for (size_t i = 0; i < 2; ++i) {
    CHECK(dense.samples[i].id == ranked.samples[i].id);
    CHECK(dense.samples[i].true_leaf_pos == ranked.samples[i].true_leaf_pos);
    CHECK(dense.samples[i].ranked == ranked.samples[i].ranked);
  }
}

TEST_CASE("prediction file errors carry row numbers") {
  const HierarchyTree t = testutil::t1();
  const std::string header = "sample_id,true_class,a1,a2,b1,b2,b3\n";
  CHECK(code_of([&] {
          parse_predictions(t, header + "s1,a1,1,2,3\n", "mem");
        }) == Err::RowLengthMismatch);
  CHECK(code_of([&] {
          parse_predictions(t, header + "s1,nope,1,2,3,4,5\n", "mem");
        }) == Err::UnknownClassInPredictions);
  CHECK(code_of([&] {
          parse_predictions(t, header + "s1,A,1,2,3,4,5\n", "mem");
        }) == Err::UnknownClassInPredictions);
  CHECK(code_of([&] {
          parse_predictions(t, header + "s1,a1,1,2,x,4,5\n", "mem");
        }) == Err::MalformedLine);
  try {
    parse_predictions(t, header + "s1,a1,1,2,3,4,5\ns2,nope,1,2,3,4,5\n", "mem");
  } catch (const Error& e) {
    CHECK(e.input_line() == 3);
  }
  const std::string ranked_header = "sample_id,true_class,rank_1,rank_2,rank_3,rank_4,rank_5\n";
  CHECK(code_of([&] {
          parse_predictions(t, ranked_header + "s1,a1,a1,a1,b1,b2,b3\n", "mem");
        }) == Err::NotAPermutation);
  CHECK(code_of([&] {
          parse_predictions(t, "sample_id,true_class,wat,a2,b1,b2,b3\ns,a1,1,2,3,4,5\n", "mem");
        }) == Err::MalformedLine);
}

TEST_CASE("levels files attach by sample id") {
  const HierarchyTree t = testutil::t1();
  PredictionFile preds = parse_predictions_file(t, testutil::data_path("t1_dense.csv"));
  attach_level_paths_file(t, testutil::data_path("t1_levels.csv"), &preds.samples);
  REQUIRE(preds.samples[0].level_path.size() == 2);
  CHECK(t.name(preds.samples[0].level_path[0]) == "A");
  CHECK(t.name(preds.samples[1].level_path[1]) == "b1");

  CHECK(code_of([&] {
          std::vector<EvalSample> copy = preds.samples;
          attach_level_paths(t, "sample_id,pred_l1,pred_l2\ns1,A,a1\n", "mem", &copy);
        }) == Err::MissingLevelPredictions);
  CHECK(code_of([&] {
          std::vector<EvalSample> copy = preds.samples;
          attach_level_paths(t, "sample_id,pred_l1,pred_l2\ns1,,\ns2,B,b1\n", "mem", &copy);
        }) == Err::MissingLevelPredictions);
}

TEST_CASE("run_eval produces the frozen report through both formats") {
  EvalRunConfig cfg;
  cfg.hierarchy_path = testutil::data_path("t1.tsv");
  cfg.predictions_path = testutil::data_path("t1_dense.csv");
  cfg.levels_path = testutil::data_path("t1_levels.csv");
  cfg.ks = {1, 2, 5};
  cfg.ks_explicit = true;

  const std::string dir = tmp_dir();
  cfg.out_path = dir + "/report.json";
  const EvalOutcome a = run_eval(cfg);
  CHECK(a.report.accuracy == doctest::Approx(0.5));
  CHECK(a.report.hops == doctest::Approx(0.5));
  CHECK(*a.report.fpa == doctest::Approx(0.5));
  CHECK(a.summary == "samples=2 accuracy=0.5 hops=0.5 ms=2 fpa=0.5 tice=0");

  // Ranked-format input gives the byte-identical report.
  EvalRunConfig cfg2 = cfg;
  cfg2.predictions_path = testutil::data_path("t1_ranked.csv");
  cfg2.out_path = dir + "/report2.json";
  run_eval(cfg2);
  CHECK(read_file(dir + "/report.json") == read_file(dir + "/report2.json"));

  const std::string json = read_file(dir + "/report.json");
  CHECK(json.find("\"schema_version\": 1") != std::string::npos);
  CHECK(json.find("\"accuracy\": 0.5") != std::string::npos);
  CHECK(json.find("\"mnr\"") == std::string::npos);  // absent without level scores
  CHECK(json.back() == '\n');
  CHECK(json.find('\r') == std::string::npos);

  EvalRunConfig csv_cfg = cfg;
  csv_cfg.format = ReportFormat::csv;
  csv_cfg.out_path = dir + "/report.csv";
  run_eval(csv_cfg);
  const std::string csv = read_file(dir + "/report.csv");
  CHECK(csv.find("accuracy,,0.5\n") != std::string::npos);
  CHECK(csv.find("ahd,2,1.25\n") != std::string::npos);
  CHECK(csv.find("hp,5,0.3\n") != std::string::npos);

  // Default ks on a 5-leaf tree clamps {1,5,20} down to {1,5}.
  EvalRunConfig defaults = cfg;
  defaults.ks.clear();
  defaults.ks_explicit = false;
  defaults.out_path.clear();
  const EvalOutcome d = run_eval(defaults);
  REQUIRE(d.report.at_k.size() == 2);
  CHECK(d.report.at_k[0].k == 1);
  CHECK(d.report.at_k[1].k == 5);

  EvalRunConfig bad = cfg;
  bad.ks = {20};
  CHECK(code_of([&] { run_eval(bad); }) == Err::KOutOfRange);
}

TEST_CASE("order analysis emits fractions and the lca matrix") {
  EvalRunConfig cfg;
  cfg.hierarchy_path = testutil::data_path("t1.tsv");
  cfg.predictions_path = testutil::data_path("t1_dense.csv");
  const std::string dir = tmp_dir() + "/order";
  run_order_analysis(cfg, dir);

  const std::string fractions = read_file(dir + "/order_fractions.csv");
  CHECK(fractions == "k,correct_order_fraction\n1,0.5\n2,0.5\n3,0.5\n4,0.5\n5,0.5\n");

  const std::string matrix = read_file(dir + "/lca_matrix.csv");
  CHECK(matrix.find("s1,a1,0,1,2,2,2\n") != std::string::npos);
  CHECK(matrix.find("s2,a1,2,2,2,0,1\n") != std::string::npos);
}

TEST_CASE("hops trace dumps the template internals") {
  EvalRunConfig cfg;
  cfg.hierarchy_path = testutil::data_path("t1.tsv");
  cfg.predictions_path = testutil::data_path("t1_ranked.csv");
  cfg.format = ReportFormat::csv;
  cfg.out_path = tmp_dir() + "/trace.csv";
  const auto rows = run_hops_trace(cfg);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].z == std::vector<int>{0, 1, 2, 2, 2});
  CHECK(rows[0].zhat == rows[0].z);
  CHECK(rows[0].hops == doctest::Approx(1.0));
  CHECK(rows[1].zhat == std::vector<int>{2, 2, 2, 0, 1});

  const std::string csv = read_file(cfg.out_path);
  CHECK(csv.find("sample_id,true_class,hops,s,s_max,z,z_hat,eta\n") == 0);
  CHECK(csv.find("s1,a1,1,0,3.04167,0;1;2;2;2,0;1;2;2;2,1;0.5;0.25;0.208333;0.166667") !=
        std::string::npos);
}

TEST_CASE("demo runs are byte-identical for identical flags") {
  DemoRunConfig cfg;
  cfg.hierarchy_path = testutil::data_path("t1.tsv");
  cfg.synth.d_in = 8;
  cfg.synth.samples_per_leaf = 6;
  cfg.synth.sigma_obs = 0.3;
  cfg.synth.seed = 5;
  cfg.test_samples_per_leaf = 4;
  cfg.train.epochs = 15;
  cfg.train.seed = 5;
  cfg.depth = 2;

  const std::string dir = tmp_dir();
  cfg.out_dir = dir + "/demo_rep1";
  run_demo_train(cfg);
  cfg.out_dir = dir + "/demo_rep2";
  run_demo_train(cfg);
  for (const char* name : {"checkpoint.json", "loss_curve.csv", "report_train.json",
                           "report_test.json"})
    REQUIRE(read_file(dir + "/demo_rep1/" + name) == read_file(dir + "/demo_rep2/" + name));
}

TEST_CASE("g6 formatting is stable") {
  CHECK(fmt_g6(0.5) == "0.5");
  CHECK(fmt_g6(2.0) == "2");
  CHECK(fmt_g6(73.0 / 24) == "3.04167");
  CHECK(fmt_g6(1.0 / 3) == "0.333333");
}
