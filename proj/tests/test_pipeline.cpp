#include <doctest.h>

#include <filesystem>
#include <sstream>
#include <string>

#include "pstyle/config.hpp"
#include "pstyle/error.hpp"
#include "pstyle/pipeline.hpp"
#include "pstyle/report.hpp"
#include "pstyle/stats.hpp"
#include "pstyle/synthetic.hpp"
#include "pstyle/util.hpp"

namespace fs = std::filesystem;
using namespace pstyle;

namespace {

std::string fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("pstyle_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir.string();
}

std::string small_corpus(const std::string& name, double signal, std::size_t a = 12, std::size_t i = 8) {
  auto dir = fresh_dir(name);
  SyntheticSpec spec;
  spec.anaclitic = a;
  spec.introjective = i;
  spec.signal = signal;
  spec.seed = 5;
  spec.answers = 8;
  write_synthetic(generate_synthetic(spec), dir);
  return dir;
}

}  // namespace

TEST_CASE("config round trip and includes") {
  ExperimentConfig c;
  c.feature_sets = {"liwc", "liwc+questionnaire"};
  c.models = {"lr", "gbt"};
  c.balances = {"none", "smote"};
  c.seed = 123456789012345ULL;
  c.logistic.l2 = 0.25;
  c.boosted.learning_rate = 0.07;
  c.svg = true;
  CHECK(parse_config(emit_config(c)) == c);

  auto dir = fresh_dir("config");
  write_file(dir + "/shared.conf", "transcripts_dir = data/transcripts\nfolds = 3\n");
  write_file(dir + "/exp.conf", "# experiment\ninclude = shared.conf\nfolds = 4\nmodel = lr, rf\n");
  auto loaded = load_config(dir + "/exp.conf");
  CHECK(loaded.folds == 4);
  CHECK(loaded.models == std::vector<std::string>{"lr", "rf"});
  CHECK(fs::path(loaded.transcripts_dir) == fs::path(dir) / "data/transcripts");

  CHECK_THROWS_AS(parse_config("colour = red\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("folds = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("feature_set = liwc+unknown\n"), ConfigError);
  write_file(dir + "/loop.conf", "include = loop.conf\n");
  CHECK_THROWS_AS(load_config(dir + "/loop.conf"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("report formatting") {
  CHECK(report::mean_sd({0.8964, 0.1271}) == "0.896 ± 0.127");
  CHECK(report::p_value_text(0.0004) == "<0.001");
  CHECK(report::p_value_text(0.0312) == "0.031");

  report::Comparison c;
  c.labels = {"a", "b", "c"};
  c.metric = "macro_f1";
  c.p.assign(3, std::vector<double>(3, 1.0));
  c.statistic.assign(3, std::vector<double>(3, 0.0));
  c.p[0][1] = 0.0001;
  c.p[0][2] = 0.2;
  c.p[1][2] = 0.5;
  auto md = report::comparison_markdown(c);
  std::size_t populated = 0;
  for (auto pos = md.find("| 0."); pos != std::string::npos; pos = md.find("| 0.", pos + 1)) ++populated;
  for (auto pos = md.find("<0.001"); pos != std::string::npos; pos = md.find("<0.001", pos + 1)) ++populated;
  CHECK(populated == 3);
  auto csv = report::comparison_csv(c);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);
}

TEST_CASE("synthetic corpus is deterministic") {
  SyntheticSpec spec;
  spec.anaclitic = 4;
  spec.introjective = 3;
  auto a = generate_synthetic(spec);
  auto b = generate_synthetic(spec);
  CHECK(a.transcripts == b.transcripts);
  CHECK(a.audio_csv == b.audio_csv);
  CHECK(a.embeddings_jsonl == b.embeddings_jsonl);
  spec.seed = 1;
  CHECK_FALSE(generate_synthetic(spec).transcripts == a.transcripts);
}

TEST_CASE("planted signal separates dictionary features") {
  auto dir = small_corpus("signal", 1.0, 20, 14);
  auto config = load_config(dir + "/corpus.conf");
  auto data = load_dataset(config);
  auto liwc = liwc_features(data, load_lexicon_file(config.lexicon));
  auto ranking = stats::rank_features(liwc, data.styles(), stats::FeatureTest::mann_whitney);
  CHECK(ranking.front().result.p_value < 0.01);
  auto ppron = std::find_if(ranking.begin(), ranking.end(), [](const auto& r) { return r.name == "ppron"; });
  REQUIRE(ppron != ranking.end());
  CHECK(ppron->result.p_value < 0.01);
  CHECK(ppron->dominant == PersonalityStyle::anaclitic);
  fs::remove_all(dir);
}

TEST_CASE("every feature set builds") {
  auto dir = small_corpus("sets", 1.0);
  auto config = load_config(dir + "/corpus.conf");
  auto data = load_dataset(config);
  std::vector<std::size_t> train{0, 1, 2, 3, 4, 5, 12, 13, 14};
  for (const auto& name : base_feature_sets()) {
    CAPTURE(name);
    auto source = build_feature_source(config, data, name);
    auto rows = source->build(train);
    CHECK(rows->matrix.rows() >= data.patient_ids.size());
    CHECK(rows->matrix.cols() > 0);
  }
  auto combined = build_feature_source(config, data, "liwc+questionnaire");
  CHECK(combined->build(train)->matrix.rows() == data.patient_ids.size());
  CHECK(build_feature_source(config, data, "audio")->build(train)->matrix.cols() == 91);

  ExperimentConfig broken = config;
  broken.chunk_mode = "per_answer";
  CHECK_THROWS_AS(check_inputs(broken, "liwc"), ConfigError);
  broken.lexicon.clear();
  broken.chunk_mode = "auto";
  CHECK_THROWS_AS(check_inputs(broken, "liwc"), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("evaluate, analyze and compare") {
  auto dir = small_corpus("cmds", 1.0);
  auto config = load_config(dir + "/corpus.conf");
  config.repetitions = 3;
  config.forest.trees = 20;
  config.models = {"lr", "rf"};
  config.balances = {"none", "smote"};
  config.output_dir = dir + "/out";
  std::ostringstream log;
  auto cells = cmd_evaluate(config, log);
  CHECK(cells.size() == 4);
  CHECK(fs::exists(dir + "/out/performance.md"));
  CHECK(fs::exists(dir + "/out/runs/liwc__rf__smote.jsonl"));

  // Outputs are never overwritten.
  CHECK_THROWS_AS(cmd_evaluate(config, log), DataError);

  cmd_analyze(config, log);
  CHECK(fs::exists(dir + "/out/analysis/liwc_ranking.csv"));
  CHECK(fs::exists(dir + "/out/analysis/audio_anova_top10.csv"));

  std::vector<std::string> runs{dir + "/out/runs/liwc__lr__none.jsonl", dir + "/out/runs/liwc__lr__smote.jsonl",
                                dir + "/out/runs/liwc__rf__none.jsonl", dir + "/out/runs/liwc__rf__smote.jsonl"};
  auto pairwise = cmd_compare(runs, "macro_f1", false);
  CHECK(std::count(pairwise.csv.begin(), pairwise.csv.end(), '\n') == 7);
  auto paired = cmd_compare(runs, "kappa", true);
  CHECK(std::count(paired.csv.begin(), paired.csv.end(), '\n') == 3);
  std::vector<std::string> same{runs[0], runs[0]};
  CHECK(cmd_compare(same, "macro_f1", false).csv.find(",1\n") != std::string::npos);
  CHECK_THROWS_AS(cmd_compare(runs, "auc", false), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("analysis refuses a single patient") {
  auto dir = small_corpus("one", 1.0, 1, 1);
  auto config = load_config(dir + "/corpus.conf");
  config.labels_csv.clear();
  fs::remove(dir + "/transcripts/P002.json");
  REQUIRE(load_dataset(config).patient_ids.size() == 1);
  config.output_dir = dir + "/out";
  std::ostringstream log;
  CHECK_THROWS_AS(cmd_analyze(config, log), DataError);
  fs::remove_all(dir);
}
