#include <doctest.h>

#include <random>
#include <set>
#include <vector>

#include "oracles.hpp"
#include "pstyle/error.hpp"
#include "pstyle/eval.hpp"

using namespace pstyle;
using namespace pstyle::eval;

namespace {

std::vector<int> labels_50_29() {
  std::vector<int> y(79, 0);
  for (std::size_t i = 0; i < 50; ++i) y[i] = 1;
  return y;
}

StaticSource blob_source(const std::vector<int>& y, double shift, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < y.size(); ++i) ids.push_back("P" + std::to_string(i));
  FeatureMatrix m(ids);
  for (int c = 0; c < 3; ++c) {
    std::vector<double> v(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) v[i] = normal(rng) + (y[i] ? shift : 0.0);
    m.add_column({"f" + std::to_string(c), ColumnKind::numeric, Provenance::liwc, {}}, v);
  }
  return StaticSource(m);
}

}  // namespace

TEST_CASE("precision, recall and F1") {
  auto pr = precision_recall_f1({3, 1, 1, 0});
  CHECK(pr.precision == doctest::Approx(0.75));
  CHECK(pr.recall == doctest::Approx(0.75));
  CHECK(pr.f1 == doctest::Approx(0.75));
  CHECK(precision_recall_f1({5, 0, 0, 5}).f1 == 1.0);
  auto zero = precision_recall_f1({0, 0, 0, 4});
  CHECK(zero.precision == 0.0);
  CHECK(zero.f1 == 0.0);
}

TEST_CASE("kappa worked examples") {
  CHECK(cohen_kappa({10, 0, 0, 5}) == doctest::Approx(1.0));
  CHECK(cohen_kappa({25, 25, 0, 0}) == doctest::Approx(0.0));
  CHECK(cohen_kappa({40, 9, 10, 20}) == doctest::Approx(0.4861).epsilon(1e-4));
  auto saturated = cohen_kappa_checked({10, 0, 0, 0});
  CHECK(saturated.chance_saturated);
  CHECK(saturated.value == 0.0);
}

TEST_CASE("metrics agree with the direct formulas on random matrices") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<std::size_t> cell(0, 50);
  for (int i = 0; i < 500; ++i) {
    ConfusionMatrix c{cell(rng), cell(rng), cell(rng), cell(rng)};
    oracle::Counts o{double(c.tp), double(c.fp), double(c.fn), double(c.tn)};
    CHECK(std::abs(macro_f1(c) - oracle::macro_f1(o)) < 1e-12);
    CHECK(std::abs(cohen_kappa(c) - oracle::kappa(o)) < 1e-12);
    CHECK(cohen_kappa(swap_roles(c)) == doctest::Approx(cohen_kappa(c)));
  }
}

TEST_CASE("constant majority macro F1 on 50/29") {
  // Predicting anaclitic always: F1_a = 2*50/(2*50+29), F1_i = 0.
  CHECK(macro_f1({50, 29, 0, 0}) == doctest::Approx(0.5 * 100.0 / 129.0));
  CHECK(compute_metrics({50, 29, 0, 0}).macro_f1 == doctest::Approx(0.3876).epsilon(1e-3));
  CHECK_THROWS_AS(metric_value(MetricSet{}, "auc"), ConfigError);
}

TEST_CASE("stratified folds for 50/29") {
  auto plan = stratified_folds(labels_50_29(), 5, 3);
  std::vector<std::size_t> sizes;
  for (const auto& f : plan.folds) {
    sizes.push_back(f.size());
    std::size_t anaclitic = 0;
    for (auto i : f) anaclitic += i < 50;
    CHECK(anaclitic == 10);
  }
  CHECK(sizes == std::vector<std::size_t>{16, 16, 16, 16, 15});
  CHECK(stratified_folds(labels_50_29(), 5, 3).folds == plan.folds);
  CHECK_THROWS_AS(stratified_folds(std::vector<int>{1, 0}, 3, 1), ConfigError);
  auto train = plan.train_indices(0);
  CHECK(train.size() == 63);
}

TEST_CASE("fold plans partition and stay stratified") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 4 + rng() % 60;
    std::size_t k = 2 + rng() % std::min<std::size_t>(n - 1, 9);
    std::vector<int> y(n);
    for (auto& v : y) v = static_cast<int>(rng() % 2);
    auto plan = stratified_folds(y, k, rng());
    std::set<std::size_t> seen;
    double share = 0;
    for (int v : y) share += v;
    share /= static_cast<double>(n);
    for (const auto& f : plan.folds) {
      double pos = 0;
      for (auto i : f) {
        CHECK(seen.insert(i).second);
        pos += y[i];
      }
      CHECK(std::abs(pos - share * static_cast<double>(f.size())) <= 1.0 + 1e-9);
    }
    CHECK(seen.size() == n);
  }
}

TEST_CASE("majority vote") {
  std::vector<ChunkVote> aai{{1, 0.8}, {1, 0.7}, {0, 0.2}};
  CHECK(majority_vote(aai) == 1);
  std::vector<ChunkVote> tie{{1, 0.9}, {0, 0.4}};
  CHECK(majority_vote(tie) == 1);
  std::vector<ChunkVote> tie_i{{1, 0.55}, {0, 0.1}};
  CHECK(majority_vote(tie_i) == 0);
  std::vector<ChunkVote> flat{{1, 0.6}, {0, 0.4}};
  CHECK(majority_vote(flat) == 1);
  CHECK_THROWS_AS(majority_vote({}), DataError);
  CHECK(label_of(0.5) == 1);
}

TEST_CASE("protocol determinism, threads and persistence") {
  auto y = labels_50_29();
  auto source = blob_source(y, 1.0, 2);
  ml::ModelSpec spec;
  spec.kind = ml::ModelKind::logistic;
  ProtocolConfig cfg;
  cfg.repetitions = 4;
  cfg.balance = Balance::smote;
  cfg.master_seed = 9;
  auto serial = run_protocol(source, y, spec, cfg, {{"feature_set", "test"}});
  cfg.threads = 3;
  auto parallel = run_protocol(source, y, spec, cfg, {{"feature_set", "test"}});
  CHECK(serial == parallel);
  CHECK(run_to_jsonl(serial) == run_to_jsonl(parallel));
  CHECK(run_from_jsonl(run_to_jsonl(serial)) == serial);
  CHECK(serial.records.size() == 20);
  CHECK(serial.records[0].synthetic_rows > 0);
  CHECK(serial.summary("macro_f1").mean > 0.6);
  CHECK_THROWS_AS(run_from_jsonl("{\"record\":\"fold\"}\n"), DataError);
}

TEST_CASE("protocol with constant labels is degenerate") {
  std::vector<int> ones(20, 1);
  auto source = blob_source(ones, 0.0, 1);
  ml::ModelSpec spec;
  ProtocolConfig cfg;
  cfg.repetitions = 1;
  cfg.folds = 2;
  CHECK_THROWS_AS(run_protocol(source, ones, spec, cfg), DegenerateError);
}

TEST_CASE("majority baseline through the protocol") {
  auto y = labels_50_29();
  auto source = blob_source(y, 0.0, 3);
  ml::ModelSpec spec;
  spec.kind = ml::ModelKind::majority;
  ProtocolConfig cfg;
  cfg.repetitions = 3;
  auto run = run_protocol(source, y, spec, cfg);
  CHECK(run.summary("macro_f1").mean == doctest::Approx(0.388).epsilon(0.03));
  CHECK(run.summary("kappa").mean == 0.0);
}

TEST_CASE("run comparison") {
  EvaluationRun a;
  a.folds = 1;
  a.repetitions = 3;
  a.records = {{0, 0, 0, 0, 0, 0, {5, 0, 0, 5}, false},
               {1, 0, 0, 0, 0, 0, {4, 1, 1, 4}, false},
               {2, 0, 0, 0, 0, 0, {3, 2, 2, 3}, false}};
  auto self = compare_runs(a, a, "macro_f1");
  CHECK(self.p_value == 1.0);
  EvaluationRun b = a;
  b.repetitions = 2;
  b.records.pop_back();
  CHECK_THROWS_AS(compare_runs(a, b, "macro_f1"), DataError);
}

TEST_CASE("tfidf source fits on training documents only") {
  std::vector<TokenList> texts{{{"a", TokenKind::word}}, {{"b", TokenKind::word}}, {{"c", TokenKind::word}}};
  TfidfSource source(texts, {0, 1, 2}, 3, 1, 1);
  std::vector<std::size_t> train{0, 1};
  auto rows = source.build(train);
  CHECK(rows->matrix.cols() == 2);
  CHECK(rows->matrix.at(2, 0) == 0.0);
  CHECK(rows->matrix.at(2, 1) == 0.0);
}
