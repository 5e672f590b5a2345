#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "pstyle/error.hpp"
#include "pstyle/ml.hpp"

using namespace pstyle;
using namespace pstyle::ml;

namespace {

std::vector<std::size_t> all_rows(std::size_t n) {
  std::vector<std::size_t> r(n);
  for (std::size_t i = 0; i < n; ++i) r[i] = i;
  return r;
}

// Two Gaussian blobs separated along every axis.
void blobs(std::size_t n, std::size_t d, double shift, std::uint64_t seed, Matrix& x, Labels& y) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  x = Matrix(n, d);
  y.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    y[i] = i % 3 == 0 ? 0 : 1;
    for (std::size_t j = 0; j < d; ++j) x.at(i, j) = normal(rng) + (y[i] == 1 ? shift : 0.0);
  }
}

double accuracy(const std::vector<double>& p, const Labels& y) {
  double hits = 0;
  for (std::size_t i = 0; i < y.size(); ++i) hits += (p[i] >= 0.5 ? 1 : 0) == y[i];
  return hits / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("encoder: one-hot, unseen levels and standardization") {
  FeatureMatrix m({"a", "b", "c", "d"});
  m.add_column({"level", ColumnKind::categorical, Provenance::questionnaire, {"A", "B", "C"}}, {0, 1, 0, 2});
  m.add_column({"age", ColumnKind::numeric, Provenance::questionnaire, {}}, {10, kMissing, 30, 50});
  std::vector<std::size_t> fit{0, 1, 2};
  std::vector<int> labels{1, 0, 1};
  Encoder enc;
  enc.fit(m, fit, labels, CategoricalEncoding::one_hot);
  auto all = enc.transform(m);
  CHECK(enc.output_cols() == 3);
  CHECK(all.at(0, 0) == 1.0);
  CHECK(all.at(1, 1) == 1.0);
  CHECK(all.at(3, 0) == 0.0);
  CHECK(all.at(3, 1) == 0.0);
  // Training ages 10, (median 20), 30 -> mean 20, population sd sqrt(200/3).
  CHECK(all.at(1, 2) == doctest::Approx(0.0));
  CHECK(all.at(0, 2) == doctest::Approx(-10.0 / std::sqrt(200.0 / 3.0)));
}

TEST_CASE("encoder: target statistic") {
  FeatureMatrix m({"a", "b", "c", "d"});
  m.add_column({"level", ColumnKind::categorical, Provenance::questionnaire, {"A", "B"}}, {0, 0, 0, 1});
  std::vector<int> labels{1, 1, 0, 0};
  Encoder enc;
  std::vector<std::size_t> fit{0, 1, 2};
  std::vector<int> fit_labels{1, 1, 0};
  enc.fit(m, fit, fit_labels, CategoricalEncoding::target_statistic, false);
  auto x = enc.transform(m);
  CHECK(x.at(0, 0) == doctest::Approx((2.0 + 2.0 / 3.0) / 4.0));
  CHECK(x.at(3, 0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("encoder: explicit prior of one half") {
  // Three rows of one level with labels {1,1,0} and prior 0.5 give 2.5 / 4.
  FeatureMatrix m({"a", "b", "c", "d"});
  m.add_column({"level", ColumnKind::categorical, Provenance::questionnaire, {"A", "B"}}, {0, 0, 0, 1});
  Encoder enc;
  std::vector<std::size_t> fit{0, 1, 2, 3};
  std::vector<int> labels{1, 1, 0, 0};
  enc.fit(m, fit, labels, CategoricalEncoding::target_statistic, false);
  CHECK(enc.transform(m).at(0, 0) == doctest::Approx(0.625));
}

TEST_CASE("logistic gradient matches finite differences") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  for (int trial = 0; trial < 20; ++trial) {
    std::size_t n = 5 + trial, d = 1 + trial % 4;
    Matrix x(n, d);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    Labels y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = unit(rng) < 0.5;
      for (std::size_t j = 0; j < d; ++j) rows[i][j] = x.at(i, j) = normal(rng);
    }
    std::vector<double> w(d);
    for (auto& v : w) v = normal(rng);
    double b = normal(rng), l2 = unit(rng) * 2.0;
    CHECK(logistic_objective(x, y, l2, w, b) == doctest::Approx(oracle::logistic_loss(rows, y, l2, w, b)));
    std::vector<double> g(d);
    double gb = 0;
    logistic_gradient(x, y, l2, w, b, g, gb);
    const double h = 1e-5;
    for (std::size_t j = 0; j < d; ++j) {
      auto wp = w, wm = w;
      wp[j] += h;
      wm[j] -= h;
      double fd = (oracle::logistic_loss(rows, y, l2, wp, b) - oracle::logistic_loss(rows, y, l2, wm, b)) / (2 * h);
      CHECK(g[j] == doctest::Approx(fd).epsilon(1e-5));
    }
    double fdb = (oracle::logistic_loss(rows, y, l2, w, b + h) - oracle::logistic_loss(rows, y, l2, w, b - h)) / (2 * h);
    CHECK(gb == doctest::Approx(fdb).epsilon(1e-5));
  }
}

TEST_CASE("logistic fit") {
  Matrix x = Matrix::from_rows({{-2}, {-1}, {1}, {2}});
  Labels y{0, 0, 1, 1};
  auto model = fit_logistic(x, y);
  CHECK(model.converged);
  CHECK(model.weights[0] > 0.0);
  auto p = model.predict_proba(x);
  CHECK(p[0] < p[1]);
  CHECK(p[2] < p[3]);

  // Constant labels with a centred feature: w = 0 and the bias sits at the
  // clamped logit of the prior, since only the weights are penalized.
  Matrix c = Matrix::from_rows({{-1}, {0}, {1}});
  Labels ones{1, 1, 1};
  auto constant = fit_logistic(c, ones, {1.0, 1e-8, 5000});
  CHECK(std::abs(constant.weights[0]) < 1e-6);
  CHECK(constant.bias > 5.0);

  LogisticModel zero;
  zero.weights = {0.0};
  CHECK(zero.predict_proba(x)[0] == doctest::Approx(0.5));
  CHECK_THROWS_AS(fit_logistic(x, y, {-1.0, 1e-6, 10}), ConfigError);
  Labels bad{0, 2, 1, 1};
  CHECK_THROWS_AS(fit_logistic(x, bad), DataError);
}

TEST_CASE("forest") {
  Matrix x = Matrix::from_rows({{0}, {1}, {2}, {3}, {4}, {5}});
  Labels y{0, 0, 0, 1, 1, 1};
  ForestConfig cfg;
  cfg.trees = 50;
  auto f = fit_forest(x, y, cfg, 4);
  CHECK(accuracy(f.predict_proba(x), y) == 1.0);
  auto g = fit_forest(x, y, cfg, 4);
  CHECK(g.predict_proba(x) == f.predict_proba(x));

  // A copied column cannot reduce achievable training accuracy.
  Matrix dup(6, 2);
  for (std::size_t i = 0; i < 6; ++i) dup.at(i, 0) = dup.at(i, 1) = x.at(i, 0);
  CHECK(accuracy(fit_forest(dup, y, cfg, 4).predict_proba(dup), y) == 1.0);

  ForestConfig one;
  one.trees = 1;
  auto single = fit_forest(x, y, one, 1);
  for (double p : single.predict_proba(x)) {
    CHECK(p >= kProbabilityFloor);
    CHECK(p <= 1.0 - kProbabilityFloor);
  }
}

TEST_CASE("boosting") {
  Matrix x;
  Labels y;
  blobs(60, 3, 1.0, 2, x, y);
  BoostedConfig cfg;
  cfg.rounds = 30;
  auto m = fit_boosted(x, y, cfg, 1);
  for (std::size_t r = 1; r < m.training_loss.size(); ++r) CHECK(m.training_loss[r] <= m.training_loss[r - 1] + 1e-12);

  BoostedConfig short_cfg = cfg;
  short_cfg.rounds = 10;
  auto prefix = fit_boosted(x, y, short_cfg, 1);
  CHECK(m.truncated(10).predict_proba(x) == prefix.predict_proba(x));

  BoostedConfig none = cfg;
  none.rounds = 0;
  auto prior = fit_boosted(x, y, none, 1).predict_proba(x);
  double mean_y = 0;
  for (int v : y) mean_y += v;
  mean_y /= static_cast<double>(y.size());
  CHECK(prior[0] == doctest::Approx(mean_y));
  CHECK(accuracy(m.predict_proba(x), y) > 0.8);
}

TEST_CASE("smote contract") {
  Matrix pair = Matrix::from_rows({{0, 0}, {1, 1}});
  auto s = smote(pair, 1, {5, 3});
  REQUIRE(s.synthetic.rows == 1);
  CHECK(s.k_used == 1);
  CHECK(s.synthetic.at(0, 0) == s.synthetic.at(0, 1));
  CHECK(s.synthetic.at(0, 0) >= 0.0);
  CHECK(s.synthetic.at(0, 0) <= 1.0);

  Matrix same = Matrix::from_rows({{2, 3}, {2, 3}, {2, 3}});
  auto t = smote(same, 4, {5, 3});
  for (std::size_t r = 0; r < t.synthetic.rows; ++r) {
    CHECK(t.synthetic.at(r, 0) == 2.0);
    CHECK(t.synthetic.at(r, 1) == 3.0);
  }
  CHECK_THROWS_AS(smote(Matrix::from_rows({{1}}), 1, {5, 0}), DataError);
  CHECK_THROWS_AS(smote(pair, 1, {0, 0}), ConfigError);

  Matrix x;
  Labels y;
  blobs(79, 4, 1.0, 8, x, y);
  y.assign(79, 1);
  for (std::size_t i = 50; i < 79; ++i) y[i] = 0;
  auto balanced = balance_with_smote(x, y, {5, 17});
  CHECK(balanced.synthetic == 21);
  CHECK(balanced.x.rows == 100);
  CHECK(std::count(balanced.y.begin(), balanced.y.end(), 1) == 50);
}

TEST_CASE("model persistence round trip") {
  Matrix x;
  Labels y;
  blobs(30, 2, 1.5, 4, x, y);
  for (auto kind : {ModelKind::logistic, ModelKind::forest, ModelKind::boosted, ModelKind::majority}) {
    ModelSpec spec;
    spec.kind = kind;
    spec.forest.trees = 5;
    spec.boosted.rounds = 5;
    auto model = fit_model(spec, x, y, 12);
    auto back = TrainedModel::from_json(model.to_json());
    CHECK(back.kind() == kind);
    CHECK(back.predict_proba(x) == model.predict_proba(x));
  }
  CHECK_THROWS_AS(TrainedModel::from_json("{\"format_version\":1}"), SchemaError);
  CHECK_THROWS_AS(parse_model_kind("svm"), ConfigError);
  CHECK(parse_model_kind("rf") == ModelKind::forest);
}
