// Prints one PASS/FAIL line per acceptance criterion; exits non-zero on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "oracles.hpp"
#include "pstyle/config.hpp"
#include "pstyle/eval.hpp"
#include "pstyle/ml.hpp"
#include "pstyle/pipeline.hpp"
#include "pstyle/stats.hpp"
#include "pstyle/synthetic.hpp"

namespace fs = std::filesystem;
using namespace pstyle;

namespace {

int failures = 0;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void report(int id, bool pass, const std::string& detail) {
  if (!pass) ++failures;
  std::printf("criterion %d %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string num(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

void metric_oracle() {
  Timer t;
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    std::size_t n = 1 + rng() % 200;
    std::size_t cells[4] = {0, 0, 0, 0};
    for (std::size_t k = 0; k < n; ++k) ++cells[rng() % 4];
    eval::ConfusionMatrix c{cells[0], cells[1], cells[2], cells[3]};
    oracle::Counts o{double(c.tp), double(c.fp), double(c.fn), double(c.tn)};
    worst = std::max(worst, std::abs(eval::cohen_kappa(c) - oracle::kappa(o)));
    worst = std::max(worst, std::abs(eval::macro_f1(c) - oracle::macro_f1(o)));
  }
  bool examples = std::abs(eval::cohen_kappa({10, 0, 0, 7}) - 1.0) < 1e-12 &&
                  std::abs(eval::cohen_kappa({25, 25, 0, 0})) < 1e-12 &&
                  std::abs(eval::cohen_kappa({40, 9, 10, 20}) - 0.4861) < 1e-4;
  double secs = t.seconds();
  report(1, worst < 1e-12 && examples && secs < 1.0,
         "metric oracle: max |delta| " + num(worst) + ", worked kappa examples " + (examples ? "ok" : "wrong") +
             ", " + num(secs, 3) + " s");
}

void mann_whitney_exactness() {
  Timer t;
  double worst_exact = 0.0;
  std::size_t cases = 0;
  for (std::size_t na = 1; na <= 6; ++na) {
    for (std::size_t nb = 1; nb <= 6; ++nb) {
      std::size_t n = na + nb;
      // Every split of the grid values 1..n into samples of sizes na and nb.
      for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != na) continue;
        std::vector<double> a, b;
        for (std::size_t i = 0; i < n; ++i) ((mask >> i) & 1u ? a : b).push_back(static_cast<double>(i + 1));
        auto r = stats::mann_whitney(a, b);
        worst_exact = std::max(worst_exact, std::abs(r.p_value - oracle::mann_whitney_enumerated(a, b)));
        ++cases;
      }
    }
  }
  double worst_normal = 0.0;
  for (std::uint32_t mask = 0; mask < (1u << 16); ++mask) {
    if (__builtin_popcount(mask) != 8) continue;
    std::vector<double> a, b;
    for (std::size_t i = 0; i < 16; ++i) ((mask >> i) & 1u ? a : b).push_back(static_cast<double>(i + 1));
    double exact = stats::mann_whitney(a, b).p_value;
    double approx = stats::mann_whitney(a, b, true).p_value;
    worst_normal = std::max(worst_normal, std::abs(exact - approx));
  }
  double secs = t.seconds();
  report(2, worst_exact < 1e-9 && worst_normal <= 0.02 && secs < 30.0,
         "Mann-Whitney: " + std::to_string(cases) + " exact cases, max |delta| " + num(worst_exact) +
             "; normal vs exact at 8/8 max |delta| " + num(worst_normal) + ", " + num(secs, 3) + " s");
}

void logistic_gradient_check() {
  Timer t;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unit;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t n = 3 + rng() % 40, d = 1 + rng() % 8;
    ml::Matrix x(n, d);
    std::vector<std::vector<double>> rows(n, std::vector<double>(d));
    std::vector<int> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = unit(rng) < 0.5;
      for (std::size_t j = 0; j < d; ++j) rows[i][j] = x.at(i, j) = 2.0 * normal(rng);
    }
    std::vector<double> w(d);
    for (auto& v : w) v = normal(rng);
    double b = normal(rng), l2 = 3.0 * unit(rng);
    std::vector<double> g(d);
    double gb = 0.0;
    ml::logistic_gradient(x, y, l2, w, b, g, gb);
    std::vector<double> fd(d + 1);
    const double h = 1e-6;
    for (std::size_t j = 0; j <= d; ++j) {
      auto wp = w, wm = w;
      double bp = b, bm = b;
      if (j < d) {
        wp[j] += h;
        wm[j] -= h;
      } else {
        bp += h;
        bm -= h;
      }
      fd[j] = (oracle::logistic_loss(rows, y, l2, wp, bp) - oracle::logistic_loss(rows, y, l2, wm, bm)) / (2 * h);
    }
    double diff = 0.0, norm = 0.0;
    for (std::size_t j = 0; j <= d; ++j) {
      double analytic = j < d ? g[j] : gb;
      diff += (analytic - fd[j]) * (analytic - fd[j]);
      norm += fd[j] * fd[j];
    }
    worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(norm), 1e-12));
  }
  double secs = t.seconds();
  report(3, worst < 1e-4 && secs < 5.0,
         "logistic gradient: max relative error " + num(worst) + " over 100 instances, " + num(secs, 3) + " s");
}

void smote_contract() {
  Timer t;
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  ml::Matrix x(79, 6);
  std::vector<int> y(79, 1);
  for (std::size_t i = 50; i < 79; ++i) y[i] = 0;
  for (auto& v : x.data) v = normal(rng);
  auto balanced = ml::balance_with_smote(x, y, {5, 11});
  auto pos = std::count(balanced.y.begin(), balanced.y.end(), 1);
  auto neg = std::count(balanced.y.begin(), balanced.y.end(), 0);

  ml::Matrix minority(29, 6);
  for (std::size_t i = 0; i < 29; ++i) {
    for (std::size_t j = 0; j < 6; ++j) minority.at(i, j) = x.at(50 + i, j);
  }
  auto s = ml::smote(minority, 21, {5, 11});
  bool between = true;
  for (std::size_t r = 0; r < s.synthetic.rows; ++r) {
    auto [p, q] = s.parents[r];
    for (std::size_t j = 0; j < 6; ++j) {
      double lo = std::min(minority.at(p, j), minority.at(q, j));
      double hi = std::max(minority.at(p, j), minority.at(q, j));
      between = between && s.synthetic.at(r, j) >= lo && s.synthetic.at(r, j) <= hi;
    }
  }
  ml::Matrix same(5, 3);
  for (std::size_t i = 0; i < 5; ++i) {
    same.at(i, 0) = 1.5;
    same.at(i, 1) = -2.0;
    same.at(i, 2) = 0.25;
  }
  auto copies = ml::smote(same, 10, {5, 4});
  bool identical = true;
  for (std::size_t r = 0; r < copies.synthetic.rows; ++r) {
    for (std::size_t j = 0; j < 3; ++j) identical = identical && copies.synthetic.at(r, j) == same.at(0, j);
  }
  double secs = t.seconds();
  report(4, pos == 50 && neg == 50 && balanced.synthetic == 21 && between && identical && secs < 1.0,
         "SMOTE: output " + std::to_string(pos) + "/" + std::to_string(neg) + ", betweenness " +
             (between ? "holds" : "violated") + ", identical rows " + (identical ? "reproduced" : "changed") + ", " +
             num(secs, 3) + " s");
}

void stratification() {
  Timer t;
  std::mt19937_64 rng(99);
  bool ok = true;
  std::size_t draws = 0;
  auto check = [&](const std::vector<int>& y, std::size_t k, std::uint64_t seed) {
    auto plan = eval::stratified_folds(y, k, seed);
    std::vector<int> seen(y.size(), 0);
    double share = static_cast<double>(std::count(y.begin(), y.end(), 1)) / static_cast<double>(y.size());
    for (const auto& f : plan.folds) {
      double pos = 0;
      for (auto i : f) {
        ++seen[i];
        pos += y[i];
      }
      if (std::abs(pos - share * static_cast<double>(f.size())) > 1.0 + 1e-9) ok = false;
    }
    for (int s : seen) ok = ok && s == 1;
    ++draws;
    return plan;
  };
  std::vector<int> clinic_split(79, 0);
  std::fill(clinic_split.begin(), clinic_split.begin() + 50, 1);
  bool sizes_ok = true;
  for (int i = 0; i < 100; ++i) {
    auto plan = check(clinic_split, 5, rng());
    std::vector<std::size_t> sizes, anaclitic;
    for (const auto& f : plan.folds) {
      sizes.push_back(f.size());
      anaclitic.push_back(static_cast<std::size_t>(std::count_if(f.begin(), f.end(), [](auto r) { return r < 50; })));
    }
    std::sort(sizes.rbegin(), sizes.rend());
    sizes_ok = sizes_ok && sizes == std::vector<std::size_t>{16, 16, 16, 16, 15} &&
               anaclitic == std::vector<std::size_t>(5, 10);
  }
  while (draws < 1000) {
    std::size_t n = 2 + rng() % 150;
    std::size_t k = 2 + rng() % std::min<std::size_t>(n - 1, 10);
    std::vector<int> y(n);
    double p = std::uniform_real_distribution<double>(0.1, 0.9)(rng);
    for (auto& v : y) v = std::uniform_real_distribution<double>()(rng) < p;
    check(y, k, rng());
  }
  double secs = t.seconds();
  report(5, ok && sizes_ok && secs < 5.0,
         "stratification: " + std::to_string(draws) + " plans, partition and ratio " + (ok ? "hold" : "violated") +
             ", 79 patients in 5 folds give 16,16,16,16,15 with 10 anaclitic each: " + (sizes_ok ? "yes" : "no") +
             ", " + num(secs, 3) + " s");
}

std::string scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("pstyle_accept_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir.string();
}

struct Corpus {
  std::string dir;
  ExperimentConfig config;
  Dataset data;
};

Corpus make_corpus(const std::string& name, double signal, std::uint64_t seed) {
  Corpus c;
  c.dir = scratch_dir(name);
  SyntheticSpec spec;
  spec.signal = signal;
  spec.seed = seed;
  write_synthetic(generate_synthetic(spec), c.dir);
  c.config = load_config(c.dir + "/corpus.conf");
  c.data = load_dataset(c.config);
  return c;
}

eval::EvaluationRun liwc_rf_smote(const Corpus& c, std::size_t repetitions, std::uint64_t master_seed,
                                  std::size_t threads = 1) {
  auto source = build_feature_source(c.config, c.data, "liwc");
  eval::ProtocolConfig protocol;
  protocol.folds = 5;
  protocol.repetitions = repetitions;
  protocol.balance = eval::Balance::smote;
  protocol.master_seed = master_seed;
  protocol.threads = threads;
  return eval::run_protocol(*source, c.data.labels, model_spec(c.config, "rf"), protocol,
                            {{"feature_set", "liwc"}, {"model", "rf"}, {"balance", "smote"}});
}

void protocol_determinism() {
  Timer t;
  auto c = make_corpus("determinism", 1.0, 2);
  auto serial = eval::run_to_jsonl(liwc_rf_smote(c, 10, 17, 1));
  auto parallel = eval::run_to_jsonl(liwc_rf_smote(c, 10, 17, 4));
  auto again = eval::run_to_jsonl(liwc_rf_smote(c, 10, 17, 1));
  fs::remove_all(c.dir);
  bool same = serial == parallel && serial == again;
  report(6, same,
         std::string("protocol determinism: serial, 4-thread and repeated runs are ") +
             (same ? "byte-identical" : "different") + ", " + num(t.seconds(), 3) + " s");
}

void synthetic_end_to_end() {
  Timer t;
  auto strong = make_corpus("signal", 1.0, 1);
  auto run = liwc_rf_smote(strong, 20, 0);
  fs::remove_all(strong.dir);
  auto f1 = run.summary("macro_f1");
  auto kappa = run.summary("kappa");

  // A single null corpus of 79 patients has a corpus-level chance kappa with an
  // sd of about 0.15, so the null level is the mean over ten corpora.
  std::vector<double> null_kappas;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto null = make_corpus("null" + std::to_string(seed), 0.0, seed);
    null_kappas.push_back(liwc_rf_smote(null, 20, 0).summary("kappa").mean);
    fs::remove_all(null.dir);
  }
  double null_mean = stats::mean(null_kappas);
  double secs = t.seconds();
  bool pass = f1.mean >= 0.90 && kappa.mean >= 0.75 && std::abs(null_mean) <= 0.10 && secs < 120.0;
  std::string per_corpus;
  for (double k : null_kappas) per_corpus += (per_corpus.empty() ? "" : " ") + num(k, 3);
  report(7, pass,
         "synthetic liwc x rf x smote, 5-fold x 20: F1 " + num(f1.mean, 4) + " ± " + num(f1.sd, 3) + ", kappa " +
             num(kappa.mean, 4) + " ± " + num(kappa.sd, 3) + "; signal 0 mean kappa " + num(null_mean, 3) +
             " over 10 corpora [" + per_corpus + "], " + num(secs, 3) + " s");
}

void chance_floor() {
  Timer t;
  std::vector<int> y(79, 0);
  std::fill(y.begin(), y.begin() + 50, 1);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < y.size(); ++i) ids.push_back("P" + std::to_string(i));
  FeatureMatrix m(ids);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<double> noise(79);
  for (auto& v : noise) v = normal(rng);
  m.add_column({"noise", ColumnKind::numeric, Provenance::audio, {}}, noise);
  eval::StaticSource source(m);
  ml::ModelSpec spec;
  spec.kind = ml::ModelKind::majority;
  eval::ProtocolConfig protocol;
  protocol.repetitions = 100;
  auto run = eval::run_protocol(source, y, spec, protocol);
  auto f1 = run.summary("macro_f1");
  // Per fold: all anaclitic predicted, F1_a = 2a / (2a + i), F1_i = 0.
  double closed = 0.0;
  for (auto [a, i] : {std::pair{10.0, 6.0}, {10.0, 6.0}, {10.0, 6.0}, {10.0, 6.0}, {10.0, 5.0}}) {
    closed += 0.5 * (2 * a / (2 * a + i)) / 5.0;
  }
  bool pass = std::abs(f1.mean - 0.388) <= 0.01;
  report(8, pass,
         "constant majority: macro-F1 " + num(f1.mean, 4) + " ± " + num(f1.sd, 3) + " (closed form " +
             num(closed, 4) + "), " + num(t.seconds(), 3) + " s");
}

eval::EvaluationRun planted_run(double centre, double sd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(centre, sd);
  eval::EvaluationRun run;
  run.folds = 1;
  run.repetitions = 100;
  run.master_seed = seed;
  for (std::size_t r = 0; r < 100; ++r) {
    // Balanced 500/500 truth with equal per-class accuracy: macro F1 equals accuracy.
    auto hits = static_cast<std::size_t>(std::lround(std::clamp(normal(rng), 0.0, 1.0) * 500.0));
    eval::FoldRecord rec;
    rec.repetition = r;
    rec.confusion = {hits, 500 - hits, 500 - hits, hits};
    run.records.push_back(rec);
  }
  return run;
}

void comparison_harness() {
  Timer t;
  auto a = planted_run(0.8, 0.05, 1);
  auto b = planted_run(0.6, 0.05, 2);
  auto test = eval::compare_runs(a, b, "macro_f1");
  auto self = eval::compare_runs(a, a, "macro_f1");
  bool pass = test.p_value < 0.001 && self.p_value == 1.0;
  report(9, pass,
         "comparison: planted gap 0.2 gives t " + num(test.statistic, 4) + ", p " + num(test.p_value, 3) +
             " (reported as " + (test.p_value < 0.001 ? "<0.001" : num(test.p_value, 3)) + "); self p " +
             num(self.p_value, 3) + ", " + num(t.seconds(), 3) + " s");
}

}  // namespace

int main() {
  try {
    metric_oracle();
    mann_whitney_exactness();
    logistic_gradient_check();
    smote_contract();
    stratification();
    protocol_determinism();
    synthetic_end_to_end();
    chance_floor();
    comparison_harness();
  } catch (const std::exception& e) {
    std::printf("acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
