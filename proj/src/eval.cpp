#include "pstyle/eval.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "json.hpp"
#include "pstyle/error.hpp"
#include "pstyle/util.hpp"
#include "rng.hpp"

namespace pstyle::eval {

using nlohmann::json;

// ---------------------------------------------------------------- metrics

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  tp += other.tp;
  fp += other.fp;
  fn += other.fn;
  tn += other.tn;
  return *this;
}

ConfusionMatrix swap_roles(const ConfusionMatrix& c) { return {c.tn, c.fn, c.fp, c.tp}; }

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw DataError("confusion matrix: label vectors differ in length");
  ConfusionMatrix c;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] == 1) {
      (predicted[i] == 1 ? c.tp : c.fn) += 1;
    } else {
      (predicted[i] == 1 ? c.fp : c.tn) += 1;
    }
  }
  return c;
}

namespace {

double ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

}  // namespace

PrecisionRecall precision_recall_f1(const ConfusionMatrix& c) {
  PrecisionRecall out;
  auto tp = static_cast<double>(c.tp);
  out.precision = ratio(tp, tp + static_cast<double>(c.fp));
  out.recall = ratio(tp, tp + static_cast<double>(c.fn));
  out.f1 = ratio(2.0 * out.precision * out.recall, out.precision + out.recall);
  return out;
}

double macro_f1(const ConfusionMatrix& c) {
  return 0.5 * (precision_recall_f1(c).f1 + precision_recall_f1(swap_roles(c)).f1);
}

Kappa cohen_kappa_checked(const ConfusionMatrix& c) {
  auto n = static_cast<double>(c.total());
  if (n == 0.0) return {0.0, true};
  double observed = static_cast<double>(c.tp + c.tn) / n;
  double truth_pos = static_cast<double>(c.tp + c.fn) / n;
  double pred_pos = static_cast<double>(c.tp + c.fp) / n;
  double expected = truth_pos * pred_pos + (1.0 - truth_pos) * (1.0 - pred_pos);
  if (expected >= 1.0) return {0.0, true};
  return {(observed - expected) / (1.0 - expected), false};
}

double cohen_kappa(const ConfusionMatrix& c) { return cohen_kappa_checked(c).value; }

MetricSet compute_metrics(const ConfusionMatrix& c) {
  MetricSet m;
  auto pos = precision_recall_f1(c);
  auto neg = precision_recall_f1(swap_roles(c));
  m.precision = pos.precision;
  m.recall = pos.recall;
  m.f1_anaclitic = pos.f1;
  m.f1_introjective = neg.f1;
  m.macro_f1 = 0.5 * (pos.f1 + neg.f1);
  auto kappa = cohen_kappa_checked(c);
  m.kappa = kappa.value;
  m.kappa_saturated = kappa.chance_saturated;
  m.accuracy = ratio(static_cast<double>(c.tp + c.tn), static_cast<double>(c.total()));
  return m;
}

const std::vector<std::string>& metric_names() {
  static const std::vector<std::string> names{"macro_f1",       "kappa",           "accuracy", "precision",
                                              "recall",         "f1_anaclitic",    "f1_introjective"};
  return names;
}

double metric_value(const MetricSet& m, std::string_view name) {
  if (name == "macro_f1") return m.macro_f1;
  if (name == "kappa") return m.kappa;
  if (name == "accuracy") return m.accuracy;
  if (name == "precision") return m.precision;
  if (name == "recall") return m.recall;
  if (name == "f1_anaclitic") return m.f1_anaclitic;
  if (name == "f1_introjective") return m.f1_introjective;
  std::string valid;
  for (const auto& n : metric_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("unknown metric '" + std::string(name) + "'; valid values: " + valid);
}

// ---------------------------------------------------------------- folds

std::vector<std::size_t> FoldPlan::train_indices(std::size_t f) const {
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < folds.size(); ++g) {
    if (g != f) out.insert(out.end(), folds[g].begin(), folds[g].end());
  }
  std::sort(out.begin(), out.end());
  return out;
}

FoldPlan stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (k > labels.size()) {
    throw ConfigError("cannot split " + std::to_string(labels.size()) + " samples into " + std::to_string(k) +
                      " folds");
  }
  FoldPlan plan;
  plan.k = k;
  plan.seed = seed;
  plan.folds.resize(k);
  std::size_t next = 0;
  for (int cls : {1, 0}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == cls) members.push_back(i);
    }
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(cls)));
    rng.shuffle(members);
    for (auto m : members) {
      plan.folds[next].push_back(m);
      next = (next + 1) % k;
    }
  }
  for (auto& fold : plan.folds) std::sort(fold.begin(), fold.end());
  return plan;
}

// ---------------------------------------------------------------- voting

int majority_vote(std::span<const ChunkVote> votes) {
  if (votes.empty()) throw DataError("majority vote over an empty chunk list");
  std::size_t pos = 0;
  std::size_t neg = 0;
  double pos_conf = 0.0;
  double neg_conf = 0.0;
  for (const auto& v : votes) {
    if (v.label == 1) {
      ++pos;
      pos_conf += v.probability;
    } else {
      ++neg;
      neg_conf += 1.0 - v.probability;
    }
  }
  if (pos != neg) return pos > neg ? 1 : 0;
  double n = static_cast<double>(pos);
  return neg_conf / n > pos_conf / n ? 0 : 1;
}

// ---------------------------------------------------------------- sources

StaticSource::StaticSource(FeatureMatrix matrix, std::vector<std::size_t> row_document, std::size_t documents)
    : documents_(documents) {
  if (row_document.size() != matrix.rows()) throw DataError("feature rows and document map differ in length");
  std::vector<bool> seen(documents, false);
  for (auto d : row_document) {
    if (d >= documents) throw DataError("feature row refers to an unknown document");
    seen[d] = true;
  }
  if (std::find(seen.begin(), seen.end(), false) != seen.end()) {
    throw DataError("every document needs at least one feature row");
  }
  rows_ = std::make_shared<const FoldFeatures>(FoldFeatures{std::move(matrix), std::move(row_document)});
}

StaticSource::StaticSource(FeatureMatrix matrix) : documents_(matrix.rows()) {
  std::vector<std::size_t> identity(matrix.rows());
  for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
  rows_ = std::make_shared<const FoldFeatures>(FoldFeatures{std::move(matrix), std::move(identity)});
}

std::shared_ptr<const FoldFeatures> StaticSource::build(std::span<const std::size_t>) const { return rows_; }

TfidfSource::TfidfSource(std::vector<TokenList> texts, std::vector<std::size_t> row_document, std::size_t documents,
                         std::size_t n_max, std::size_t min_df)
    : texts_(std::move(texts)),
      row_document_(std::move(row_document)),
      documents_(documents),
      n_max_(n_max),
      min_df_(min_df) {
  if (texts_.size() != row_document_.size()) throw DataError("texts and document map differ in length");
  for (auto d : row_document_) {
    if (d >= documents_) throw DataError("text row refers to an unknown document");
  }
}

std::shared_ptr<const FoldFeatures> TfidfSource::build(std::span<const std::size_t> train_docs) const {
  std::vector<bool> is_train(documents_, false);
  for (auto d : train_docs) is_train[d] = true;
  std::vector<TokenList> train_texts;
  for (std::size_t i = 0; i < texts_.size(); ++i) {
    if (is_train[row_document_[i]]) train_texts.push_back(texts_[i]);
  }
  auto model = fit_tfidf(train_texts, n_max_, min_df_);
  std::vector<std::string> ids(texts_.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = "row" + std::to_string(i);
  return std::make_shared<const FoldFeatures>(FoldFeatures{tfidf_matrix(model, texts_, ids), row_document_});
}

// ---------------------------------------------------------------- protocol

std::string_view to_string(Balance balance) { return balance == Balance::smote ? "smote" : "none"; }

Balance parse_balance(std::string_view text) {
  if (text == "none") return Balance::none;
  if (text == "smote") return Balance::smote;
  throw ConfigError("unknown balance '" + std::string(text) + "'; valid values: none, smote");
}

namespace {

bool every_train_split_has_both(const FoldPlan& plan, std::span<const int> labels) {
  std::size_t total_pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  std::size_t total_neg = labels.size() - total_pos;
  for (const auto& fold : plan.folds) {
    std::size_t pos = 0;
    for (auto i : fold) pos += labels[i] == 1 ? 1 : 0;
    if (total_pos - pos == 0 || total_neg - (fold.size() - pos) == 0) return false;
  }
  return true;
}

std::vector<FoldRecord> run_repetition(const FeatureSource& source, std::span<const int> labels,
                                       const ml::ModelSpec& spec, const ProtocolConfig& config, std::size_t r) {
  bool reseeded = false;
  auto plan = stratified_folds(labels, config.folds, derive_seed(config.master_seed, r, 0, 1));
  if (!every_train_split_has_both(plan, labels)) {
    reseeded = true;
    plan = stratified_folds(labels, config.folds, derive_seed(config.master_seed, r, 0, 2));
    if (!every_train_split_has_both(plan, labels)) {
      throw DegenerateError("repetition " + std::to_string(r) + ": a training split holds a single class");
    }
  }

  std::vector<FoldRecord> records;
  for (std::size_t f = 0; f < config.folds; ++f) {
    auto train_docs = plan.train_indices(f);
    const auto& test_docs = plan.folds[f];
    auto features = source.build(train_docs);

    std::vector<bool> is_train(labels.size(), false);
    for (auto d : train_docs) is_train[d] = true;
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> test_rows;
    ml::Labels train_y;
    for (std::size_t row = 0; row < features->row_document.size(); ++row) {
      auto doc = features->row_document[row];
      if (is_train[doc]) {
        train_rows.push_back(row);
        train_y.push_back(labels[doc]);
      } else {
        test_rows.push_back(row);
      }
    }

    ml::Encoder encoder;
    encoder.fit(features->matrix, train_rows, train_y, spec.categorical_encoding());
    ml::Matrix x_train = encoder.transform(features->matrix, train_rows);
    ml::Matrix x_test = encoder.transform(features->matrix, test_rows);

    FoldRecord record;
    record.repetition = r;
    record.fold = f;
    record.fold_seed = derive_seed(config.master_seed, r, f + 1, 0);
    record.train_documents = train_docs.size();
    record.reseeded = reseeded;

    ml::TrainedModel model;
    if (config.balance == Balance::smote) {
      ml::SmoteConfig smote{config.smote_k, derive_seed(config.master_seed, r, f + 1, 1)};
      auto balanced = ml::balance_with_smote(x_train, train_y, smote);
      record.train_rows = balanced.x.rows;
      record.synthetic_rows = balanced.synthetic;
      model = ml::fit_model(spec, balanced.x, balanced.y, record.fold_seed);
    } else {
      record.train_rows = x_train.rows;
      model = ml::fit_model(spec, x_train, train_y, record.fold_seed);
    }

    auto proba = model.predict_proba(x_test);
    std::map<std::size_t, std::vector<ChunkVote>> votes;
    for (std::size_t i = 0; i < test_rows.size(); ++i) {
      votes[features->row_document[test_rows[i]]].push_back({label_of(proba[i]), proba[i]});
    }
    std::vector<int> truth;
    std::vector<int> predicted;
    for (auto doc : test_docs) {
      auto it = votes.find(doc);
      if (it == votes.end()) throw DataError("test document " + std::to_string(doc) + " has no feature rows");
      truth.push_back(labels[doc]);
      predicted.push_back(majority_vote(it->second));
    }
    record.confusion = confusion(truth, predicted);
    records.push_back(record);
  }
  return records;
}

}  // namespace

EvaluationRun run_protocol(const FeatureSource& source, std::span<const int> document_labels,
                           const ml::ModelSpec& model, const ProtocolConfig& config,
                           std::map<std::string, std::string> description) {
  if (source.documents() != document_labels.size()) {
    throw DataError("feature source covers " + std::to_string(source.documents()) + " documents but " +
                    std::to_string(document_labels.size()) + " labels were given");
  }
  for (int y : document_labels) {
    if (y != 0 && y != 1) throw DataError("document labels must be 0 or 1");
  }
  if (config.repetitions == 0) throw ConfigError("repetitions must be at least 1");

  EvaluationRun run;
  run.config = std::move(description);
  run.folds = config.folds;
  run.repetitions = config.repetitions;
  run.master_seed = config.master_seed;

  std::vector<std::vector<FoldRecord>> per_rep(config.repetitions);
  std::vector<std::exception_ptr> errors(config.repetitions);
  std::size_t threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
  threads = std::min(threads, config.repetitions);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r = next++; r < config.repetitions; r = next++) {
      try {
        per_rep[r] = run_repetition(source, document_labels, model, config, r);
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  for (auto& recs : per_rep) run.records.insert(run.records.end(), recs.begin(), recs.end());
  return run;
}

std::string EvaluationRun::fingerprint() const {
  std::string text;
  for (const auto& [key, value] : config) text += key + "=" + value + "\n";
  return pstyle::fingerprint(text);
}

std::vector<double> EvaluationRun::scores(std::string_view metric) const {
  metric_value(MetricSet{}, metric);  // validates the name
  std::vector<double> sums(repetitions, 0.0);
  std::vector<std::size_t> counts(repetitions, 0);
  for (const auto& rec : records) {
    if (rec.repetition >= repetitions) throw DataError("fold record refers to an unknown repetition");
    sums[rec.repetition] += metric_value(compute_metrics(rec.confusion), metric);
    counts[rec.repetition] += 1;
  }
  for (std::size_t r = 0; r < repetitions; ++r) {
    if (counts[r] == 0) throw DataError("repetition " + std::to_string(r) + " has no fold records");
    sums[r] /= static_cast<double>(counts[r]);
  }
  return sums;
}

Summary EvaluationRun::summary(std::string_view metric) const {
  auto s = scores(metric);
  return {stats::mean(s), stats::sample_sd(s)};
}

std::string run_to_jsonl(const EvaluationRun& run) {
  std::string out;
  for (const auto& rec : run.records) {
    auto m = compute_metrics(rec.confusion);
    json line = {{"record", "fold"},
                 {"repetition", rec.repetition},
                 {"fold", rec.fold},
                 {"fold_seed", rec.fold_seed},
                 {"train_documents", rec.train_documents},
                 {"train_rows", rec.train_rows},
                 {"synthetic_rows", rec.synthetic_rows},
                 {"reseeded", rec.reseeded},
                 {"tp", rec.confusion.tp},
                 {"fp", rec.confusion.fp},
                 {"fn", rec.confusion.fn},
                 {"tn", rec.confusion.tn},
                 {"macro_f1", m.macro_f1},
                 {"kappa", m.kappa}};
    out += line.dump() + "\n";
  }
  json metrics = json::object();
  for (const auto& name : metric_names()) {
    auto s = run.scores(name);
    metrics[name] = {{"mean", stats::mean(s)}, {"sd", stats::sample_sd(s)}, {"scores", s}};
  }
  json summary = {{"record", "summary"},   {"fingerprint", run.fingerprint()}, {"config", run.config},
                  {"folds", run.folds},    {"repetitions", run.repetitions},   {"master_seed", run.master_seed},
                  {"metrics", metrics}};
  out += summary.dump() + "\n";
  return out;
}

EvaluationRun run_from_jsonl(std::string_view text) {
  EvaluationRun run;
  bool have_summary = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("run file: ") + e.what(), line_no, e.byte);
    }
    try {
      auto kind = j.at("record").get<std::string>();
      if (have_summary) throw SchemaError("run file: records after the summary record");
      if (kind == "fold") {
        FoldRecord rec;
        rec.repetition = j.at("repetition").get<std::size_t>();
        rec.fold = j.at("fold").get<std::size_t>();
        rec.fold_seed = j.at("fold_seed").get<std::uint64_t>();
        rec.train_documents = j.at("train_documents").get<std::size_t>();
        rec.train_rows = j.at("train_rows").get<std::size_t>();
        rec.synthetic_rows = j.at("synthetic_rows").get<std::size_t>();
        rec.reseeded = j.at("reseeded").get<bool>();
        rec.confusion = {j.at("tp").get<std::size_t>(), j.at("fp").get<std::size_t>(),
                         j.at("fn").get<std::size_t>(), j.at("tn").get<std::size_t>()};
        run.records.push_back(rec);
      } else if (kind == "summary") {
        have_summary = true;
        run.config = j.at("config").get<std::map<std::string, std::string>>();
        run.folds = j.at("folds").get<std::size_t>();
        run.repetitions = j.at("repetitions").get<std::size_t>();
        run.master_seed = j.at("master_seed").get<std::uint64_t>();
      } else {
        throw SchemaError("run file: unknown record type '" + kind + "' on line " + std::to_string(line_no));
      }
    } catch (const json::exception& e) {
      throw SchemaError("run file line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_summary) throw SchemaError("run file has no summary record");
  if (run.records.size() != run.folds * run.repetitions) {
    throw SchemaError("run file: expected " + std::to_string(run.folds * run.repetitions) + " fold records, found " +
                      std::to_string(run.records.size()));
  }
  return run;
}

stats::TestResult compare_runs(const EvaluationRun& a, const EvaluationRun& b, std::string_view metric) {
  if (a.repetitions != b.repetitions) {
    throw DataError("cannot compare runs with " + std::to_string(a.repetitions) + " and " +
                    std::to_string(b.repetitions) + " repetitions");
  }
  auto sa = a.scores(metric);
  auto sb = b.scores(metric);
  return stats::welch_t(sa, sb);
}

}  // namespace pstyle::eval
