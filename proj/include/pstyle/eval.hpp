#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pstyle/features.hpp"
#include "pstyle/ml.hpp"
#include "pstyle/stats.hpp"

namespace pstyle::eval {

// ---------------------------------------------------------------- metrics

// Anaclitic is the positive class.
struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const { return tp + fp + fn + tn; }
  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  bool operator==(const ConfusionMatrix&) const = default;
};

/// Same matrix with the class roles exchanged (introjective positive).
ConfusionMatrix swap_roles(const ConfusionMatrix& c);

/// Labels are 1 (anaclitic) or 0.
ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted);

struct PrecisionRecall {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Positive-class scores; every 0/0 ratio is taken as 0.
PrecisionRecall precision_recall_f1(const ConfusionMatrix& c);
double macro_f1(const ConfusionMatrix& c);

struct Kappa {
  double value = 0.0;
  // Expected agreement is 1 (one label on both sides); value is set to 0.
  bool chance_saturated = false;
};

Kappa cohen_kappa_checked(const ConfusionMatrix& c);
double cohen_kappa(const ConfusionMatrix& c);

struct MetricSet {
  double precision = 0.0;
  double recall = 0.0;
  double f1_anaclitic = 0.0;
  double f1_introjective = 0.0;
  double macro_f1 = 0.0;
  double kappa = 0.0;
  double accuracy = 0.0;
  bool kappa_saturated = false;
};

MetricSet compute_metrics(const ConfusionMatrix& c);

/// Metric names accepted by EvaluationRun::scores and compare_runs.
const std::vector<std::string>& metric_names();
double metric_value(const MetricSet& m, std::string_view name);

// ---------------------------------------------------------------- folds

struct FoldPlan {
  std::size_t k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::size_t>> folds;  // sorted row indices

  /// Complement of fold f, sorted.
  std::vector<std::size_t> train_indices(std::size_t f) const;
};

/// Shuffles each class with the seed, then deals rows round-robin over the
/// folds continuing across classes (anaclitic first).
FoldPlan stratified_folds(std::span<const int> labels, std::size_t k, std::uint64_t seed);

// ---------------------------------------------------------------- voting

struct ChunkVote {
  int label = 1;
  double probability = 0.5;  // predicted probability of anaclitic
};

/// Label with most votes; ties go to the side with the higher mean confidence
/// (p for anaclitic voters, 1 - p for introjective voters), then to anaclitic.
int majority_vote(std::span<const ChunkVote> votes);

/// Thresholds a probability at 0.5 (0.5 itself is anaclitic).
inline int label_of(double probability) { return probability >= 0.5 ? 1 : 0; }

// ---------------------------------------------------------------- sources

// Per-fold feature rows. Several rows may belong to one document (chunks).
struct FoldFeatures {
  FeatureMatrix matrix;
  std::vector<std::size_t> row_document;
};

class FeatureSource {
 public:
  virtual ~FeatureSource() = default;
  virtual std::size_t documents() const = 0;
  /// Rows for every document. Anything estimated from data may only use train_docs.
  virtual std::shared_ptr<const FoldFeatures> build(std::span<const std::size_t> train_docs) const = 0;
};

// Precomputed rows (questionnaire, lexicon, embedding and audio features).
class StaticSource : public FeatureSource {
 public:
  StaticSource(FeatureMatrix matrix, std::vector<std::size_t> row_document, std::size_t documents);
  /// One row per document.
  explicit StaticSource(FeatureMatrix matrix);

  std::size_t documents() const override { return documents_; }
  std::shared_ptr<const FoldFeatures> build(std::span<const std::size_t> train_docs) const override;

 private:
  std::shared_ptr<const FoldFeatures> rows_;
  std::size_t documents_;
};

// TF-IDF rows whose vocabulary and idf are fitted on the training documents.
class TfidfSource : public FeatureSource {
 public:
  TfidfSource(std::vector<TokenList> texts, std::vector<std::size_t> row_document, std::size_t documents,
              std::size_t n_max = 3, std::size_t min_df = 1);

  std::size_t documents() const override { return documents_; }
  std::shared_ptr<const FoldFeatures> build(std::span<const std::size_t> train_docs) const override;

 private:
  std::vector<TokenList> texts_;
  std::vector<std::size_t> row_document_;
  std::size_t documents_;
  std::size_t n_max_;
  std::size_t min_df_;
};

// ---------------------------------------------------------------- protocol

enum class Balance { none, smote };
std::string_view to_string(Balance balance);
Balance parse_balance(std::string_view text);

struct ProtocolConfig {
  std::size_t folds = 5;
  std::size_t repetitions = 100;
  Balance balance = Balance::none;
  std::size_t smote_k = 5;
  std::uint64_t master_seed = 0;
  std::size_t threads = 1;  // 0 = one per hardware thread
};

struct FoldRecord {
  std::size_t repetition = 0;
  std::size_t fold = 0;
  std::uint64_t fold_seed = 0;
  std::size_t train_documents = 0;
  std::size_t train_rows = 0;
  std::size_t synthetic_rows = 0;
  ConfusionMatrix confusion;
  bool reseeded = false;

  bool operator==(const FoldRecord&) const = default;
};

struct Summary {
  double mean = 0.0;
  double sd = 0.0;
};

struct EvaluationRun {
  // Describes the cell: feature set, model, balance, seeds, hyperparameters.
  std::map<std::string, std::string> config;
  std::size_t folds = 0;
  std::size_t repetitions = 0;
  std::uint64_t master_seed = 0;
  std::vector<FoldRecord> records;  // repetition-major

  /// FNV-1a over the config entries.
  std::string fingerprint() const;
  /// Per-repetition mean over folds of the per-fold metric.
  std::vector<double> scores(std::string_view metric) const;
  Summary summary(std::string_view metric) const;

  bool operator==(const EvaluationRun&) const = default;
};

/// Repeated stratified k-fold evaluation with chunk-level majority voting.
/// Repetitions may run on several threads; results do not depend on it.
EvaluationRun run_protocol(const FeatureSource& source, std::span<const int> document_labels,
                           const ml::ModelSpec& model, const ProtocolConfig& config,
                           std::map<std::string, std::string> description = {});

/// JSON lines: one record per (repetition, fold), then a summary record.
std::string run_to_jsonl(const EvaluationRun& run);
EvaluationRun run_from_jsonl(std::string_view text);

/// Welch t-test between the per-repetition scores of two runs.
stats::TestResult compare_runs(const EvaluationRun& a, const EvaluationRun& b, std::string_view metric);

}  // namespace pstyle::eval
