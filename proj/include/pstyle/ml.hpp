#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pstyle/features.hpp"

namespace pstyle::ml {

// Dense row-major matrix of encoded numeric features.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<double> row(std::size_t r) { return {data.data() + r * cols, cols}; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }

  void append_row(std::span<const double> values);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);

  bool operator==(const Matrix&) const = default;
};

// Binary labels: 1 = anaclitic (positive), 0 = introjective.
using Labels = std::vector<int>;

inline constexpr double kProbabilityFloor = 1e-9;
double clamp_probability(double p);
double sigmoid(double z);

// --------------------------------------------------------------- encoding

enum class CategoricalEncoding { one_hot, target_statistic };

// Training-fitted imputation/standardization and categorical encoding.
class Encoder {
 public:
  /// Fits on fit_rows only; labels are per fit row (needed for target statistics).
  void fit(const FeatureMatrix& matrix, std::span<const std::size_t> fit_rows, std::span<const int> labels,
           CategoricalEncoding encoding, bool standardize = true);

  Matrix transform(const FeatureMatrix& matrix, std::span<const std::size_t> rows) const;
  Matrix transform(const FeatureMatrix& matrix) const;

  std::size_t output_cols() const { return names_.size(); }
  const std::vector<std::string>& output_names() const { return names_; }
  // Output column -> source FeatureMatrix column.
  const std::vector<std::size_t>& source_columns() const { return sources_; }

 private:
  struct NumericState {
    double median = 0.0;
    double center = 0.0;
    double scale = 1.0;
  };
  struct CategoricalState {
    std::vector<double> level_values;  // target statistic per level
    std::vector<bool> level_seen;      // one-hot: level observed in training
    double prior = 0.5;
  };
  struct ColumnState {
    std::size_t source = 0;
    ColumnKind kind = ColumnKind::numeric;
    NumericState numeric;
    CategoricalState categorical;
    std::size_t first_output = 0;
  };

  CategoricalEncoding encoding_ = CategoricalEncoding::one_hot;
  std::size_t source_cols_ = 0;
  std::vector<ColumnState> states_;
  std::vector<std::string> names_;
  std::vector<std::size_t> sources_;
};

struct EncodedMatrix {
  Encoder encoder;
  Matrix values;  // the fit rows, encoded
};

/// Fits an encoder on fit_rows and returns it with those rows encoded.
EncodedMatrix encode(const FeatureMatrix& matrix, std::span<const std::size_t> fit_rows,
                     std::span<const int> labels, CategoricalEncoding encoding);

// --------------------------------------------------------------- logistic

struct LogisticConfig {
  double l2 = 1.0;
  double tol = 1e-6;
  std::size_t max_iter = 2000;
};

struct LogisticModel {
  std::vector<double> weights;
  double bias = 0.0;
  LogisticConfig config;
  double final_loss = 0.0;
  std::size_t iterations = 0;
  bool converged = false;

  std::vector<double> predict_proba(const Matrix& x) const;
};

/// Sum of log-losses plus (l2 / 2) * |w|^2; the bias is not penalized.
double logistic_objective(const Matrix& x, std::span<const int> y, double l2, std::span<const double> weights,
                          double bias);

void logistic_gradient(const Matrix& x, std::span<const int> y, double l2, std::span<const double> weights,
                       double bias, std::span<double> grad_weights, double& grad_bias);

/// Gradient descent with Barzilai-Borwein trial steps and Armijo backtracking;
/// stops when the gradient max-norm drops below tol or after max_iter steps.
LogisticModel fit_logistic(const Matrix& x, std::span<const int> y, const LogisticConfig& config = {});

// ----------------------------------------------------------------- forest

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf: class-1 probability (forest) or score (boosting)
};

struct DecisionTree {
  std::vector<TreeNode> nodes;

  double predict(std::span<const double> row) const;
  std::size_t depth() const;
};

struct ForestConfig {
  std::size_t trees = 500;
  std::size_t max_depth = 0;           // 0 = unlimited
  std::size_t features_per_split = 0;  // 0 = floor(sqrt(d))
};

struct ForestModel {
  ForestConfig config;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> tree_seeds;
  std::vector<DecisionTree> trees;

  std::vector<double> predict_proba(const Matrix& x) const;
};

/// Bootstrap-resampled Gini trees over random feature subsets.
ForestModel fit_forest(const Matrix& x, std::span<const int> y, const ForestConfig& config, std::uint64_t seed);

// ---------------------------------------------------------------- boosting

struct BoostedConfig {
  std::size_t rounds = 200;
  std::size_t depth = 4;
  double learning_rate = 0.1;
  double l2_leaf = 1.0;
  double subsample = 1.0;  // row fraction per round; < 1 draws from the seed
  std::size_t early_stopping_rounds = 0;  // 0 disables; needs validation data
};

struct BoostedModel {
  BoostedConfig config;
  std::uint64_t seed = 0;
  double base_score = 0.0;  // log-odds of the training prior
  std::vector<DecisionTree> trees;
  // Training log-loss (mean) before any round, then after each round.
  std::vector<double> training_loss;

  std::vector<double> predict_proba(const Matrix& x) const;
  std::vector<double> predict_proba(const Matrix& x, std::size_t rounds) const;
  BoostedModel truncated(std::size_t rounds) const;
};

/// Stagewise logistic-loss boosting with depth-limited regression trees.
/// Leaf values are damped Newton steps, so the training loss never increases.
BoostedModel fit_boosted(const Matrix& x, std::span<const int> y, const BoostedConfig& config, std::uint64_t seed,
                         const Matrix* validation_x = nullptr, std::span<const int> validation_y = {});

// ---------------------------------------------------------------- baseline

// Predicts the training prior for every row.
struct MajorityModel {
  double p_positive = 0.5;

  std::vector<double> predict_proba(const Matrix& x) const;
};

// ------------------------------------------------------------------ SMOTE

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  std::uint64_t seed = 0;
};

struct SmoteResult {
  Matrix synthetic;
  // Parent (base, neighbour) minority row indices of each synthetic row.
  std::vector<std::pair<std::size_t, std::size_t>> parents;
  std::size_t k_used = 0;
};

/// count synthetic rows, each interpolated between a random minority row and
/// one of its k nearest minority neighbours (Euclidean). Needs >= 2 rows.
SmoteResult smote(const Matrix& minority, std::size_t count, const SmoteConfig& config);

struct BalancedSet {
  Matrix x;
  Labels y;
  std::size_t synthetic = 0;
};

/// Appends synthetic minority rows until both classes have equal counts.
BalancedSet balance_with_smote(const Matrix& x, std::span<const int> y, const SmoteConfig& config);

// ------------------------------------------------------------ model wrapper

enum class ModelKind { logistic, forest, boosted, majority };

std::string_view to_string(ModelKind kind);
/// Accepts lr | rf | gbt | majority and the long names.
ModelKind parse_model_kind(std::string_view name);
std::string_view short_name(ModelKind kind);

struct ModelSpec {
  ModelKind kind = ModelKind::logistic;
  LogisticConfig logistic;
  ForestConfig forest;
  BoostedConfig boosted;

  CategoricalEncoding categorical_encoding() const {
    return kind == ModelKind::boosted ? CategoricalEncoding::target_statistic : CategoricalEncoding::one_hot;
  }
};

class TrainedModel {
 public:
  using Variant = std::variant<LogisticModel, ForestModel, BoostedModel, MajorityModel>;

  TrainedModel() = default;
  TrainedModel(Variant model, std::uint64_t seed) : model_(std::move(model)), seed_(seed) {}

  ModelKind kind() const;
  std::uint64_t seed() const { return seed_; }
  const Variant& model() const { return model_; }

  /// Per-row probability of the anaclitic class, clamped to [1e-9, 1 - 1e-9].
  std::vector<double> predict_proba(const Matrix& x) const;

  /// Envelope {format_version, model_type, config, seed, payload}.
  std::string to_json() const;
  static TrainedModel from_json(std::string_view text);

 private:
  Variant model_ = MajorityModel{};
  std::uint64_t seed_ = 0;
};

TrainedModel fit_model(const ModelSpec& spec, const Matrix& x, std::span<const int> y, std::uint64_t seed);

}  // namespace pstyle::ml
