#include <algorithm>
#include <array>
#include <cmath>

#include "json.hpp"
#include "pstyle/error.hpp"
#include "pstyle/ml.hpp"
#include "rng.hpp"

namespace pstyle::ml {

using nlohmann::json;

// ------------------------------------------------------------------ SMOTE

SmoteResult smote(const Matrix& minority, std::size_t count, const SmoteConfig& config) {
  std::size_t n = minority.rows;
  if (n < 2) throw DataError("SMOTE needs at least 2 minority rows, got " + std::to_string(n));
  if (config.k_neighbors == 0) throw ConfigError("SMOTE k_neighbors must be at least 1");
  SmoteResult result;
  result.k_used = std::min(config.k_neighbors, n - 1);
  result.synthetic = Matrix(count, minority.cols);
  if (count == 0) return result;

  std::vector<std::vector<std::size_t>> neighbours(n);
  std::vector<std::pair<double, std::size_t>> dist;
  for (std::size_t i = 0; i < n; ++i) {
    dist.clear();
    auto a = minority.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      auto b = minority.row(j);
      double d = 0.0;
      for (std::size_t c = 0; c < minority.cols; ++c) d += (a[c] - b[c]) * (a[c] - b[c]);
      dist.emplace_back(d, j);
    }
    std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(result.k_used), dist.end());
    for (std::size_t k = 0; k < result.k_used; ++k) neighbours[i].push_back(dist[k].second);
  }

  Rng rng(config.seed);
  for (std::size_t s = 0; s < count; ++s) {
    std::size_t base = rng.below(n);
    std::size_t other = neighbours[base][rng.below(result.k_used)];
    double lambda = rng.uniform();
    auto a = minority.row(base);
    auto b = minority.row(other);
    auto out = result.synthetic.row(s);
    for (std::size_t c = 0; c < minority.cols; ++c) {
      double v = a[c] + lambda * (b[c] - a[c]);
      out[c] = std::clamp(v, std::min(a[c], b[c]), std::max(a[c], b[c]));
    }
    result.parents.emplace_back(base, other);
  }
  return result;
}

BalancedSet balance_with_smote(const Matrix& x, std::span<const int> y, const SmoteConfig& config) {
  if (x.rows != y.size()) throw DataError("SMOTE: one label per row required");
  BalancedSet out{x, Labels(y.begin(), y.end()), 0};
  std::size_t positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
  std::size_t negatives = y.size() - positives;
  if (positives == negatives) return out;
  int minority_label = positives < negatives ? 1 : 0;
  std::size_t deficit = positives < negatives ? negatives - positives : positives - negatives;

  Matrix minority(0, x.cols);
  for (std::size_t i = 0; i < x.rows; ++i) {
    if (y[i] == minority_label) minority.append_row(x.row(i));
  }
  auto generated = smote(minority, deficit, config);
  for (std::size_t s = 0; s < generated.synthetic.rows; ++s) {
    out.x.append_row(generated.synthetic.row(s));
    out.y.push_back(minority_label);
  }
  out.synthetic = deficit;
  return out;
}

// ------------------------------------------------------------ model wrapper

namespace {

constexpr int kFormatVersion = 1;

constexpr std::array<std::pair<ModelKind, std::string_view>, 4> kLongNames{{
    {ModelKind::logistic, "logistic"},
    {ModelKind::forest, "forest"},
    {ModelKind::boosted, "boosted"},
    {ModelKind::majority, "majority"},
}};

constexpr std::array<std::pair<ModelKind, std::string_view>, 4> kShortNames{{
    {ModelKind::logistic, "lr"},
    {ModelKind::forest, "rf"},
    {ModelKind::boosted, "gbt"},
    {ModelKind::majority, "majority"},
}};

json tree_to_json(const DecisionTree& tree) {
  json feature = json::array();
  json threshold = json::array();
  json left = json::array();
  json right = json::array();
  json value = json::array();
  for (const auto& node : tree.nodes) {
    feature.push_back(node.feature);
    threshold.push_back(node.threshold);
    left.push_back(node.left);
    right.push_back(node.right);
    value.push_back(node.value);
  }
  return {{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"value", value}};
}

DecisionTree tree_from_json(const json& j) {
  DecisionTree tree;
  const auto& feature = j.at("feature");
  std::size_t n = feature.size();
  const auto& threshold = j.at("threshold");
  const auto& left = j.at("left");
  const auto& right = j.at("right");
  const auto& value = j.at("value");
  if (threshold.size() != n || left.size() != n || right.size() != n || value.size() != n) {
    throw SchemaError("model file: tree arrays differ in length");
  }
  tree.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& node = tree.nodes[i];
    node.feature = feature[i].get<int>();
    node.threshold = threshold[i].get<double>();
    node.left = left[i].get<int>();
    node.right = right[i].get<int>();
    node.value = value[i].get<double>();
    bool bad_child = node.feature >= 0 && (node.left <= static_cast<int>(i) || node.right <= static_cast<int>(i) ||
                                           node.left >= static_cast<int>(n) || node.right >= static_cast<int>(n));
    if (bad_child) throw SchemaError("model file: tree node has an invalid child index");
  }
  if (n == 0) throw SchemaError("model file: empty tree");
  return tree;
}

json config_json(const LogisticConfig& c) {
  return {{"l2", c.l2}, {"tol", c.tol}, {"max_iter", c.max_iter}};
}
json config_json(const ForestConfig& c) {
  return {{"trees", c.trees}, {"max_depth", c.max_depth}, {"features_per_split", c.features_per_split}};
}
json config_json(const BoostedConfig& c) {
  return {{"rounds", c.rounds},   {"depth", c.depth},         {"learning_rate", c.learning_rate},
          {"l2_leaf", c.l2_leaf}, {"subsample", c.subsample}, {"early_stopping_rounds", c.early_stopping_rounds}};
}

std::vector<double> doubles(const json& j) { return j.get<std::vector<double>>(); }

}  // namespace

std::string_view to_string(ModelKind kind) {
  for (const auto& [k, name] : kLongNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

std::string_view short_name(ModelKind kind) {
  for (const auto& [k, name] : kShortNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ModelKind parse_model_kind(std::string_view name) {
  for (const auto& [k, n] : kShortNames) {
    if (n == name) return k;
  }
  for (const auto& [k, n] : kLongNames) {
    if (n == name) return k;
  }
  throw ConfigError("unknown model '" + std::string(name) + "'; valid values: lr, rf, gbt, majority");
}

ModelKind TrainedModel::kind() const {
  switch (model_.index()) {
    case 0:
      return ModelKind::logistic;
    case 1:
      return ModelKind::forest;
    case 2:
      return ModelKind::boosted;
    default:
      return ModelKind::majority;
  }
}

std::vector<double> TrainedModel::predict_proba(const Matrix& x) const {
  auto out = std::visit([&](const auto& m) { return m.predict_proba(x); }, model_);
  for (auto& p : out) p = clamp_probability(p);
  return out;
}

std::string TrainedModel::to_json() const {
  json envelope;
  envelope["format_version"] = kFormatVersion;
  envelope["model_type"] = std::string(to_string(kind()));
  envelope["seed"] = seed_;
  json payload;
  json config = json::object();
  if (const auto* m = std::get_if<LogisticModel>(&model_)) {
    config = config_json(m->config);
    payload = {{"weights", m->weights},       {"bias", m->bias},
               {"final_loss", m->final_loss}, {"iterations", m->iterations},
               {"converged", m->converged}};
  } else if (const auto* m = std::get_if<ForestModel>(&model_)) {
    config = config_json(m->config);
    json trees = json::array();
    for (const auto& t : m->trees) trees.push_back(tree_to_json(t));
    payload = {{"tree_seeds", m->tree_seeds}, {"trees", trees}};
  } else if (const auto* m = std::get_if<BoostedModel>(&model_)) {
    config = config_json(m->config);
    json trees = json::array();
    for (const auto& t : m->trees) trees.push_back(tree_to_json(t));
    payload = {{"base_score", m->base_score}, {"training_loss", m->training_loss}, {"trees", trees}};
  } else {
    payload = {{"p_positive", std::get<MajorityModel>(model_).p_positive}};
  }
  envelope["config"] = config;
  envelope["payload"] = payload;
  return envelope.dump();
}

TrainedModel TrainedModel::from_json(std::string_view text) {
  json envelope;
  try {
    envelope = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model file is not valid JSON: ") + e.what(), 1, e.byte);
  }
  try {
    int version = envelope.at("format_version").get<int>();
    if (version != kFormatVersion) {
      throw SchemaError("unsupported model format_version " + std::to_string(version));
    }
    ModelKind kind = parse_model_kind(envelope.at("model_type").get<std::string>());
    auto seed = envelope.at("seed").get<std::uint64_t>();
    const json& config = envelope.at("config");
    const json& payload = envelope.at("payload");
    switch (kind) {
      case ModelKind::logistic: {
        LogisticModel m;
        m.config.l2 = config.at("l2").get<double>();
        m.config.tol = config.at("tol").get<double>();
        m.config.max_iter = config.at("max_iter").get<std::size_t>();
        m.weights = doubles(payload.at("weights"));
        m.bias = payload.at("bias").get<double>();
        m.final_loss = payload.at("final_loss").get<double>();
        m.iterations = payload.at("iterations").get<std::size_t>();
        m.converged = payload.at("converged").get<bool>();
        return {m, seed};
      }
      case ModelKind::forest: {
        ForestModel m;
        m.seed = seed;
        m.config.trees = config.at("trees").get<std::size_t>();
        m.config.max_depth = config.at("max_depth").get<std::size_t>();
        m.config.features_per_split = config.at("features_per_split").get<std::size_t>();
        m.tree_seeds = payload.at("tree_seeds").get<std::vector<std::uint64_t>>();
        for (const auto& t : payload.at("trees")) m.trees.push_back(tree_from_json(t));
        return {m, seed};
      }
      case ModelKind::boosted: {
        BoostedModel m;
        m.seed = seed;
        m.config.rounds = config.at("rounds").get<std::size_t>();
        m.config.depth = config.at("depth").get<std::size_t>();
        m.config.learning_rate = config.at("learning_rate").get<double>();
        m.config.l2_leaf = config.at("l2_leaf").get<double>();
        m.config.subsample = config.at("subsample").get<double>();
        m.config.early_stopping_rounds = config.at("early_stopping_rounds").get<std::size_t>();
        m.base_score = payload.at("base_score").get<double>();
        m.training_loss = doubles(payload.at("training_loss"));
        for (const auto& t : payload.at("trees")) m.trees.push_back(tree_from_json(t));
        return {m, seed};
      }
      case ModelKind::majority:
        return {MajorityModel{payload.at("p_positive").get<double>()}, seed};
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model file: ") + e.what());
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("model file: ") + e.what());
  }
  throw SchemaError("model file: unknown model type");
}

TrainedModel fit_model(const ModelSpec& spec, const Matrix& x, std::span<const int> y, std::uint64_t seed) {
  switch (spec.kind) {
    case ModelKind::logistic:
      return {fit_logistic(x, y, spec.logistic), seed};
    case ModelKind::forest:
      return {fit_forest(x, y, spec.forest, seed), seed};
    case ModelKind::boosted:
      return {fit_boosted(x, y, spec.boosted, seed), seed};
    case ModelKind::majority: {
      if (y.empty()) throw DataError("majority model: no training rows");
      double positives = static_cast<double>(std::count(y.begin(), y.end(), 1));
      return {MajorityModel{positives / static_cast<double>(y.size())}, seed};
    }
  }
  throw ConfigError("unknown model kind");
}

}  // namespace pstyle::ml
