#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "pstyle/error.hpp"
#include "pstyle/ml.hpp"
#include "pstyle/util.hpp"
#include "rng.hpp"

namespace pstyle::ml {

namespace {

void check_training_data(const Matrix& x, std::span<const int> y, const char* who) {
  if (x.rows != y.size()) throw DataError(std::string(who) + ": one label per row required");
  if (x.rows == 0) throw DataError(std::string(who) + ": no training rows");
  for (double v : x.data) {
    if (!std::isfinite(v)) throw DataError(std::string(who) + ": input contains a non-finite value");
  }
  for (int label : y) {
    if (label != 0 && label != 1) throw DataError(std::string(who) + ": labels must be 0 or 1");
  }
}

double split_threshold(double lo, double hi) {
  double mid = lo + (hi - lo) / 2.0;
  return mid >= hi ? lo : mid;
}

double log_loss(int y, double margin) {
  double p = clamp_probability(sigmoid(margin));
  return y ? -std::log(p) : -std::log(1.0 - p);
}

// Per column: the most frequent value and the rows holding any other value.
// Standardized sparse columns (TF-IDF) keep only a handful of rows each.
struct ColumnIndex {
  std::vector<double> common;
  std::vector<std::vector<std::size_t>> other_rows;
};

ColumnIndex build_column_index(const Matrix& x) {
  ColumnIndex index;
  index.common.resize(x.cols);
  index.other_rows.resize(x.cols);
  std::vector<double> values(x.rows);
  for (std::size_t c = 0; c < x.cols; ++c) {
    for (std::size_t r = 0; r < x.rows; ++r) values[r] = x.at(r, c);
    std::sort(values.begin(), values.end());
    double best = values.empty() ? 0.0 : values.front();
    std::size_t best_run = 0;
    for (std::size_t i = 0; i < values.size();) {
      std::size_t j = i;
      while (j < values.size() && values[j] == values[i]) ++j;
      if (j - i > best_run) {
        best_run = j - i;
        best = values[i];
      }
      i = j;
    }
    index.common[c] = best;
    for (std::size_t r = 0; r < x.rows; ++r) {
      if (x.at(r, c) != best) index.other_rows[c].push_back(r);
    }
  }
  return index;
}

// A run of rows sharing one feature value, with summed statistics.
struct Item {
  double value;
  std::size_t row;
  double count;
  double a;
  double b;
};

// Node rows of one feature in ascending value order; rows at the column's
// common value are merged into one item carrying the remainder of the totals.
// weight(row) returns the row multiplicity in the node (0 when absent).
template <typename Stats>
void gather_items(const Matrix& x, const ColumnIndex& index, std::size_t feature, std::span<const std::size_t> rows,
                  std::span<const std::uint32_t> weight, double total_count, double total_a, double total_b,
                  Stats stats, std::vector<Item>& items) {
  items.clear();
  double common = index.common[feature];
  const auto& others = index.other_rows[feature];
  double count = 0.0, a = 0.0, b = 0.0;
  auto add = [&](std::size_t r, double w) {
    auto [sa, sb] = stats(r);
    items.push_back({x.at(r, feature), r, w, w * sa, w * sb});
    count += w;
    a += w * sa;
    b += w * sb;
  };
  if (rows.size() <= others.size()) {
    for (auto r : rows) {
      if (x.at(r, feature) != common) add(r, 1.0);
    }
  } else {
    for (auto r : others) {
      if (weight[r] > 0) add(r, static_cast<double>(weight[r]));
    }
  }
  std::sort(items.begin(), items.end(),
            [](const Item& p, const Item& q) { return p.value < q.value || (p.value == q.value && p.row < q.row); });
  double rest = total_count - count;
  if (rest > 0.5) {
    Item block{common, 0, rest, total_a - a, total_b - b};
    auto pos = std::lower_bound(items.begin(), items.end(), common,
                                [](const Item& item, double v) { return item.value < v; });
    items.insert(pos, block);
  }
}

struct Split {
  bool found = false;
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;
};

void partition_rows(const Matrix& x, std::span<const std::size_t> rows, const Split& split,
                    std::vector<std::size_t>& left, std::vector<std::size_t>& right) {
  left.clear();
  right.clear();
  for (auto r : rows) {
    (x.at(r, static_cast<std::size_t>(split.feature)) <= split.threshold ? left : right).push_back(r);
  }
}

// ------------------------------------------------------------- classification

class ForestTreeBuilder {
 public:
  ForestTreeBuilder(const Matrix& x, const ColumnIndex& index, std::span<const int> y, std::size_t max_depth,
                    std::size_t features_per_split, Rng& rng)
      : x_(x), y_(y), max_depth_(max_depth), mtry_(features_per_split), rng_(rng), order_(x.cols),
        index_(index), weight_(x.rows, 0) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
  }

  DecisionTree build(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  int grow(std::vector<std::size_t> rows, std::size_t depth) {
    int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double positives = 0.0;
    for (auto r : rows) positives += y_[r];
    double n = static_cast<double>(rows.size());
    tree_.nodes[index].value = positives / n;

    bool pure = positives == 0.0 || positives == n;
    if (pure || rows.size() < 2 || (max_depth_ > 0 && depth >= max_depth_)) return index;

    Split best = find_split(rows, positives);
    if (!best.found) return index;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    partition_rows(x_, rows, best, left, right);
    rows.clear();
    rows.shrink_to_fit();
    tree_.nodes[index].feature = best.feature;
    tree_.nodes[index].threshold = best.threshold;
    int l = grow(std::move(left), depth + 1);
    int r = grow(std::move(right), depth + 1);
    tree_.nodes[index].left = l;
    tree_.nodes[index].right = r;
    return index;
  }

  // Maximizes the Gini decrease over a random feature subset; if no sampled
  // feature can split the node the remaining features are tried in order.
  Split find_split(std::span<const std::size_t> rows, double positives) {
    Split best;
    double n = static_cast<double>(rows.size());
    for (auto r : rows) ++weight_[r];
    auto label = [&](std::size_t r) { return std::pair<double, double>{static_cast<double>(y_[r]), 0.0}; };
    // Features are drawn lazily, one Fisher-Yates step per visit.
    for (std::size_t visited = 0; visited < order_.size(); ++visited) {
      if (visited >= mtry_ && best.found) break;
      std::swap(order_[visited], order_[visited + rng_.below(order_.size() - visited)]);
      std::size_t f = order_[visited];
      gather_items(x_, index_, f, rows, weight_, n, positives, 0.0, label, items_);
      if (items_.front().value == items_.back().value) continue;
      double left_pos = 0.0;
      double nl = 0.0;
      for (std::size_t i = 0; i + 1 < items_.size(); ++i) {
        left_pos += items_[i].a;
        nl += items_[i].count;
        if (items_[i].value == items_[i + 1].value) continue;
        double nr = n - nl;
        double right_pos = positives - left_pos;
        // n * (1 - weighted Gini): larger is better.
        double score = (left_pos * left_pos + (nl - left_pos) * (nl - left_pos)) / nl +
                       (right_pos * right_pos + (nr - right_pos) * (nr - right_pos)) / nr;
        if (!best.found || score > best.score) {
          best = {true, static_cast<int>(f), split_threshold(items_[i].value, items_[i + 1].value), score};
        }
      }
    }
    for (auto r : rows) weight_[r] = 0;
    return best;
  }

  const Matrix& x_;
  std::span<const int> y_;
  std::size_t max_depth_;
  std::size_t mtry_;
  Rng& rng_;
  std::vector<std::size_t> order_;
  const ColumnIndex& index_;
  std::vector<std::uint32_t> weight_;
  std::vector<Item> items_;
  DecisionTree tree_;
};

// ----------------------------------------------------------------- boosting

class BoostTreeBuilder {
 public:
  BoostTreeBuilder(const Matrix& x, const ColumnIndex& index, std::span<const double> grad,
                   std::span<const double> hess, std::size_t max_depth, double l2)
      : x_(x), index_(index), grad_(grad), hess_(hess), max_depth_(max_depth), l2_(l2), weight_(x.rows, 0) {}

  DecisionTree build(std::vector<std::size_t> rows) {
    tree_.nodes.clear();
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  double gain_term(double g, double h) const { return g * g / (h + l2_); }

  int grow(std::vector<std::size_t> rows, std::size_t depth) {
    int index = static_cast<int>(tree_.nodes.size());
    tree_.nodes.emplace_back();
    double g = 0.0;
    double h = 0.0;
    for (auto r : rows) {
      g += grad_[r];
      h += hess_[r];
    }
    if (depth >= max_depth_ || rows.size() < 2) return index;

    double parent = gain_term(g, h);
    Split best;
    double n = static_cast<double>(rows.size());
    for (auto r : rows) ++weight_[r];
    auto stats = [&](std::size_t r) { return std::pair<double, double>{grad_[r], hess_[r]}; };
    for (std::size_t f = 0; f < x_.cols; ++f) {
      gather_items(x_, index_, f, rows, weight_, n, g, h, stats, items_);
      if (items_.front().value == items_.back().value) continue;
      double gl = 0.0;
      double hl = 0.0;
      for (std::size_t i = 0; i + 1 < items_.size(); ++i) {
        gl += items_[i].a;
        hl += items_[i].b;
        if (items_[i].value == items_[i + 1].value) continue;
        double score = gain_term(gl, hl) + gain_term(g - gl, h - hl) - parent;
        if (score > 1e-12 && (!best.found || score > best.score)) {
          best = {true, static_cast<int>(f), split_threshold(items_[i].value, items_[i + 1].value), score};
        }
      }
    }
    for (auto r : rows) weight_[r] = 0;
    if (!best.found) return index;

    std::vector<std::size_t> left;
    std::vector<std::size_t> right;
    partition_rows(x_, rows, best, left, right);
    tree_.nodes[index].feature = best.feature;
    tree_.nodes[index].threshold = best.threshold;
    int l = grow(std::move(left), depth + 1);
    int r = grow(std::move(right), depth + 1);
    tree_.nodes[index].left = l;
    tree_.nodes[index].right = r;
    return index;
  }

  const Matrix& x_;
  const ColumnIndex& index_;
  std::span<const double> grad_;
  std::span<const double> hess_;
  std::size_t max_depth_;
  double l2_;
  std::vector<std::uint32_t> weight_;
  std::vector<Item> items_;
  DecisionTree tree_;
};

int leaf_of(const DecisionTree& tree, std::span<const double> row) {
  int node = 0;
  while (tree.nodes[node].feature >= 0) {
    const auto& n = tree.nodes[node];
    node = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return node;
}

double mean_log_loss(std::span<const int> y, std::span<const double> margins) {
  double total = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) total += log_loss(y[i], margins[i]);
  return total / static_cast<double>(y.size());
}

}  // namespace

double DecisionTree::predict(std::span<const double> row) const { return nodes[leaf_of(*this, row)].value; }

std::size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
  std::size_t deepest = 0;
  while (!stack.empty()) {
    auto [node, d] = stack.back();
    stack.pop_back();
    deepest = std::max(deepest, d);
    if (nodes[node].feature >= 0) {
      stack.emplace_back(nodes[node].left, d + 1);
      stack.emplace_back(nodes[node].right, d + 1);
    }
  }
  return deepest;
}

ForestModel fit_forest(const Matrix& x, std::span<const int> y, const ForestConfig& config, std::uint64_t seed) {
  check_training_data(x, y, "random forest");
  if (config.trees == 0) throw ConfigError("random forest needs at least one tree");
  ForestModel model;
  model.config = config;
  model.seed = seed;
  std::size_t mtry = config.features_per_split;
  if (mtry == 0) mtry = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(x.cols))));
  mtry = std::clamp<std::size_t>(mtry, 1, std::max<std::size_t>(x.cols, 1));

  model.tree_seeds.reserve(config.trees);
  model.trees.reserve(config.trees);
  ColumnIndex columns = build_column_index(x);
  std::vector<std::size_t> sample(x.rows);
  for (std::size_t t = 0; t < config.trees; ++t) {
    std::uint64_t tree_seed = derive_seed(seed, t);
    Rng rng(tree_seed);
    for (auto& s : sample) s = rng.below(x.rows);
    ForestTreeBuilder builder(x, columns, y, config.max_depth, mtry, rng);
    model.tree_seeds.push_back(tree_seed);
    model.trees.push_back(builder.build(sample));
  }
  return model;
}

std::vector<double> ForestModel::predict_proba(const Matrix& x) const {
  std::vector<double> out(x.rows, 0.0);
  if (trees.empty()) return out;
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto row = x.row(i);
    double sum = 0.0;
    for (const auto& tree : trees) sum += tree.predict(row);
    out[i] = clamp_probability(sum / static_cast<double>(trees.size()));
  }
  return out;
}

BoostedModel fit_boosted(const Matrix& x, std::span<const int> y, const BoostedConfig& config, std::uint64_t seed,
                         const Matrix* validation_x, std::span<const int> validation_y) {
  check_training_data(x, y, "gradient boosting");
  if (config.learning_rate <= 0.0) throw ConfigError("boosting learning rate must be positive");
  if (config.l2_leaf < 0.0) throw ConfigError("boosting leaf regularization must be non-negative");
  if (config.subsample <= 0.0 || config.subsample > 1.0) throw ConfigError("boosting subsample must be in (0, 1]");
  bool early_stop = config.early_stopping_rounds > 0 && validation_x != nullptr;
  if (early_stop && validation_x->rows != validation_y.size()) {
    throw DataError("gradient boosting: one validation label per row required");
  }

  BoostedModel model;
  model.config = config;
  model.seed = seed;
  double prior = 0.0;
  for (int label : y) prior += label;
  prior = clamp_probability(prior / static_cast<double>(y.size()));
  model.base_score = std::log(prior / (1.0 - prior));

  std::size_t n = x.rows;
  std::vector<double> margins(n, model.base_score);
  std::vector<double> grad(n);
  std::vector<double> hess(n);
  model.training_loss.push_back(mean_log_loss(y, margins));

  std::vector<double> val_margins;
  double best_val = INFINITY;
  std::size_t best_rounds = 0;
  if (early_stop) {
    val_margins.assign(validation_x->rows, model.base_score);
    best_val = mean_log_loss(validation_y, val_margins);
  }

  ColumnIndex columns = build_column_index(x);
  std::vector<std::size_t> rows;
  for (std::size_t round = 0; round < config.rounds; ++round) {
    for (std::size_t i = 0; i < n; ++i) {
      double p = sigmoid(margins[i]);
      grad[i] = y[i] - p;
      hess[i] = p * (1.0 - p);
    }
    rows.resize(n);
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    if (config.subsample < 1.0) {
      Rng rng(derive_seed(seed, round));
      rng.shuffle(rows);
      auto keep = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(config.subsample * n)));
      rows.resize(keep);
      std::sort(rows.begin(), rows.end());
    }

    BoostTreeBuilder builder(x, columns, grad, hess, config.depth, config.l2_leaf);
    DecisionTree tree = builder.build(rows);

    // Newton leaf values from the sampled rows, damped until no leaf's loss
    // over all training rows routed to it increases.
    std::vector<double> g(tree.nodes.size(), 0.0);
    std::vector<double> h(tree.nodes.size(), 0.0);
    for (auto r : rows) {
      int leaf = leaf_of(tree, x.row(r));
      g[leaf] += grad[r];
      h[leaf] += hess[r];
    }
    std::vector<std::vector<std::size_t>> members(tree.nodes.size());
    for (std::size_t i = 0; i < n; ++i) members[leaf_of(tree, x.row(i))].push_back(i);
    for (std::size_t node = 0; node < tree.nodes.size(); ++node) {
      if (tree.nodes[node].feature >= 0) continue;
      double value = config.learning_rate * g[node] / (h[node] + config.l2_leaf);
      double before = 0.0;
      for (auto i : members[node]) before += log_loss(y[i], margins[i]);
      int halvings = 0;
      for (; halvings < 40 && value != 0.0; ++halvings) {
        double after = 0.0;
        for (auto i : members[node]) after += log_loss(y[i], margins[i] + value);
        if (after <= before) break;
        value *= 0.5;
      }
      if (halvings == 40) value = 0.0;
      tree.nodes[node].value = value;
    }
    for (std::size_t i = 0; i < n; ++i) margins[i] += tree.predict(x.row(i));
    model.trees.push_back(std::move(tree));
    model.training_loss.push_back(mean_log_loss(y, margins));

    if (early_stop) {
      for (std::size_t i = 0; i < validation_x->rows; ++i) {
        val_margins[i] += model.trees.back().predict(validation_x->row(i));
      }
      double loss = mean_log_loss(validation_y, val_margins);
      if (loss < best_val) {
        best_val = loss;
        best_rounds = model.trees.size();
      } else if (model.trees.size() - best_rounds >= config.early_stopping_rounds) {
        return model.truncated(best_rounds);
      }
    }
  }
  return model;
}

std::vector<double> BoostedModel::predict_proba(const Matrix& x) const { return predict_proba(x, trees.size()); }

std::vector<double> BoostedModel::predict_proba(const Matrix& x, std::size_t rounds) const {
  rounds = std::min(rounds, trees.size());
  std::vector<double> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto row = x.row(i);
    double margin = base_score;
    for (std::size_t t = 0; t < rounds; ++t) margin += trees[t].predict(row);
    out[i] = clamp_probability(sigmoid(margin));
  }
  return out;
}

BoostedModel BoostedModel::truncated(std::size_t rounds) const {
  BoostedModel out = *this;
  rounds = std::min(rounds, trees.size());
  out.trees.resize(rounds);
  out.training_loss.resize(std::min(training_loss.size(), rounds + 1));
  out.config.rounds = rounds;
  return out;
}

std::vector<double> MajorityModel::predict_proba(const Matrix& x) const {
  return std::vector<double>(x.rows, clamp_probability(p_positive));
}

}  // namespace pstyle::ml
