#include <algorithm>
#include <cmath>

#include "pstyle/error.hpp"
#include "pstyle/ml.hpp"

namespace pstyle::ml {

void Matrix::append_row(std::span<const double> values) {
  if (rows == 0 && cols == 0) cols = values.size();
  if (values.size() != cols) throw DataError("row length does not match matrix width");
  data.insert(data.end(), values.begin(), values.end());
  ++rows;
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  Matrix m;
  for (const auto& r : rows) m.append_row(r);
  return m;
}

double clamp_probability(double p) { return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor); }

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

void Encoder::fit(const FeatureMatrix& matrix, std::span<const std::size_t> fit_rows, std::span<const int> labels,
                  CategoricalEncoding encoding, bool standardize) {
  if (labels.size() != fit_rows.size()) throw DataError("encoder: one label per fit row required");
  if (fit_rows.empty()) throw DataError("encoder needs at least one fit row");
  encoding_ = encoding;
  source_cols_ = matrix.cols();
  states_.clear();
  names_.clear();
  sources_.clear();

  double prior = 0.0;
  for (int y : labels) prior += y;
  prior /= static_cast<double>(labels.size());

  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    const auto& column = matrix.column(c);
    ColumnState state;
    state.source = c;
    state.kind = column.kind;
    state.first_output = names_.size();

    if (column.kind == ColumnKind::numeric) {
      std::vector<double> observed;
      for (auto r : fit_rows) {
        double v = matrix.at(r, c);
        if (!is_missing(v)) observed.push_back(v);
      }
      if (!observed.empty()) {
        std::sort(observed.begin(), observed.end());
        auto mid = observed.size() / 2;
        state.numeric.median =
            observed.size() % 2 ? observed[mid] : 0.5 * (observed[mid - 1] + observed[mid]);
      }
      if (standardize) {
        double sum = 0.0;
        for (auto r : fit_rows) {
          double v = matrix.at(r, c);
          sum += is_missing(v) ? state.numeric.median : v;
        }
        double center = sum / static_cast<double>(fit_rows.size());
        double var = 0.0;
        for (auto r : fit_rows) {
          double v = matrix.at(r, c);
          double x = (is_missing(v) ? state.numeric.median : v) - center;
          var += x * x;
        }
        double sd = std::sqrt(var / static_cast<double>(fit_rows.size()));
        state.numeric.center = center;
        state.numeric.scale = sd > 0.0 ? sd : 1.0;
      }
      names_.push_back(column.name);
      sources_.push_back(c);
    } else {
      std::size_t levels = column.levels.size();
      std::vector<double> sums(levels, 0.0);
      std::vector<double> counts(levels, 0.0);
      for (std::size_t i = 0; i < fit_rows.size(); ++i) {
        double v = matrix.at(fit_rows[i], c);
        if (is_missing(v)) continue;
        auto level = static_cast<std::size_t>(v);
        sums[level] += labels[i];
        counts[level] += 1.0;
      }
      state.categorical.prior = prior;
      if (encoding == CategoricalEncoding::target_statistic) {
        state.categorical.level_values.resize(levels);
        for (std::size_t l = 0; l < levels; ++l) {
          state.categorical.level_values[l] = (sums[l] + prior) / (counts[l] + 1.0);
        }
        names_.push_back(column.name);
        sources_.push_back(c);
      } else {
        state.categorical.level_seen.resize(levels);
        for (std::size_t l = 0; l < levels; ++l) {
          state.categorical.level_seen[l] = counts[l] > 0.0;
          if (counts[l] > 0.0) {
            names_.push_back(column.name + "=" + column.levels[l]);
            sources_.push_back(c);
          }
        }
      }
    }
    states_.push_back(std::move(state));
  }
}

Matrix Encoder::transform(const FeatureMatrix& matrix, std::span<const std::size_t> rows) const {
  if (matrix.cols() != source_cols_) throw DataError("encoder applied to a matrix with different columns");
  Matrix out(rows.size(), names_.size());
  for (const auto& state : states_) {
    auto c = state.source;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      double v = matrix.at(rows[i], c);
      if (state.kind == ColumnKind::numeric) {
        double x = is_missing(v) ? state.numeric.median : v;
        out.at(i, state.first_output) = (x - state.numeric.center) / state.numeric.scale;
      } else if (encoding_ == CategoricalEncoding::target_statistic) {
        double value = state.categorical.prior;
        if (!is_missing(v)) value = state.categorical.level_values[static_cast<std::size_t>(v)];
        out.at(i, state.first_output) = value;
      } else if (!is_missing(v)) {
        auto level = static_cast<std::size_t>(v);
        if (!state.categorical.level_seen[level]) continue;
        std::size_t offset = 0;
        for (std::size_t l = 0; l < level; ++l) offset += state.categorical.level_seen[l] ? 1 : 0;
        out.at(i, state.first_output + offset) = 1.0;
      }
    }
  }
  return out;
}

Matrix Encoder::transform(const FeatureMatrix& matrix) const {
  std::vector<std::size_t> rows(matrix.rows());
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
  return transform(matrix, rows);
}

EncodedMatrix encode(const FeatureMatrix& matrix, std::span<const std::size_t> fit_rows, std::span<const int> labels,
                     CategoricalEncoding encoding) {
  EncodedMatrix out;
  out.encoder.fit(matrix, fit_rows, labels, encoding);
  out.values = out.encoder.transform(matrix, fit_rows);
  return out;
}

}  // namespace pstyle::ml
