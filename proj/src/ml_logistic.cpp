#include <algorithm>
#include <cmath>

#include "pstyle/error.hpp"
#include "pstyle/ml.hpp"

namespace pstyle::ml {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

void check_inputs(const Matrix& x, std::span<const int> y) {
  if (x.rows != y.size()) throw DataError("logistic regression: one label per row required");
  for (double v : x.data) {
    if (!std::isfinite(v)) throw DataError("logistic regression input contains a non-finite value");
  }
  for (int label : y) {
    if (label != 0 && label != 1) throw DataError("logistic regression labels must be 0 or 1");
  }
}

double margin(std::span<const double> row, std::span<const double> weights, double bias) {
  double z = bias;
  for (std::size_t j = 0; j < row.size(); ++j) z += row[j] * weights[j];
  return z;
}

double max_abs(std::span<const double> v, double extra) {
  double m = std::abs(extra);
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

double logistic_objective(const Matrix& x, std::span<const int> y, double l2, std::span<const double> weights,
                          double bias) {
  double loss = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    double z = margin(x.row(i), weights, bias);
    // -[y log s(z) + (1-y) log(1 - s(z))] = softplus(z) - y z
    loss += softplus(z) - (y[i] ? z : 0.0);
  }
  double norm2 = 0.0;
  for (double w : weights) norm2 += w * w;
  return loss + 0.5 * l2 * norm2;
}

void logistic_gradient(const Matrix& x, std::span<const int> y, double l2, std::span<const double> weights,
                       double bias, std::span<double> grad_weights, double& grad_bias) {
  for (std::size_t j = 0; j < weights.size(); ++j) grad_weights[j] = l2 * weights[j];
  grad_bias = 0.0;
  for (std::size_t i = 0; i < x.rows; ++i) {
    auto row = x.row(i);
    double residual = sigmoid(margin(row, weights, bias)) - y[i];
    for (std::size_t j = 0; j < row.size(); ++j) grad_weights[j] += residual * row[j];
    grad_bias += residual;
  }
}

LogisticModel fit_logistic(const Matrix& x, std::span<const int> y, const LogisticConfig& config) {
  check_inputs(x, y);
  if (config.l2 < 0.0) throw ConfigError("l2 strength must be non-negative");
  LogisticModel model;
  model.config = config;
  std::size_t d = x.cols;
  std::vector<double> w(d, 0.0);
  double b = 0.0;
  std::vector<double> g(d);
  double gb = 0.0;
  logistic_gradient(x, y, config.l2, w, b, g, gb);
  double f = logistic_objective(x, y, config.l2, w, b);

  std::vector<double> w_new(d);
  std::vector<double> g_new(d);
  double step = 1.0 / std::max<double>(1.0, static_cast<double>(x.rows));
  std::size_t it = 0;
  for (; it < config.max_iter; ++it) {
    double gnorm2 = gb * gb;
    for (double v : g) gnorm2 += v * v;
    if (max_abs(g, gb) < config.tol) {
      model.converged = true;
      break;
    }

    double trial = step;
    double b_new = b;
    double f_new = f;
    bool accepted = false;
    for (int backtrack = 0; backtrack < 60; ++backtrack) {
      for (std::size_t j = 0; j < d; ++j) w_new[j] = w[j] - trial * g[j];
      b_new = b - trial * gb;
      f_new = logistic_objective(x, y, config.l2, w_new, b_new);
      if (f_new <= f - 1e-4 * trial * gnorm2) {
        accepted = true;
        break;
      }
      trial *= 0.5;
    }
    if (!accepted) break;  // no further decrease representable

    double gb_new = 0.0;
    logistic_gradient(x, y, config.l2, w_new, b_new, g_new, gb_new);

    // Barzilai-Borwein estimate for the next trial step.
    double sy = 0.0;
    double ss = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      double s = w_new[j] - w[j];
      sy += s * (g_new[j] - g[j]);
      ss += s * s;
    }
    double sb = b_new - b;
    sy += sb * (gb_new - gb);
    ss += sb * sb;
    step = (sy > 0.0 && ss > 0.0) ? ss / sy : trial * 2.0;

    w.swap(w_new);
    g.swap(g_new);
    b = b_new;
    gb = gb_new;
    f = f_new;
  }
  if (!model.converged && max_abs(g, gb) < config.tol) model.converged = true;

  model.weights = std::move(w);
  model.bias = b;
  model.final_loss = f;
  model.iterations = it;
  return model;
}

std::vector<double> LogisticModel::predict_proba(const Matrix& x) const {
  if (x.cols != weights.size()) throw DataError("logistic model: feature count mismatch");
  std::vector<double> out(x.rows);
  for (std::size_t i = 0; i < x.rows; ++i) out[i] = sigmoid(margin(x.row(i), weights, bias));
  return out;
}

}  // namespace pstyle::ml
