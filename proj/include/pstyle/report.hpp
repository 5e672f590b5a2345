#pragma once

#include <span>
#include <string>
#include <vector>

#include "pstyle/eval.hpp"
#include "pstyle/lexicon.hpp"
#include "pstyle/stats.hpp"

namespace pstyle::report {

/// "0.896 ± 0.127" with three decimals.
std::string mean_sd(const eval::Summary& s);

/// "<0.001" below 0.001, else three decimals.
std::string p_value_text(double p);

// One evaluated grid cell.
struct Cell {
  std::string feature_set;
  std::string model;
  std::string balance;
  eval::Summary f1;
  eval::Summary kappa;
  std::size_t repetitions = 0;
  std::uint64_t seed = 0;
  std::string fingerprint;
  std::string run_file;
};

/// Feature-set x model rows with F1 and kappa columns per balancing mode.
std::string performance_markdown(std::span<const Cell> cells);
std::string performance_csv(std::span<const Cell> cells);

// Pairwise test results between labelled runs.
struct Comparison {
  std::vector<std::string> labels;
  // p[i][j] for i < j; the rest is unused.
  std::vector<std::vector<double>> p;
  std::vector<std::vector<double>> statistic;
  std::string metric;
};

/// Upper-triangular matrix: the cell (i, j), i < j, holds the p-value.
std::string comparison_markdown(const Comparison& c);
std::string comparison_csv(const Comparison& c);

// One balanced-vs-imbalanced pair of the same feature set and model.
struct BalancePair {
  std::string feature_set;
  std::string model;
  eval::Summary imbalanced;
  eval::Summary balanced;
  stats::TestResult test;
};

std::string balance_pairs_markdown(std::span<const BalancePair> pairs, const std::string& metric);
std::string balance_pairs_csv(std::span<const BalancePair> pairs, const std::string& metric);

std::string polarity_grid_markdown(std::span<const PolarityGrid> grids, const std::string& title);
std::string polarity_grid_csv(std::span<const PolarityGrid> grids);

// Box-plot data of one feature, both styles.
struct BoxPlot {
  std::string feature;
  stats::GroupSummary summary;
};

std::string boxplot_csv(std::span<const BoxPlot> plots);
/// Minimal static SVG: one panel per feature, one box per style.
std::string boxplot_svg(std::span<const BoxPlot> plots);

/// row_id then one column per feature; missing cells are empty.
std::string feature_matrix_csv(const FeatureMatrix& m);

std::string ranking_markdown(std::span<const stats::RankedFeature> ranking, std::size_t limit);

}  // namespace pstyle::report
