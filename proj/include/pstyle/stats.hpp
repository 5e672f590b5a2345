#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pstyle/corpus.hpp"
#include "pstyle/features.hpp"

namespace pstyle::stats {

enum class Method { exact, normal_approx, welch_t, anova_f };

std::string_view to_string(Method method);

struct TestResult {
  double statistic = 0.0;
  double p_value = 1.0;
  Method method = Method::exact;
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  // Degrees of freedom (Welch: Satterthwaite df; ANOVA: between, within).
  double df1 = 0.0;
  double df2 = 0.0;
  // No variation to test (identical samples, zero variances, infinite F/t).
  bool degenerate = false;
};

// ------------------------------------------------------ special functions

double normal_cdf(double z);

/// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

/// P(|T| >= |t|) for Student's t with df degrees of freedom.
double student_t_two_sided(double t, double df);

/// P(F >= f) for the F distribution with (d1, d2) degrees of freedom.
double f_survival(double f, double d1, double d2);

/// Midranks (1-based) of the pooled values; tied values share their mean rank.
std::vector<double> midranks(std::span<const double> values);

// ------------------------------------------------------------------ tests

/// Largest pooled sample size handled by the exact (tie-free) null distribution.
inline constexpr std::size_t kExactLimit = 16;

/// Two-sided Mann-Whitney-Wilcoxon test; statistic is U of sample a.
/// Exact null distribution for tie-free samples with n_a + n_b <= 16,
/// otherwise tie-corrected normal approximation with continuity correction.
/// force_normal_approx skips the exact path.
TestResult mann_whitney(std::span<const double> a, std::span<const double> b, bool force_normal_approx = false);

/// Exact two-sided p for U with sizes (n_a, n_b), no ties.
double mann_whitney_exact_p(double u, std::size_t n_a, std::size_t n_b);

/// One-way ANOVA; statistic is F = between MS / within MS.
TestResult anova_f(std::span<const std::vector<double>> groups);

/// Welch's unequal-variance t-test, two-sided.
TestResult welch_t(std::span<const double> a, std::span<const double> b);

// ------------------------------------------------------------ description

double mean(std::span<const double> values);
double sample_sd(std::span<const double> values);

/// Linear-interpolation quantile (the (n-1)p rule) of unsorted values.
double quantile(std::span<const double> values, double p);

struct GroupStats {
  std::string group;
  std::size_t n = 0;
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

GroupStats describe(std::string group, std::span<const double> values);

struct GroupSummary {
  std::vector<GroupStats> groups;  // anaclitic, then introjective
};

/// Box-plot summary per style. Throws DataError if a style has no values.
GroupSummary group_summary(std::span<const double> values, std::span<const PersonalityStyle> labels);

// ------------------------------------------------------------ feature ranking

enum class FeatureTest { mann_whitney, anova_f };

struct UsageFilter {
  // counts[c][r]: absolute occurrences of feature c in row r.
  std::vector<std::vector<double>> counts;
  double min_per_row = 1.0;
  double min_mean = 10.0;
};

struct RankedFeature {
  std::size_t column = 0;
  std::string name;
  TestResult result;
  // Style with the larger median (ties: larger mean); empty when equal.
  std::optional<PersonalityStyle> dominant;
};

/// Tests every numeric column between the two styles and sorts by ascending
/// p (degenerate results after regular ones at equal p). Missing cells are skipped.
std::vector<RankedFeature> rank_features(const FeatureMatrix& matrix, std::span<const PersonalityStyle> labels,
                                         FeatureTest test, const UsageFilter* filter = nullptr);

/// rank,feature,p_value,statistic,method,dominant_style
std::string ranking_csv(std::span<const RankedFeature> ranking);

}  // namespace pstyle::stats
