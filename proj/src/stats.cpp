#include "pstyle/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "csv.hpp"
#include "pstyle/error.hpp"
#include "pstyle/util.hpp"

namespace pstyle::stats {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::exact:
      return "exact";
    case Method::normal_approx:
      return "normal_approx";
    case Method::welch_t:
      return "welch_t";
    case Method::anova_f:
      return "anova_f";
  }
  return "exact";
}

// ------------------------------------------------------ special functions

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

namespace {

// Modified Lentz evaluation of the incomplete beta continued fraction.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 10000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  double qab = a + b;
  double qap = a + 1.0;
  double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_two_sided(double t, double df) {
  if (std::isnan(t)) return 1.0;
  if (std::isinf(t)) return 0.0;
  double x = df / (df + t * t);
  return std::clamp(incomplete_beta(df / 2.0, 0.5, x), 0.0, 1.0);
}

double f_survival(double f, double d1, double d2) {
  if (!(f > 0.0)) return 1.0;
  if (std::isinf(f)) return 0.0;
  double x = d2 / (d2 + d1 * f);
  return std::clamp(incomplete_beta(d2 / 2.0, d1 / 2.0, x), 0.0, 1.0);
}

std::vector<double> midranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return values[i] < values[j]; });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
    double rank = (static_cast<double>(i) + static_cast<double>(j) + 1.0) / 2.0;
    for (std::size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

// ------------------------------------------------------------------ tests

double mann_whitney_exact_p(double u, std::size_t n_a, std::size_t n_b) {
  // counts[j][s]: number of j-subsets of {0..n-1} with position sum s, where
  // U of the chosen sample equals its position sum minus j(j-1)/2.
  std::size_t n = n_a + n_b;
  std::size_t max_u = n_a * n_b;
  std::size_t max_sum = n_a * n;
  std::vector<std::vector<double>> counts(n_a + 1, std::vector<double>(max_sum + 1, 0.0));
  counts[0][0] = 1.0;
  for (std::size_t item = 0; item < n; ++item) {
    for (std::size_t j = std::min(item + 1, n_a); j >= 1; --j) {
      for (std::size_t s = max_sum; s >= item; --s) {
        counts[j][s] += counts[j - 1][s - item];
        if (s == item) break;
      }
    }
  }
  std::size_t offset = n_a * (n_a - 1) / 2;
  std::vector<double> distribution(max_u + 1, 0.0);
  double total = 0.0;
  for (std::size_t uu = 0; uu <= max_u; ++uu) {
    distribution[uu] = counts[n_a][uu + offset];
    total += distribution[uu];
  }
  // The null distribution is symmetric, so use the lower tail of min(U, max - U).
  double low = std::min(u, static_cast<double>(max_u) - u);
  double tail = 0.0;
  for (std::size_t uu = 0; uu <= max_u && static_cast<double>(uu) <= low + 1e-9; ++uu) tail += distribution[uu];
  return std::min(1.0, 2.0 * tail / total);
}

TestResult mann_whitney(std::span<const double> a, std::span<const double> b, bool force_normal_approx) {
  if (a.empty() || b.empty()) throw DataError("Mann-Whitney test needs two non-empty samples");
  TestResult result;
  result.n_a = a.size();
  result.n_b = b.size();
  auto na = static_cast<double>(a.size());
  auto nb = static_cast<double>(b.size());

  std::vector<double> pooled(a.begin(), a.end());
  pooled.insert(pooled.end(), b.begin(), b.end());
  auto ranks = midranks(pooled);
  double rank_sum_a = std::accumulate(ranks.begin(), ranks.begin() + static_cast<std::ptrdiff_t>(a.size()), 0.0);
  double u = rank_sum_a - na * (na + 1.0) / 2.0;

  auto sorted = pooled;
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) {
    result.statistic = na * nb / 2.0;
    result.p_value = 1.0;
    result.method = Method::normal_approx;
    result.degenerate = true;
    return result;
  }

  double tie_sum = 0.0;
  bool ties = false;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    auto t = static_cast<double>(j - i);
    if (j - i > 1) ties = true;
    tie_sum += t * t * t - t;
    i = j;
  }

  result.statistic = u;
  if (!ties && pooled.size() <= kExactLimit && !force_normal_approx) {
    result.method = Method::exact;
    result.p_value = mann_whitney_exact_p(u, a.size(), b.size());
    return result;
  }

  result.method = Method::normal_approx;
  double n = na + nb;
  double mu = na * nb / 2.0;
  double var = na * nb / 12.0 * ((n + 1.0) - tie_sum / (n * (n - 1.0)));
  double sd = std::sqrt(std::max(var, 0.0));
  double z = std::max(std::abs(u - mu) - 0.5, 0.0) / sd;
  result.p_value = std::clamp(std::erfc(z / std::sqrt(2.0)), 0.0, 1.0);
  return result;
}

TestResult anova_f(std::span<const std::vector<double>> groups) {
  if (groups.size() < 2) throw DataError("ANOVA needs at least two groups");
  std::size_t total = 0;
  double grand = 0.0;
  for (const auto& g : groups) {
    if (g.empty()) throw DataError("ANOVA groups must be non-empty");
    total += g.size();
    for (double v : g) grand += v;
  }
  if (total <= groups.size()) throw DataError("ANOVA needs more observations than groups");
  grand /= static_cast<double>(total);

  double between = 0.0;
  double within = 0.0;
  for (const auto& g : groups) {
    double m = mean(g);
    between += static_cast<double>(g.size()) * (m - grand) * (m - grand);
    for (double v : g) within += (v - m) * (v - m);
  }

  TestResult result;
  result.method = Method::anova_f;
  result.n_a = groups[0].size();
  result.n_b = groups[1].size();
  result.df1 = static_cast<double>(groups.size() - 1);
  result.df2 = static_cast<double>(total - groups.size());
  // Relative floor so that rounding noise in a zero-spread sum does not count.
  double scale = 0.0;
  for (const auto& g : groups) {
    for (double v : g) scale = std::max(scale, std::abs(v));
  }
  double floor = 1e-24 * std::max(scale * scale, 1e-300) * static_cast<double>(total);
  if (between <= floor) {
    result.statistic = 0.0;
    result.p_value = 1.0;
    result.degenerate = within <= floor;
    return result;
  }
  if (within <= floor) {
    result.statistic = std::numeric_limits<double>::infinity();
    result.p_value = 0.0;
    result.degenerate = true;
    return result;
  }
  result.statistic = (between / result.df1) / (within / result.df2);
  result.p_value = f_survival(result.statistic, result.df1, result.df2);
  return result;
}

TestResult welch_t(std::span<const double> a, std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) throw DataError("Welch t-test needs at least two values per sample");
  TestResult result;
  result.method = Method::welch_t;
  result.n_a = a.size();
  result.n_b = b.size();
  double ma = mean(a);
  double mb = mean(b);
  double sa = sample_sd(a);
  double sb = sample_sd(b);
  double va = sa * sa / static_cast<double>(a.size());
  double vb = sb * sb / static_cast<double>(b.size());
  double se2 = va + vb;
  double diff = ma - mb;
  if (!(se2 > 0.0)) {
    result.degenerate = true;
    if (diff == 0.0) {
      result.statistic = 0.0;
      result.p_value = 1.0;
    } else {
      result.statistic = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
      result.p_value = 0.0;
    }
    return result;
  }
  result.statistic = diff / std::sqrt(se2);
  result.df1 = se2 * se2 /
               (va * va / static_cast<double>(a.size() - 1) + vb * vb / static_cast<double>(b.size() - 1));
  result.p_value = student_t_two_sided(result.statistic, result.df1);
  return result;
}

// ------------------------------------------------------------ description

double mean(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double m = mean(values);
  double acc = 0.0;
  for (double v : values) acc += (v - m) * (v - m);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

double quantile(std::span<const double> values, double p) {
  if (values.empty()) throw DataError("quantile of an empty sample");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  auto lo = static_cast<std::size_t>(std::floor(h));
  auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

GroupStats describe(std::string group, std::span<const double> values) {
  if (values.empty()) throw DataError("group '" + group + "' has no values");
  GroupStats s;
  s.group = std::move(group);
  s.n = values.size();
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.q1 = quantile(values, 0.25);
  s.median = quantile(values, 0.5);
  s.q3 = quantile(values, 0.75);
  s.mean = mean(values);
  return s;
}

GroupSummary group_summary(std::span<const double> values, std::span<const PersonalityStyle> labels) {
  if (values.size() != labels.size()) throw DataError("group_summary: one label per value required");
  GroupSummary summary;
  for (auto style : {PersonalityStyle::anaclitic, PersonalityStyle::introjective}) {
    std::vector<double> group;
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (labels[i] == style && !is_missing(values[i])) group.push_back(values[i]);
    }
    summary.groups.push_back(describe(std::string(pstyle::to_string(style)), group));
  }
  return summary;
}

// ------------------------------------------------------------ feature ranking

std::vector<RankedFeature> rank_features(const FeatureMatrix& matrix, std::span<const PersonalityStyle> labels,
                                         FeatureTest test, const UsageFilter* filter) {
  if (labels.size() != matrix.rows()) throw DataError("rank_features: one label per row required");
  if (filter && filter->counts.size() != matrix.cols()) throw DataError("usage filter must cover every column");

  std::vector<RankedFeature> ranking;
  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    if (matrix.column(c).kind != ColumnKind::numeric) continue;
    if (filter) {
      const auto& counts = filter->counts[c];
      bool everywhere = std::all_of(counts.begin(), counts.end(), [&](double v) { return v >= filter->min_per_row; });
      if (!everywhere || mean(counts) < filter->min_mean) continue;
    }
    std::vector<double> a;
    std::vector<double> b;
    for (std::size_t r = 0; r < matrix.rows(); ++r) {
      double v = matrix.at(r, c);
      if (is_missing(v)) continue;
      (labels[r] == PersonalityStyle::anaclitic ? a : b).push_back(v);
    }
    if (a.empty() || b.empty()) continue;

    RankedFeature entry;
    entry.column = c;
    entry.name = matrix.column(c).name;
    if (test == FeatureTest::mann_whitney) {
      entry.result = mann_whitney(a, b);
    } else {
      if (a.size() + b.size() <= 2) continue;
      std::vector<std::vector<double>> groups{a, b};
      entry.result = anova_f(groups);
    }
    double med_a = quantile(a, 0.5);
    double med_b = quantile(b, 0.5);
    if (med_a != med_b) {
      entry.dominant = med_a > med_b ? PersonalityStyle::anaclitic : PersonalityStyle::introjective;
    } else if (mean(a) != mean(b)) {
      entry.dominant = mean(a) > mean(b) ? PersonalityStyle::anaclitic : PersonalityStyle::introjective;
    }
    ranking.push_back(std::move(entry));
  }

  std::stable_sort(ranking.begin(), ranking.end(), [test](const RankedFeature& x, const RankedFeature& y) {
    if (x.result.p_value != y.result.p_value) return x.result.p_value < y.result.p_value;
    if (x.result.degenerate != y.result.degenerate) return !x.result.degenerate;
    if (test == FeatureTest::anova_f && x.result.statistic != y.result.statistic) {
      return x.result.statistic > y.result.statistic;
    }
    return false;
  });
  return ranking;
}

std::string ranking_csv(std::span<const RankedFeature> ranking) {
  std::string out = "rank,feature,p_value,statistic,method,dominant_style\n";
  for (std::size_t i = 0; i < ranking.size(); ++i) {
    const auto& r = ranking[i];
    out += csv::join({std::to_string(i + 1), r.name, format_double(r.result.p_value),
                      format_double(r.result.statistic), std::string(to_string(r.result.method)),
                      r.dominant ? std::string(pstyle::to_string(*r.dominant)) : std::string("none")});
    out.push_back('\n');
  }
  return out;
}

}  // namespace pstyle::stats
