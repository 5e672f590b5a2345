#include "pstyle/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <tuple>

#include "csv.hpp"
#include "pstyle/util.hpp"

namespace pstyle::report {

std::string mean_sd(const eval::Summary& s) { return format_fixed(s.mean, 3) + " ± " + format_fixed(s.sd, 3); }

std::string p_value_text(double p) { return p < 0.001 ? "<0.001" : format_fixed(p, 3); }

std::string performance_markdown(std::span<const Cell> cells) {
  std::vector<std::string> balances;
  std::vector<std::pair<std::string, std::string>> rows;
  std::map<std::tuple<std::string, std::string, std::string>, const Cell*> index;
  for (const auto& c : cells) {
    if (std::find(balances.begin(), balances.end(), c.balance) == balances.end()) balances.push_back(c.balance);
    std::pair<std::string, std::string> row{c.feature_set, c.model};
    if (std::find(rows.begin(), rows.end(), row) == rows.end()) rows.push_back(row);
    index[{c.feature_set, c.model, c.balance}] = &c;
  }
  std::string out = "| Features | Model |";
  std::string rule = "|---|---|";
  for (const auto& b : balances) {
    std::string name = b == "none" ? "imbalanced" : b;
    out += " F1 (" + name + ") | κ (" + name + ") |";
    rule += "---|---|";
  }
  out += "\n" + rule + "\n";
  for (const auto& [fs, model] : rows) {
    out += "| " + fs + " | " + model + " |";
    for (const auto& b : balances) {
      auto it = index.find({fs, model, b});
      if (it == index.end()) {
        out += " - | - |";
      } else {
        out += " " + mean_sd(it->second->f1) + " | " + mean_sd(it->second->kappa) + " |";
      }
    }
    out += "\n";
  }
  return out;
}

std::string performance_csv(std::span<const Cell> cells) {
  std::string out = "feature_set,model,balance,f1_mean,f1_sd,kappa_mean,kappa_sd,repetitions,seed,fingerprint,run_file\n";
  for (const auto& c : cells) {
    out += csv::join({c.feature_set, c.model, c.balance, format_double(c.f1.mean), format_double(c.f1.sd),
                      format_double(c.kappa.mean), format_double(c.kappa.sd), std::to_string(c.repetitions),
                      std::to_string(c.seed), c.fingerprint, c.run_file}) +
           "\n";
  }
  return out;
}

std::string comparison_markdown(const Comparison& c) {
  std::size_t n = c.labels.size();
  std::string out = "| " + c.metric + " |";
  std::string rule = "|---|";
  for (std::size_t j = 1; j < n; ++j) {
    out += " " + c.labels[j] + " |";
    rule += "---|";
  }
  out += "\n" + rule + "\n";
  for (std::size_t i = 0; i + 1 < n; ++i) {
    out += "| " + c.labels[i] + " |";
    for (std::size_t j = 1; j < n; ++j) out += j > i ? " " + p_value_text(c.p[i][j]) + " |" : " |";
    out += "\n";
  }
  return out;
}

std::string comparison_csv(const Comparison& c) {
  std::string out = "run_a,run_b,metric,statistic,p_value\n";
  for (std::size_t i = 0; i < c.labels.size(); ++i) {
    for (std::size_t j = i + 1; j < c.labels.size(); ++j) {
      out += csv::join({c.labels[i], c.labels[j], c.metric, format_double(c.statistic[i][j]),
                        format_double(c.p[i][j])}) +
             "\n";
    }
  }
  return out;
}

std::string balance_pairs_markdown(std::span<const BalancePair> pairs, const std::string& metric) {
  std::string out = "| Features | Model | " + metric + " (imbalanced) | " + metric + " (smote) | p |\n";
  out += "|---|---|---|---|---|\n";
  for (const auto& p : pairs) {
    out += "| " + p.feature_set + " | " + p.model + " | " + mean_sd(p.imbalanced) + " | " + mean_sd(p.balanced) +
           " | " + p_value_text(p.test.p_value) + " |\n";
  }
  return out;
}

std::string balance_pairs_csv(std::span<const BalancePair> pairs, const std::string& metric) {
  std::string out = "feature_set,model,metric,imbalanced_mean,imbalanced_sd,smote_mean,smote_sd,statistic,p_value\n";
  for (const auto& p : pairs) {
    out += csv::join({p.feature_set, p.model, metric, format_double(p.imbalanced.mean), format_double(p.imbalanced.sd),
                      format_double(p.balanced.mean), format_double(p.balanced.sd), format_double(p.test.statistic),
                      format_double(p.test.p_value)}) +
           "\n";
  }
  return out;
}

namespace {

constexpr std::array<std::string_view, 3> kGridOrder{"positive", "neutral", "negative"};

}  // namespace

std::string polarity_grid_markdown(std::span<const PolarityGrid> grids, const std::string& title) {
  std::string out = "### " + title + "\n\n";
  for (const auto& g : grids) {
    out += "**" + std::string(to_string(g.style)) + "** (rows: question, columns: answer)\n\n";
    out += "| question | positive | neutral | negative | pairs |\n|---|---|---|---|---|\n";
    for (std::size_t q = 0; q < 3; ++q) {
      out += "| " + std::string(kGridOrder[q]) + " |";
      for (std::size_t a = 0; a < 3; ++a) {
        out += g.empty_row[q] ? " - |" : " " + format_fixed(g.fractions[q][a], 3) + " |";
      }
      out += " " + std::to_string(g.pairs_per_row[q]) + " |\n";
    }
    out += "\n";
  }
  return out;
}

std::string polarity_grid_csv(std::span<const PolarityGrid> grids) {
  std::string out = "style,question,answer,fraction,pairs\n";
  for (const auto& g : grids) {
    for (std::size_t q = 0; q < 3; ++q) {
      for (std::size_t a = 0; a < 3; ++a) {
        out += csv::join({std::string(to_string(g.style)), std::string(kGridOrder[q]), std::string(kGridOrder[a]),
                          format_double(g.fractions[q][a]), std::to_string(g.pairs_per_row[q])}) +
               "\n";
      }
    }
  }
  return out;
}

std::string boxplot_csv(std::span<const BoxPlot> plots) {
  std::string out = "feature,style,n,min,q1,median,q3,max,mean\n";
  for (const auto& p : plots) {
    for (const auto& g : p.summary.groups) {
      out += csv::join({p.feature, g.group, std::to_string(g.n), format_double(g.min), format_double(g.q1),
                        format_double(g.median), format_double(g.q3), format_double(g.max), format_double(g.mean)}) +
             "\n";
    }
  }
  return out;
}

std::string boxplot_svg(std::span<const BoxPlot> plots) {
  constexpr double kPanelW = 180.0;
  constexpr double kPanelH = 220.0;
  constexpr double kTop = 30.0;
  constexpr double kPlotH = 160.0;
  double width = kPanelW * static_cast<double>(std::max<std::size_t>(plots.size(), 1));
  auto num = [](double v) { return format_fixed(v, 2); };
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" +
                    num(kPanelH) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  const std::array<std::string_view, 2> colours{"#4c78a8", "#f58518"};
  for (std::size_t i = 0; i < plots.size(); ++i) {
    const auto& plot = plots[i];
    double x0 = kPanelW * static_cast<double>(i);
    double lo = INFINITY;
    double hi = -INFINITY;
    for (const auto& g : plot.summary.groups) {
      lo = std::min(lo, g.min);
      hi = std::max(hi, g.max);
    }
    if (!(hi > lo)) {
      lo -= 0.5;
      hi += 0.5;
    }
    auto y = [&](double v) { return kTop + kPlotH * (1.0 - (v - lo) / (hi - lo)); };
    out += "  <text x=\"" + num(x0 + kPanelW / 2) + "\" y=\"16\" text-anchor=\"middle\">" + plot.feature + "</text>\n";
    for (std::size_t k = 0; k < plot.summary.groups.size(); ++k) {
      const auto& g = plot.summary.groups[k];
      double cx = x0 + kPanelW * (0.3 + 0.4 * static_cast<double>(k));
      double half = 20.0;
      std::string colour(colours[k % colours.size()]);
      out += "  <line x1=\"" + num(cx) + "\" y1=\"" + num(y(g.min)) + "\" x2=\"" + num(cx) + "\" y2=\"" +
             num(y(g.max)) + "\" stroke=\"#333\"/>\n";
      out += "  <rect x=\"" + num(cx - half) + "\" y=\"" + num(y(g.q3)) + "\" width=\"" + num(2 * half) +
             "\" height=\"" + num(std::max(0.5, y(g.q1) - y(g.q3))) + "\" fill=\"" + colour +
             "\" stroke=\"#333\"/>\n";
      out += "  <line x1=\"" + num(cx - half) + "\" y1=\"" + num(y(g.median)) + "\" x2=\"" + num(cx + half) +
             "\" y2=\"" + num(y(g.median)) + "\" stroke=\"#000\" stroke-width=\"2\"/>\n";
      out += "  <text x=\"" + num(cx) + "\" y=\"" + num(kTop + kPlotH + 18) + "\" text-anchor=\"middle\">" +
             g.group + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

std::string feature_matrix_csv(const FeatureMatrix& m) {
  std::vector<std::string> header{"row_id"};
  for (const auto& c : m.columns()) header.push_back(c.name);
  std::string out = csv::join(header) + "\n";
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<std::string> cells{m.row_ids()[r]};
    for (std::size_t c = 0; c < m.cols(); ++c) cells.push_back(is_missing(m.at(r, c)) ? "" : format_double(m.at(r, c)));
    out += csv::join(cells) + "\n";
  }
  return out;
}

std::string ranking_markdown(std::span<const stats::RankedFeature> ranking, std::size_t limit) {
  std::string out = "| rank | feature | p | statistic | dominant |\n|---|---|---|---|---|\n";
  for (std::size_t i = 0; i < ranking.size() && i < limit; ++i) {
    const auto& r = ranking[i];
    out += "| " + std::to_string(i + 1) + " | " + r.name + " | " + p_value_text(r.result.p_value) + " | " +
           format_fixed(r.result.statistic, 3) + " | " +
           (r.dominant ? std::string(to_string(*r.dominant)) : std::string("none")) + " |\n";
  }
  return out;
}

}  // namespace pstyle::report
