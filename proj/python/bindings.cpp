#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pstyle/config.hpp"
#include "pstyle/corpus.hpp"
#include "pstyle/error.hpp"
#include "pstyle/eval.hpp"
#include "pstyle/ml.hpp"
#include "pstyle/pipeline.hpp"
#include "pstyle/stats.hpp"
#include "pstyle/synthetic.hpp"
#include "pstyle/util.hpp"

namespace py = pybind11;
using namespace pstyle;

namespace {

py::dict test_dict(const stats::TestResult& r) {
  py::dict d;
  d["statistic"] = r.statistic;
  d["p_value"] = r.p_value;
  d["method"] = std::string(stats::to_string(r.method));
  d["degenerate"] = r.degenerate;
  return d;
}

ExperimentConfig resolve(const std::string& config_path, const std::map<std::string, std::string>& settings,
                         const std::string& output_dir) {
  ExperimentConfig config;
  if (!config_path.empty()) config = load_config(config_path);
  for (const auto& [key, value] : settings) apply_setting(config, key, value);
  if (!output_dir.empty()) config.output_dir = output_dir;
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Personality-style classification pipeline";

  auto error = py::register_exception<Error>(m, "Error");
  py::register_exception<ConfigError>(m, "ConfigError", error.ptr());
  py::register_exception<DataError>(m, "DataError", error.ptr());
  py::register_exception<DegenerateError>(m, "DegenerateError", error.ptr());

  m.def("tokenize", [](const std::string& text) {
    std::vector<std::string> out;
    for (const auto& t : tokenize(text)) out.push_back(t.text);
    return out;
  });

  m.def("cohen_kappa", [](std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    return eval::cohen_kappa({tp, fp, fn, tn});
  }, py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn"));
  m.def("macro_f1", [](std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
    return eval::macro_f1({tp, fp, fn, tn});
  }, py::arg("tp"), py::arg("fp"), py::arg("fn"), py::arg("tn"));

  m.def("mann_whitney", [](const std::vector<double>& a, const std::vector<double>& b, bool normal) {
    return test_dict(stats::mann_whitney(a, b, normal));
  }, py::arg("a"), py::arg("b"), py::arg("force_normal_approx") = false);
  m.def("welch_t", [](const std::vector<double>& a, const std::vector<double>& b) {
    return test_dict(stats::welch_t(a, b));
  });
  m.def("anova_f", [](const std::vector<std::vector<double>>& groups) { return test_dict(stats::anova_f(groups)); });

  m.def("stratified_folds", [](const std::vector<int>& labels, std::size_t k, std::uint64_t seed) {
    return eval::stratified_folds(labels, k, seed).folds;
  }, py::arg("labels"), py::arg("k"), py::arg("seed"));

  m.def("smote", [](const std::vector<std::vector<double>>& minority, std::size_t count, std::size_t k,
                    std::uint64_t seed) {
    auto result = ml::smote(ml::Matrix::from_rows(minority), count, {k, seed});
    std::vector<std::vector<double>> rows;
    for (std::size_t r = 0; r < result.synthetic.rows; ++r) {
      auto row = result.synthetic.row(r);
      rows.emplace_back(row.begin(), row.end());
    }
    return py::make_tuple(rows, result.parents);
  }, py::arg("minority"), py::arg("count"), py::arg("k") = 5, py::arg("seed") = 0);

  m.def("generate_synthetic", [](const std::string& directory, std::size_t anaclitic, std::size_t introjective,
                                 double signal, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.anaclitic = anaclitic;
    spec.introjective = introjective;
    spec.signal = signal;
    spec.seed = seed;
    write_synthetic(generate_synthetic(spec), directory);
  }, py::arg("directory"), py::arg("anaclitic") = 50, py::arg("introjective") = 29, py::arg("signal") = 1.0,
     py::arg("seed") = 0);

  m.def("default_config", [] { return emit_config(ExperimentConfig{}); });

  m.def("evaluate", [](const std::string& config_path, const std::map<std::string, std::string>& settings,
                       const std::string& output_dir) {
    std::ostringstream log;
    auto cells = cmd_evaluate(resolve(config_path, settings, output_dir), log);
    py::list out;
    for (const auto& c : cells) {
      py::dict d;
      d["feature_set"] = c.cell.feature_set;
      d["model"] = c.cell.model;
      d["balance"] = c.cell.balance;
      d["f1_mean"] = c.cell.f1.mean;
      d["f1_sd"] = c.cell.f1.sd;
      d["kappa_mean"] = c.cell.kappa.mean;
      d["kappa_sd"] = c.cell.kappa.sd;
      d["run_file"] = c.cell.run_file;
      out.append(d);
    }
    return out;
  }, py::arg("config_path") = "", py::arg("settings") = std::map<std::string, std::string>{},
     py::arg("output_dir") = "");

  m.def("analyze", [](const std::string& config_path, const std::map<std::string, std::string>& settings,
                      const std::string& output_dir) {
    std::ostringstream log;
    cmd_analyze(resolve(config_path, settings, output_dir), log);
    return log.str();
  }, py::arg("config_path") = "", py::arg("settings") = std::map<std::string, std::string>{},
     py::arg("output_dir") = "");

  m.def("compare", [](const std::vector<std::string>& run_files, const std::string& metric, bool paired_balance) {
    auto result = cmd_compare(run_files, metric, paired_balance);
    return py::make_tuple(result.markdown, result.csv);
  }, py::arg("run_files"), py::arg("metric") = "macro_f1", py::arg("paired_balance") = false);

  m.def("run_scores", [](const std::string& run_file, const std::string& metric) {
    return eval::run_from_jsonl(read_file(run_file)).scores(metric);
  }, py::arg("run_file"), py::arg("metric") = "macro_f1");
}
