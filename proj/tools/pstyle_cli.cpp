#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pstyle/config.hpp"
#include "pstyle/error.hpp"
#include "pstyle/pipeline.hpp"
#include "pstyle/synthetic.hpp"
#include "pstyle/util.hpp"

namespace {

struct ExperimentArgs {
  std::string config_path;
  std::vector<std::string> settings;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void add_experiment_options(CLI::App* cmd, ExperimentArgs& args) {
  cmd->add_option("-c,--config", args.config_path, "experiment config file");
  cmd->add_option("--set", args.settings, "override one setting, key=value (repeatable)");
  cmd->add_option("--seed", args.seed, "master seed");
  cmd->add_option("-o,--out", args.out, "output directory");
}

std::string trim(std::string s) {
  auto first = s.find_first_not_of(" \t");
  auto last = s.find_last_not_of(" \t");
  return first == std::string::npos ? std::string() : s.substr(first, last - first + 1);
}

pstyle::ExperimentConfig resolve_config(const ExperimentArgs& args) {
  pstyle::ExperimentConfig config;
  if (!args.config_path.empty()) config = pstyle::load_config(args.config_path);
  for (const auto& s : args.settings) {
    auto eq = s.find('=');
    if (eq == std::string::npos) throw pstyle::ConfigError("--set expects key=value, got '" + s + "'");
    pstyle::apply_setting(config, trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
  }
  if (args.seed) config.seed = *args.seed;
  if (!args.out.empty()) config.output_dir = args.out;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Personality-style classification from interview data"};
  app.require_subcommand(1);

  auto* defaults = app.add_subcommand("defaults", "print every setting with its default value");

  ExperimentArgs analyze_args;
  auto* analyze = app.add_subcommand("analyze", "feature rankings, polarity grids and audio ANOVA");
  add_experiment_options(analyze, analyze_args);

  ExperimentArgs evaluate_args;
  auto* evaluate = app.add_subcommand("evaluate", "repeated cross-validation over the configured grid");
  add_experiment_options(evaluate, evaluate_args);

  std::vector<std::string> run_files;
  std::string metric = "macro_f1";
  bool paired_balance = false;
  std::string compare_out;
  auto* compare = app.add_subcommand("compare", "Welch t-tests between persisted runs");
  compare->add_option("runs", run_files, "run files (.jsonl)")->required();
  compare->add_option("--metric", metric, "metric to compare");
  compare->add_flag("--paired-balance", paired_balance, "pair imbalanced and smote runs of the same cell");
  compare->add_option("-o,--out", compare_out, "write comparison.md and comparison.csv here");

  pstyle::SyntheticSpec synth;
  std::string synth_out;
  auto* gen = app.add_subcommand("gen-synthetic", "write a labelled synthetic corpus");
  gen->add_option("-o,--out", synth_out, "output directory")->required();
  gen->add_option("--seed", synth.seed, "generator seed");
  gen->add_option("--signal", synth.signal, "planted signal strength, 0 for none");
  gen->add_option("--anaclitic", synth.anaclitic, "anaclitic patients");
  gen->add_option("--introjective", synth.introjective, "introjective patients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (defaults->parsed()) {
      std::cout << pstyle::emit_config(pstyle::ExperimentConfig{});
    } else if (analyze->parsed()) {
      pstyle::cmd_analyze(resolve_config(analyze_args), std::cout);
    } else if (evaluate->parsed()) {
      pstyle::cmd_evaluate(resolve_config(evaluate_args), std::cout);
    } else if (compare->parsed()) {
      auto result = pstyle::cmd_compare(run_files, metric, paired_balance);
      if (compare_out.empty()) {
        std::cout << result.markdown;
      } else {
        pstyle::write_file(compare_out + "/comparison.md", result.markdown);
        pstyle::write_file(compare_out + "/comparison.csv", result.csv);
        std::cout << "comparison written to " << compare_out << "\n";
      }
    } else if (gen->parsed()) {
      if (!(synth.signal >= 0.0)) throw pstyle::ConfigError("--signal must be non-negative");
      pstyle::write_synthetic(pstyle::generate_synthetic(synth), synth_out);
      std::cout << "synthetic corpus written to " << synth_out << "\n";
    }
  } catch (const pstyle::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const pstyle::DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return 3;
  } catch (const pstyle::DegenerateError& e) {
    std::cerr << "degenerate statistics: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
