#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "pstyle/ml.hpp"

namespace pstyle {

// One experiment: inputs, the evaluated grid, protocol and model settings.
struct ExperimentConfig {
  std::string transcripts_dir;
  std::string questionnaire_csv;
  std::string questionnaire_types;
  std::string labels_csv;
  std::string embeddings_jsonl;
  std::string audio_csv;
  std::string lexicon;
  std::string sentiment_lexicon;

  // Grid axes; every combination is one evaluated cell.
  std::vector<std::string> feature_sets{"liwc"};
  std::vector<std::string> models{"rf"};
  std::vector<std::string> balances{"none"};
  std::string chunk_mode = "auto";  // auto | none | per_answer | window512

  std::size_t folds = 5;
  std::size_t repetitions = 100;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::size_t smote_k = 5;

  std::size_t tfidf_n_max = 3;
  std::size_t tfidf_min_df = 2;
  ml::LogisticConfig logistic;
  ml::ForestConfig forest;
  ml::BoostedConfig boosted;

  std::string output_dir = "results";
  bool svg = false;
  std::size_t qa_min_sentences = 10;
  double usage_min_mean = 10.0;

  bool operator==(const ExperimentConfig& other) const;
};

/// Base feature sets; a feature set is one of these or several joined by '+'.
const std::vector<std::string>& base_feature_sets();
/// Splits "liwc+questionnaire" into its parts, rejecting unknown names.
std::vector<std::string> feature_set_parts(std::string_view feature_set);

/// Applies one key = value setting. Relative paths are resolved against base_dir when it is not empty.
void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value,
                   const std::string& base_dir = "");

/// Flat "key = value" lines; '#' starts a comment; "include = file" reads
/// another config in place (relative to base_dir). Later keys win.
ExperimentConfig parse_config(std::string_view text, const std::string& base_dir = "",
                              ExperimentConfig start = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig start = {});

/// Every key with its value; parse_config(emit_config(c)) == c.
std::string emit_config(const ExperimentConfig& config);

}  // namespace pstyle
