#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "pstyle/config.hpp"
#include "pstyle/corpus.hpp"
#include "pstyle/eval.hpp"
#include "pstyle/report.hpp"

namespace pstyle {

// Patients in evaluation order with their labels (1 = anaclitic).
struct Dataset {
  std::vector<std::string> patient_ids;
  std::vector<int> labels;
  // Aligned with patient_ids; empty when no transcripts are configured.
  std::vector<Transcript> transcripts;

  std::vector<PersonalityStyle> styles() const;
};

/// Patients come from the transcripts, or from labels_csv when no transcripts
/// are configured. labels_csv (patient_id,label) overrides transcript labels.
Dataset load_dataset(const ExperimentConfig& config);

/// Throws ConfigError naming the first missing input of a feature set.
void check_inputs(const ExperimentConfig& config, const std::string& feature_set);

/// auto resolves to per_answer for tfidf, window512 for embeddings, none otherwise.
std::string resolved_chunk_mode(const ExperimentConfig& config, const std::string& feature_set);

FeatureMatrix liwc_features(const Dataset& data, const CategoryLexicon& lexicon);
FeatureMatrix sentiment_features(const Dataset& data, const SentimentLexicon& lexicon);
FeatureMatrix audio_features(const Dataset& data, const AudioSegmentSet& audio);
/// Questionnaire rows reordered to the dataset; every patient must be present.
FeatureMatrix questionnaire_features(const Dataset& data, const FeatureMatrix& questionnaire);

std::unique_ptr<eval::FeatureSource> build_feature_source(const ExperimentConfig& config, const Dataset& data,
                                                          const std::string& feature_set);

ml::ModelSpec model_spec(const ExperimentConfig& config, const std::string& model);

struct EvaluatedCell {
  report::Cell cell;
  eval::EvaluationRun run;
};

/// Runs every feature set x model x balance cell, writes runs/*.jsonl and the
/// performance tables under output_dir, and logs one summary line per cell.
std::vector<EvaluatedCell> cmd_evaluate(const ExperimentConfig& config, std::ostream& log);

/// Feature rankings, polarity grids, audio ANOVA and answer lengths under output_dir/analysis.
void cmd_analyze(const ExperimentConfig& config, std::ostream& log);

struct CompareOutput {
  std::string markdown;
  std::string csv;
};

/// Pairwise comparison of run files. With paired_balance, runs are paired by
/// feature set and model (imbalanced vs smote) instead.
CompareOutput cmd_compare(const std::vector<std::string>& run_files, const std::string& metric, bool paired_balance);

}  // namespace pstyle
