#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pstyle/corpus.hpp"

namespace pstyle {

enum class ColumnKind { numeric, categorical };

enum class Provenance { questionnaire, tfidf, liwc, sentiment, embedding, audio };

std::string_view to_string(ColumnKind kind);
std::string_view to_string(Provenance provenance);

inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

struct Column {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  Provenance provenance = Provenance::questionnaire;
  // Level names of a categorical column; cells hold the level index.
  std::vector<std::string> levels;
};

// Named, typed columns over sample rows. Cells are doubles: numeric values,
// or a level index for categorical columns; NaN marks a missing cell.
class FeatureMatrix {
 public:
  FeatureMatrix() = default;
  explicit FeatureMatrix(std::vector<std::string> row_ids);

  std::size_t rows() const { return row_ids_.size(); }
  std::size_t cols() const { return columns_.size(); }

  const std::vector<std::string>& row_ids() const { return row_ids_; }
  const Column& column(std::size_t c) const { return columns_[c]; }
  const std::vector<Column>& columns() const { return columns_; }
  std::span<const double> values(std::size_t c) const { return values_[c]; }
  double at(std::size_t row, std::size_t col) const { return values_[col][row]; }

  /// Throws DataError on duplicate names, wrong length, non-finite numeric
  /// values other than NaN, or level indices outside the level set.
  void add_column(Column column, std::vector<double> values);

  std::optional<std::size_t> find_column(std::string_view name) const;
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;

  bool operator==(const FeatureMatrix& other) const;

 private:
  std::vector<std::string> row_ids_;
  std::vector<Column> columns_;
  std::vector<std::vector<double>> values_;
  std::unordered_map<std::string, std::size_t> name_index_;
};

/// Column union over identical row ids. Colliding names on both sides get a
/// "<provenance>:" prefix. A matrix with no columns acts as the identity.
FeatureMatrix concat_features(const FeatureMatrix& a, const FeatureMatrix& b);

// ---------------------------------------------------------------- TF-IDF

struct SparseVector {
  std::vector<std::size_t> indices;  // ascending
  std::vector<double> values;

  double norm() const;
};

class TfidfModel {
 public:
  std::size_t size() const { return terms_.size(); }
  std::size_t n_max() const { return n_max_; }
  std::size_t document_count() const { return document_count_; }
  const std::vector<double>& idf() const { return idf_; }
  const std::vector<std::string>& terms() const { return terms_; }
  std::optional<std::size_t> index_of(std::string_view term) const;

  /// tf * idf over in-vocabulary n-grams, scaled to unit L2 norm.
  SparseVector transform(std::span<const Token> doc) const;

  friend TfidfModel fit_tfidf(std::span<const TokenList> docs, std::size_t n_max, std::size_t min_df);

 private:
  std::unordered_map<std::string, std::size_t> vocabulary_;
  std::vector<std::string> terms_;
  std::vector<double> idf_;
  std::size_t n_max_ = 1;
  std::size_t document_count_ = 0;
};

/// Vocabulary of every 1..n_max-gram (space-joined, markers included),
/// indexed in lexicographic order; idf = ln((1 + N) / (1 + df)) + 1.
/// Terms found in fewer than min_df documents are left out.
TfidfModel fit_tfidf(std::span<const TokenList> docs, std::size_t n_max = 3, std::size_t min_df = 1);

SparseVector tfidf_vector(const TfidfModel& model, std::span<const Token> doc);

/// All n-grams of one document, in order of occurrence.
std::vector<std::string> ngrams(std::span<const Token> doc, std::size_t n_max);

FeatureMatrix tfidf_matrix(const TfidfModel& model, std::span<const TokenList> docs,
                           std::vector<std::string> row_ids);

// ------------------------------------------------------------- embeddings

struct EmbeddingChunk {
  std::size_t chunk_index = 0;
  std::vector<std::vector<float>> vectors;
  std::vector<bool> is_summary;
};

struct EmbeddingSet {
  std::size_t dimension = 0;
  std::map<std::string, std::vector<EmbeddingChunk>> by_patient;  // chunks sorted by chunk_index
};

/// JSON lines: {"patient_id", "chunk_index", "is_summary_row", "vectors"}.
EmbeddingSet load_embeddings(std::string_view jsonl);

enum class PoolingMode { cls, max };

/// cls: the flagged summary row; max: element-wise max over the other rows.
std::vector<double> pool_chunk(const EmbeddingChunk& chunk, PoolingMode mode);

/// One pooled vector per chunk.
std::vector<std::vector<double>> pool_embeddings(std::span<const EmbeddingChunk> chunks, PoolingMode mode);

/// Whole-document vector: mean of chunk summaries (cls) or max over all
/// non-summary rows of every chunk (max).
std::vector<double> pool_document(std::span<const EmbeddingChunk> chunks, PoolingMode mode);

// ------------------------------------------------------------------ audio

inline constexpr std::size_t kAudioDescriptorCount = 88;
inline constexpr std::size_t kAudioFeatureCount = kAudioDescriptorCount + 3;

struct AudioSegmentSet {
  // Per patient, segment descriptor vectors ordered by segment index.
  std::map<std::string, std::vector<std::vector<double>>> segments;
  std::vector<std::string> warnings;
};

/// CSV with header patient_id,segment_index,d0..d87.
AudioSegmentSet load_audio_segments(std::string_view csv);

/// Standardizes each descriptor across one patient's segments (population
/// sd). Constant descriptors become zeros and add a warning.
AudioSegmentSet znorm_per_patient(const AudioSegmentSet& audio);

struct SpeechRates {
  double speaking_rate = 0.0;        // words per elapsed second
  double articulation_rate = 0.0;    // letters per voiced second
  double hesitation_fraction = 0.0;  // gap time / elapsed time
};

/// Rates over the given turns' timed tokens; time between turns is not counted.
SpeechRates speech_rates(std::span<const Turn> turns);

/// Rates over the patient turns of a transcript.
SpeechRates speech_rates(const Transcript& transcript);

/// Median of the (already standardized) descriptors over segments, then the three rates.
std::vector<double> assemble_audio_features(std::span<const std::vector<double>> segments, const SpeechRates& rates);

std::vector<std::string> audio_feature_names();

// ---------------------------------------------------------- questionnaire

using TypeMap = std::map<std::string, ColumnKind, std::less<>>;

/// Sidecar "column,kind" lines (kind: numeric | categorical).
TypeMap load_type_map(std::string_view csv);

/// First column holds patient ids. Declared columns are enforced; other
/// columns are numeric when every non-empty cell parses, categorical otherwise.
FeatureMatrix load_questionnaire(std::string_view csv, const TypeMap& types = {});

}  // namespace pstyle
