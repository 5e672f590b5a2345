#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pstyle/corpus.hpp"

namespace pstyle {

// Closed-vocabulary dictionary: named categories plus literal and
// prefix-wildcard ("denk*") patterns, each mapping to one or more categories.
class CategoryLexicon {
 public:
  CategoryLexicon() = default;
  explicit CategoryLexicon(std::vector<std::string> categories);

  /// Adds a literal or wildcard pattern; repeated patterns merge category sets.
  void add_pattern(std::string_view pattern, std::span<const std::size_t> categories);

  const std::vector<std::string>& categories() const { return categories_; }
  std::size_t category_count() const { return categories_.size(); }
  std::size_t pattern_count() const { return literals_.size() + prefixes_.size(); }
  std::size_t index_of(std::string_view category) const;

  /// Sorted union of every matching literal and prefix pattern. Markers match nothing.
  std::vector<std::size_t> categories_of(const Token& token) const;

 private:
  std::vector<std::string> categories_;
  std::unordered_map<std::string, std::vector<std::size_t>> literals_;
  std::unordered_map<std::string, std::vector<std::size_t>> prefixes_;
  std::size_t longest_prefix_ = 0;
};

CategoryLexicon load_lexicon(std::string_view text);
CategoryLexicon load_lexicon_file(const std::string& path);

/// Absolute per-category match counts over word tokens.
std::vector<std::size_t> category_counts(const CategoryLexicon& lexicon, std::span<const Token> tokens);

/// Per-category fraction of word tokens; markers are excluded from both
/// numerator and denominator. Throws DataError when no word token remains.
std::vector<double> category_fractions(const CategoryLexicon& lexicon, std::span<const Token> tokens);

struct SentimentEntry {
  double polarity = 0.0;      // [-1, 1]
  double subjectivity = 0.0;  // [0, 1]
};

class SentimentLexicon {
 public:
  void add(std::string token, SentimentEntry entry);
  const SentimentEntry* find(std::string_view token) const;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, SentimentEntry, std::less<>> entries_;
};

SentimentLexicon load_sentiment_lexicon(std::string_view text);
SentimentLexicon load_sentiment_lexicon_file(const std::string& path);

struct SentimentScore {
  double polarity = 0.0;
  double subjectivity = 0.0;
};

SentimentScore sentence_sentiment(const SentimentLexicon& lexicon, std::span<const Token> sentence);

struct DocumentSentiment {
  double mean_polarity = 0.0;
  double sd_polarity = 0.0;
  double mean_subjectivity = 0.0;
  double sd_subjectivity = 0.0;
  std::vector<std::string> warnings;
};

/// Sample statistics over per-sentence scores. Throws DataError on no sentences.
DocumentSentiment document_sentiment(const SentimentLexicon& lexicon,
                                     std::span<const std::span<const Token>> sentences);

/// All patient-turn sentences of a transcript, in order.
std::vector<std::span<const Token>> patient_sentences(const Transcript& transcript);

// Ordered so that negative < neutral < positive.
enum class PolarityClass { negative = 0, neutral = 1, positive = 2 };

PolarityClass polarity_class(double polarity);
std::string_view to_string(PolarityClass c);

enum class PolarityMode { mean, most_polarized };

struct PolarityGrid {
  PersonalityStyle style = PersonalityStyle::anaclitic;
  // fractions[q][a]; rows and columns ordered positive, neutral, negative.
  std::array<std::array<double, 3>, 3> fractions{};
  std::array<std::size_t, 3> pairs_per_row{};
  // True for a question class without any answered pair (row left at zeros).
  std::array<bool, 3> empty_row{};
};

/// Grid row/column index for a class (positive 0, neutral 1, negative 2).
std::size_t grid_index(PolarityClass c);

/// Question/answer polarity transitions per personality style. A question is
/// an interviewer turn; its answer is the next patient turn before another
/// interviewer turn. Answers with fewer than min_sentences sentences are dropped.
std::vector<PolarityGrid> qa_polarity_grid(std::span<const Transcript> corpus, const SentimentLexicon& lexicon,
                                           PolarityMode mode, std::size_t min_sentences = 10);

/// Bundled toy dictionary and sentiment list (functional substitutes, not licensed data).
std::string_view toy_category_lexicon_text();
std::string_view toy_sentiment_lexicon_text();

}  // namespace pstyle
