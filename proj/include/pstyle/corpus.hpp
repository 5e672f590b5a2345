#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pstyle {

enum class Role { interviewer, patient, noise };

// Anaclitic is the positive class throughout evaluation.
enum class PersonalityStyle { anaclitic, introjective };

enum class TokenKind { word, marker };

std::string_view to_string(Role role);
std::string_view to_string(PersonalityStyle style);
Role parse_role(std::string_view text);
PersonalityStyle parse_style(std::string_view text);

inline constexpr std::string_view kNameMarker = "<name>";
inline constexpr std::string_view kLocationMarker = "<location>";
inline constexpr std::string_view kSoundMarker = "<sound>";

struct Token {
  std::string text;
  TokenKind kind = TokenKind::word;

  bool is_word() const { return kind == TokenKind::word; }
  bool operator==(const Token&) const = default;
};

using TokenList = std::vector<Token>;

struct WordTiming {
  double start_s = 0.0;
  double end_s = 0.0;

  bool operator==(const WordTiming&) const = default;
};

// Half-open token index range [begin, end).
struct SentenceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool operator==(const SentenceSpan&) const = default;
};

struct Turn {
  Role role = Role::noise;
  std::string raw_text;
  TokenList tokens;
  // Contiguous, non-overlapping, covering all tokens.
  std::vector<SentenceSpan> sentences;
  // One entry per token when present.
  std::optional<std::vector<WordTiming>> timing;

  std::span<const Token> sentence(std::size_t i) const {
    return std::span<const Token>(tokens).subspan(sentences[i].begin, sentences[i].size());
  }

  bool operator==(const Turn&) const = default;
};

struct Transcript {
  std::string patient_id;
  std::optional<PersonalityStyle> label;
  std::vector<Turn> turns;

  bool operator==(const Transcript&) const = default;
};

struct ParseOptions {
  // Dialect / number standardization: normalized word -> replacement word.
  std::map<std::string, std::string> replacements;
};

/// Lowercases, strips the punctuation set .,!?;:()"' (apostrophes survive
/// between letters), keeps hyphens, and recognizes the three marker tags.
TokenList tokenize(std::string_view text);

/// Splits a turn's text into tokens, sentence spans and, when raw timing
/// is supplied (one entry per whitespace piece), per-token timing.
Turn make_turn(Role role, std::string text,
               const std::optional<std::vector<WordTiming>>& raw_timing = std::nullopt,
               const ParseOptions& options = {});

/// Parses the JSON transcript format. Throws ParseError on malformed JSON
/// and SchemaError on schema violations.
Transcript parse_transcript(std::string_view document, const ParseOptions& options = {});

std::string serialize_transcript(const Transcript& transcript);

/// Loads every *.json file of a directory, sorted by file name.
std::vector<Transcript> load_transcript_dir(const std::string& directory,
                                            const ParseOptions& options = {});

Transcript anonymize(const Transcript& transcript, const std::set<std::string>& names,
                     const std::set<std::string>& locations);

TokenList patient_tokens(const Transcript& transcript);

std::vector<TokenList> chunk_by_answer(const Transcript& transcript);

/// Consecutive non-overlapping windows; the last one may be shorter.
/// Throws ConfigError when window == 0.
std::vector<TokenList> chunk_by_window(std::span<const Token> tokens, std::size_t window = 512);

struct LengthGroupSummary {
  std::string group;  // "all", "anaclitic" or "introjective"
  std::size_t patients = 0;
  double mean = 0.0;
  double sd = 0.0;  // sample (n-1)
  // Sorted (value, cumulative fraction) pairs.
  std::vector<std::pair<double, double>> ecdf;
};

struct AnswerLengthStats {
  struct Entry {
    std::string patient_id;
    std::optional<PersonalityStyle> label;
    std::size_t tokens = 0;
  };
  std::vector<Entry> per_patient;
  std::vector<LengthGroupSummary> groups;
  std::vector<std::string> warnings;
};

AnswerLengthStats answer_length_stats(std::span<const Transcript> corpus);

}  // namespace pstyle
