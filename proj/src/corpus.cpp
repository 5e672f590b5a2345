#include "pstyle/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "pstyle/error.hpp"

namespace pstyle {

using nlohmann::json;

namespace {

constexpr std::string_view kStripChars = ".,!?;:()\"'";

bool is_strip_char(char c) { return kStripChars.find(c) != std::string_view::npos; }

bool is_sentence_final(char c) { return c == '.' || c == '!' || c == '?'; }

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// ASCII plus the Latin-1 supplement block, which covers Dutch diacritics.
std::string to_lower(std::string_view text) {
  std::string out(text);
  for (std::size_t i = 0; i < out.size(); ++i) {
    auto c = static_cast<unsigned char>(out[i]);
    if (c >= 'A' && c <= 'Z') {
      out[i] = static_cast<char>(c + 32);
    } else if (c == 0xC3 && i + 1 < out.size()) {
      auto next = static_cast<unsigned char>(out[i + 1]);
      if (next >= 0x80 && next <= 0x9E && next != 0x97) out[i + 1] = static_cast<char>(next + 32);
      ++i;
    }
  }
  return out;
}

std::vector<std::string_view> split_whitespace(std::string_view text) {
  std::vector<std::string_view> pieces;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) pieces.push_back(text.substr(start, i - start));
  }
  return pieces;
}

struct NormalizedPiece {
  std::optional<Token> token;
  bool ends_sentence = false;
};

NormalizedPiece normalize_piece(std::string_view raw) {
  NormalizedPiece result;
  std::string lowered = to_lower(raw);

  std::size_t first = 0;
  std::size_t last = lowered.size();
  while (first < last && is_strip_char(lowered[first])) ++first;
  while (last > first && is_strip_char(lowered[last - 1])) --last;
  for (std::size_t i = last; i < lowered.size(); ++i) {
    if (is_sentence_final(lowered[i])) result.ends_sentence = true;
  }
  if (first == last) {
    // Pure punctuation still closes a sentence.
    for (char c : lowered) {
      if (is_sentence_final(c)) result.ends_sentence = true;
    }
    return result;
  }

  std::string_view core(lowered.data() + first, last - first);
  if (core == kNameMarker || core == kLocationMarker || core == kSoundMarker) {
    result.token = Token{std::string(core), TokenKind::marker};
    return result;
  }

  std::string word;
  word.reserve(core.size());
  for (char c : core) {
    if (c == '\'' || !is_strip_char(c)) word.push_back(c);
  }
  result.token = Token{std::move(word), TokenKind::word};
  return result;
}

double parse_number(const json& value, const char* what) {
  if (!value.is_number()) throw SchemaError(std::string(what) + " must be a number");
  return value.get<double>();
}

std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t offset) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

double sample_sd(std::span<const double> values, double mean) {
  if (values.size() < 2) return 0.0;
  double acc = 0.0;
  for (double v : values) acc += (v - mean) * (v - mean);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

}  // namespace

std::string_view to_string(Role role) {
  switch (role) {
    case Role::interviewer:
      return "interviewer";
    case Role::patient:
      return "patient";
    case Role::noise:
      return "noise";
  }
  return "noise";
}

std::string_view to_string(PersonalityStyle style) {
  return style == PersonalityStyle::anaclitic ? "anaclitic" : "introjective";
}

Role parse_role(std::string_view text) {
  if (text == "interviewer") return Role::interviewer;
  if (text == "patient") return Role::patient;
  if (text == "noise") return Role::noise;
  throw SchemaError("unknown role '" + std::string(text) +
                    "' (expected interviewer, patient or noise)");
}

PersonalityStyle parse_style(std::string_view text) {
  if (text == "anaclitic") return PersonalityStyle::anaclitic;
  if (text == "introjective") return PersonalityStyle::introjective;
  throw SchemaError("unknown personality style '" + std::string(text) + "'");
}

TokenList tokenize(std::string_view text) {
  TokenList tokens;
  for (auto piece : split_whitespace(text)) {
    auto normalized = normalize_piece(piece);
    if (normalized.token) tokens.push_back(std::move(*normalized.token));
  }
  return tokens;
}

Turn make_turn(Role role, std::string text, const std::optional<std::vector<WordTiming>>& raw_timing,
               const ParseOptions& options) {
  Turn turn;
  turn.role = role;
  auto pieces = split_whitespace(text);
  if (raw_timing && raw_timing->size() != pieces.size()) {
    throw SchemaError("timing has " + std::to_string(raw_timing->size()) + " entries but text has " +
                      std::to_string(pieces.size()) + " whitespace tokens");
  }
  if (raw_timing) turn.timing.emplace();

  std::size_t sentence_start = 0;
  double previous_start = -1.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    auto normalized = normalize_piece(pieces[i]);
    if (normalized.token) {
      Token token = std::move(*normalized.token);
      if (token.is_word()) {
        auto it = options.replacements.find(token.text);
        if (it != options.replacements.end()) token.text = it->second;
      }
      turn.tokens.push_back(std::move(token));
      if (raw_timing) {
        const WordTiming& timing = (*raw_timing)[i];
        if (!(timing.start_s >= 0.0) || !(timing.end_s >= timing.start_s)) {
          throw SchemaError("timing entry " + std::to_string(i) + " must satisfy 0 <= start <= end");
        }
        if (timing.start_s < previous_start) {
          throw SchemaError("timing starts must be non-decreasing (entry " + std::to_string(i) + ")");
        }
        previous_start = timing.start_s;
        turn.timing->push_back(timing);
      }
    }
    if (normalized.ends_sentence && turn.tokens.size() > sentence_start) {
      turn.sentences.push_back({sentence_start, turn.tokens.size()});
      sentence_start = turn.tokens.size();
    }
  }
  if (turn.tokens.size() > sentence_start) turn.sentences.push_back({sentence_start, turn.tokens.size()});
  turn.raw_text = std::move(text);
  return turn;
}

Transcript parse_transcript(std::string_view document, const ParseOptions& options) {
  json root;
  try {
    root = json::parse(document);
  } catch (const json::parse_error& e) {
    auto [line, column] = line_and_column(document, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed transcript JSON", line, column);
  }
  if (!root.is_object()) throw SchemaError("transcript must be a JSON object");

  Transcript transcript;
  auto id = root.find("patient_id");
  if (id == root.end() || !id->is_string()) throw SchemaError("patient_id must be a string");
  transcript.patient_id = id->get<std::string>();

  auto label = root.find("label");
  if (label != root.end() && !label->is_null()) {
    if (!label->is_string()) throw SchemaError("label must be a string or null");
    transcript.label = parse_style(label->get<std::string>());
  }

  auto turns = root.find("turns");
  if (turns == root.end() || !turns->is_array()) throw SchemaError("turns must be an array");
  for (const auto& entry : *turns) {
    if (!entry.is_object()) throw SchemaError("each turn must be an object");
    auto role = entry.find("role");
    if (role == entry.end() || !role->is_string()) throw SchemaError("turn role must be a string");
    auto text = entry.find("text");
    if (text == entry.end() || !text->is_string()) throw SchemaError("turn text must be a string");

    std::optional<std::vector<WordTiming>> timing;
    auto raw_timing = entry.find("timing");
    if (raw_timing != entry.end() && !raw_timing->is_null()) {
      if (!raw_timing->is_array()) throw SchemaError("timing must be an array or null");
      timing.emplace();
      for (const auto& pair : *raw_timing) {
        if (!pair.is_array() || pair.size() != 2) throw SchemaError("timing entries must be [start_s, end_s]");
        timing->push_back({parse_number(pair[0], "timing start"), parse_number(pair[1], "timing end")});
      }
    }
    transcript.turns.push_back(
        make_turn(parse_role(role->get<std::string>()), text->get<std::string>(), timing, options));
  }
  return transcript;
}

std::string serialize_transcript(const Transcript& transcript) {
  json root;
  root["patient_id"] = transcript.patient_id;
  root["label"] = transcript.label ? json(std::string(to_string(*transcript.label))) : json(nullptr);
  root["turns"] = json::array();
  for (const auto& turn : transcript.turns) {
    json entry;
    entry["role"] = std::string(to_string(turn.role));
    bool raw_aligned = split_whitespace(turn.raw_text).size() == turn.tokens.size() &&
                       tokenize(turn.raw_text) == turn.tokens;
    if (raw_aligned) {
      entry["text"] = turn.raw_text;
    } else {
      // Rebuild a text whose pieces map one-to-one onto the tokens.
      std::string text;
      for (const auto& span : turn.sentences) {
        for (std::size_t i = span.begin; i < span.end; ++i) {
          if (!text.empty()) text.push_back(' ');
          text += turn.tokens[i].text;
        }
        text.push_back('.');
      }
      entry["text"] = text;
    }
    if (turn.timing) {
      json timing = json::array();
      for (const auto& t : *turn.timing) timing.push_back({t.start_s, t.end_s});
      entry["timing"] = timing;
    } else {
      entry["timing"] = nullptr;
    }
    root["turns"].push_back(entry);
  }
  return root.dump(1);
}

std::vector<Transcript> load_transcript_dir(const std::string& directory, const ParseOptions& options) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) throw DataError("transcript directory not found: " + directory);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<Transcript> corpus;
  corpus.reserve(files.size());
  for (const auto& file : files) {
    std::ifstream in(file, std::ios::binary);
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
      corpus.push_back(parse_transcript(buffer.str(), options));
    } catch (const DataError& e) {
      throw DataError(file.filename().string() + ": " + e.what());
    }
  }
  return corpus;
}

Transcript anonymize(const Transcript& transcript, const std::set<std::string>& names,
                     const std::set<std::string>& locations) {
  std::set<std::string> ambiguous;
  for (const auto& turn : transcript.turns) {
    for (const auto& token : turn.tokens) {
      if (token.is_word() && names.count(token.text) && locations.count(token.text)) {
        ambiguous.insert(token.text);
      }
    }
  }
  if (!ambiguous.empty()) {
    std::string listing;
    for (const auto& t : ambiguous) listing += (listing.empty() ? "" : ", ") + t;
    throw DataError("tokens listed as both name and location: " + listing);
  }

  Transcript out = transcript;
  for (auto& turn : out.turns) {
    for (auto& token : turn.tokens) {
      if (!token.is_word()) continue;
      if (names.count(token.text)) {
        token = Token{std::string(kNameMarker), TokenKind::marker};
      } else if (locations.count(token.text)) {
        token = Token{std::string(kLocationMarker), TokenKind::marker};
      }
    }
  }
  return out;
}

TokenList patient_tokens(const Transcript& transcript) {
  TokenList out;
  for (const auto& turn : transcript.turns) {
    if (turn.role == Role::patient) out.insert(out.end(), turn.tokens.begin(), turn.tokens.end());
  }
  return out;
}

std::vector<TokenList> chunk_by_answer(const Transcript& transcript) {
  std::vector<TokenList> chunks;
  for (const auto& turn : transcript.turns) {
    if (turn.role == Role::patient && !turn.tokens.empty()) chunks.push_back(turn.tokens);
  }
  return chunks;
}

std::vector<TokenList> chunk_by_window(std::span<const Token> tokens, std::size_t window) {
  if (window == 0) throw ConfigError("chunk window must be at least 1");
  std::vector<TokenList> chunks;
  for (std::size_t start = 0; start < tokens.size(); start += window) {
    auto count = std::min(window, tokens.size() - start);
    chunks.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(start),
                        tokens.begin() + static_cast<std::ptrdiff_t>(start + count));
  }
  return chunks;
}

AnswerLengthStats answer_length_stats(std::span<const Transcript> corpus) {
  if (corpus.empty()) throw DataError("answer length statistics need at least one transcript");
  AnswerLengthStats stats;
  for (const auto& transcript : corpus) {
    stats.per_patient.push_back({transcript.patient_id, transcript.label, patient_tokens(transcript).size()});
  }

  auto summarize = [&](std::string group, auto&& keep) {
    std::vector<double> values;
    for (const auto& entry : stats.per_patient) {
      if (keep(entry)) values.push_back(static_cast<double>(entry.tokens));
    }
    if (values.empty()) return;
    LengthGroupSummary summary;
    summary.group = std::move(group);
    summary.patients = values.size();
    summary.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    summary.sd = sample_sd(values, summary.mean);
    if (values.size() == 1) {
      stats.warnings.push_back("group '" + summary.group + "' has a single patient; sd reported as 0");
    }
    std::sort(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
      // Keep only the last point of a run of equal values.
      if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
      summary.ecdf.emplace_back(values[i], static_cast<double>(i + 1) / static_cast<double>(values.size()));
    }
    stats.groups.push_back(std::move(summary));
  };

  summarize("all", [](const auto&) { return true; });
  summarize("anaclitic", [](const auto& e) { return e.label == PersonalityStyle::anaclitic; });
  summarize("introjective", [](const auto& e) { return e.label == PersonalityStyle::introjective; });
  return stats;
}

}  // namespace pstyle
