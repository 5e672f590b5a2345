#include "pstyle/lexicon.hpp"

#include <algorithm>
#include <cmath>

#include "pstyle/error.hpp"
#include "pstyle/util.hpp"

namespace pstyle {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_any(std::string_view s, std::string_view delims) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find_first_of(delims, start);
    if (end == std::string_view::npos) end = s.size();
    auto part = trim(s.substr(start, end - start));
    if (!part.empty()) parts.push_back(part);
    start = end + 1;
  }
  return parts;
}

void merge_into(std::vector<std::size_t>& target, std::span<const std::size_t> extra) {
  target.insert(target.end(), extra.begin(), extra.end());
  std::sort(target.begin(), target.end());
  target.erase(std::unique(target.begin(), target.end()), target.end());
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v, double mean) {
  if (v.size() < 2) return 0.0;
  double acc = 0.0;
  for (double x : v) acc += (x - mean) * (x - mean);
  return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

}  // namespace

CategoryLexicon::CategoryLexicon(std::vector<std::string> categories) : categories_(std::move(categories)) {
  auto sorted = categories_;
  std::sort(sorted.begin(), sorted.end());
  auto dup = std::adjacent_find(sorted.begin(), sorted.end());
  if (dup != sorted.end()) throw DataError("duplicate category name '" + *dup + "'");
}

void CategoryLexicon::add_pattern(std::string_view pattern, std::span<const std::size_t> categories) {
  for (auto c : categories) {
    if (c >= categories_.size()) throw DataError("pattern '" + std::string(pattern) + "' references unknown category");
  }
  if (pattern.empty() || pattern == "*") throw DataError("empty lexicon pattern");
  if (pattern.back() == '*') {
    std::string prefix(pattern.substr(0, pattern.size() - 1));
    longest_prefix_ = std::max(longest_prefix_, prefix.size());
    merge_into(prefixes_[prefix], categories);
  } else {
    merge_into(literals_[std::string(pattern)], categories);
  }
}

std::size_t CategoryLexicon::index_of(std::string_view category) const {
  auto it = std::find(categories_.begin(), categories_.end(), category);
  if (it == categories_.end()) throw DataError("unknown category '" + std::string(category) + "'");
  return static_cast<std::size_t>(it - categories_.begin());
}

std::vector<std::size_t> CategoryLexicon::categories_of(const Token& token) const {
  std::vector<std::size_t> out;
  if (!token.is_word()) return out;
  if (auto it = literals_.find(token.text); it != literals_.end()) out = it->second;
  auto limit = std::min(longest_prefix_, token.text.size());
  for (std::size_t len = 1; len <= limit; ++len) {
    auto it = prefixes_.find(token.text.substr(0, len));
    if (it != prefixes_.end()) out.insert(out.end(), it->second.begin(), it->second.end());
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

CategoryLexicon load_lexicon(std::string_view text) {
  auto lines = split_lines(text);
  std::size_t i = 0;
  auto skip_blank = [&] {
    while (i < lines.size() && trim(lines[i]).empty()) ++i;
  };

  skip_blank();
  // The conventional dictionary layout opens the header with its own '%' line.
  if (i < lines.size() && trim(lines[i]) == "%") {
    ++i;
  }

  std::vector<std::string> names;
  std::map<std::string, std::size_t, std::less<>> id_to_index;
  bool terminated = false;
  for (; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty()) continue;
    if (line == "%") {
      terminated = true;
      ++i;
      break;
    }
    auto parts = split_any(line, "\t ");
    if (parts.size() != 2) throw ParseError("expected 'index<TAB>category' header line", i + 1, 1);
    if (!id_to_index.emplace(std::string(parts[0]), names.size()).second) {
      throw ParseError("duplicate category id '" + std::string(parts[0]) + "'", i + 1, 1);
    }
    names.emplace_back(parts[1]);
  }
  if (!terminated) throw ParseError("category header is not terminated by a '%' line", lines.size(), 1);
  if (names.empty()) throw DataError("lexicon declares no categories");

  CategoryLexicon lexicon(std::move(names));
  for (; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty()) continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) throw ParseError("expected 'pattern<TAB>index[,index...]'", i + 1, 1);
    auto pattern = trim(line.substr(0, tab));
    std::vector<std::size_t> categories;
    for (auto id : split_any(line.substr(tab + 1), ",\t ")) {
      auto it = id_to_index.find(id);
      if (it == id_to_index.end()) {
        throw ParseError("unknown category id '" + std::string(id) + "'", i + 1, tab + 2);
      }
      categories.push_back(it->second);
    }
    if (categories.empty()) throw ParseError("pattern without categories", i + 1, tab + 2);
    std::string lowered(pattern);
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    lexicon.add_pattern(lowered, categories);
  }
  return lexicon;
}

CategoryLexicon load_lexicon_file(const std::string& path) { return load_lexicon(read_file(path)); }

std::vector<std::size_t> category_counts(const CategoryLexicon& lexicon, std::span<const Token> tokens) {
  std::vector<std::size_t> counts(lexicon.category_count(), 0);
  for (const auto& token : tokens) {
    for (auto c : lexicon.categories_of(token)) ++counts[c];
  }
  return counts;
}

std::vector<double> category_fractions(const CategoryLexicon& lexicon, std::span<const Token> tokens) {
  auto words = static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return t.is_word(); }));
  if (words == 0) throw DataError("category fractions need at least one word token");
  auto counts = category_counts(lexicon, tokens);
  std::vector<double> fractions(counts.size());
  for (std::size_t c = 0; c < counts.size(); ++c) {
    fractions[c] = static_cast<double>(counts[c]) / static_cast<double>(words);
  }
  return fractions;
}

void SentimentLexicon::add(std::string token, SentimentEntry entry) {
  if (!(entry.polarity >= -1.0 && entry.polarity <= 1.0)) {
    throw DataError("polarity of '" + token + "' outside [-1, 1]");
  }
  if (!(entry.subjectivity >= 0.0 && entry.subjectivity <= 1.0)) {
    throw DataError("subjectivity of '" + token + "' outside [0, 1]");
  }
  entries_[std::move(token)] = entry;
}

const SentimentEntry* SentimentLexicon::find(std::string_view token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

SentimentLexicon load_sentiment_lexicon(std::string_view text) {
  SentimentLexicon lexicon;
  auto lines = split_lines(text);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty() || line.front() == '#') continue;
    auto parts = split_any(line, "\t");
    if (parts.size() != 3) throw ParseError("expected 'token<TAB>polarity<TAB>subjectivity'", i + 1, 1);
    SentimentEntry entry;
    try {
      entry.polarity = std::stod(std::string(parts[1]));
      entry.subjectivity = std::stod(std::string(parts[2]));
    } catch (const std::exception&) {
      throw ParseError("non-numeric sentiment value", i + 1, 1);
    }
    lexicon.add(std::string(parts[0]), entry);
  }
  return lexicon;
}

SentimentLexicon load_sentiment_lexicon_file(const std::string& path) {
  return load_sentiment_lexicon(read_file(path));
}

SentimentScore sentence_sentiment(const SentimentLexicon& lexicon, std::span<const Token> sentence) {
  double polarity = 0.0;
  double subjectivity = 0.0;
  std::size_t hits = 0;
  for (const auto& token : sentence) {
    if (!token.is_word()) continue;
    if (const auto* entry = lexicon.find(token.text)) {
      polarity += entry->polarity;
      subjectivity += entry->subjectivity;
      ++hits;
    }
  }
  if (hits == 0) return {};
  auto n = static_cast<double>(hits);
  return {std::clamp(polarity / n, -1.0, 1.0), std::clamp(subjectivity / n, 0.0, 1.0)};
}

DocumentSentiment document_sentiment(const SentimentLexicon& lexicon,
                                     std::span<const std::span<const Token>> sentences) {
  if (sentences.empty()) throw DataError("document sentiment needs at least one sentence");
  std::vector<double> polarity;
  std::vector<double> subjectivity;
  for (auto sentence : sentences) {
    auto score = sentence_sentiment(lexicon, sentence);
    polarity.push_back(score.polarity);
    subjectivity.push_back(score.subjectivity);
  }
  DocumentSentiment out;
  out.mean_polarity = mean_of(polarity);
  out.sd_polarity = sample_sd(polarity, out.mean_polarity);
  out.mean_subjectivity = mean_of(subjectivity);
  out.sd_subjectivity = sample_sd(subjectivity, out.mean_subjectivity);
  if (sentences.size() == 1) out.warnings.push_back("single sentence; standard deviations reported as 0");
  return out;
}

std::vector<std::span<const Token>> patient_sentences(const Transcript& transcript) {
  std::vector<std::span<const Token>> out;
  for (const auto& turn : transcript.turns) {
    if (turn.role != Role::patient) continue;
    for (std::size_t s = 0; s < turn.sentences.size(); ++s) out.push_back(turn.sentence(s));
  }
  return out;
}

PolarityClass polarity_class(double polarity) {
  if (polarity > 0.3) return PolarityClass::positive;
  if (polarity < -0.3) return PolarityClass::negative;
  return PolarityClass::neutral;
}

std::string_view to_string(PolarityClass c) {
  switch (c) {
    case PolarityClass::positive:
      return "positive";
    case PolarityClass::neutral:
      return "neutral";
    case PolarityClass::negative:
      return "negative";
  }
  return "neutral";
}

std::size_t grid_index(PolarityClass c) {
  switch (c) {
    case PolarityClass::positive:
      return 0;
    case PolarityClass::neutral:
      return 1;
    case PolarityClass::negative:
      return 2;
  }
  return 1;
}

namespace {

double turn_polarity(const Turn& turn, const SentimentLexicon& lexicon, PolarityMode mode) {
  double best = 0.0;
  double sum = 0.0;
  for (std::size_t s = 0; s < turn.sentences.size(); ++s) {
    double p = sentence_sentiment(lexicon, turn.sentence(s)).polarity;
    sum += p;
    if (std::abs(p) > std::abs(best)) best = p;
  }
  if (mode == PolarityMode::most_polarized) return best;
  return sum / static_cast<double>(turn.sentences.size());
}

}  // namespace

std::vector<PolarityGrid> qa_polarity_grid(std::span<const Transcript> corpus, const SentimentLexicon& lexicon,
                                           PolarityMode mode, std::size_t min_sentences) {
  std::array<std::array<std::array<std::size_t, 3>, 3>, 2> counts{};
  for (const auto& transcript : corpus) {
    if (!transcript.label) continue;
    auto style = static_cast<std::size_t>(*transcript.label);
    const Turn* question = nullptr;
    for (const auto& turn : transcript.turns) {
      if (turn.role == Role::interviewer) {
        question = turn.sentences.empty() ? nullptr : &turn;
      } else if (turn.role == Role::patient && question != nullptr) {
        if (turn.sentences.size() >= min_sentences && !turn.sentences.empty()) {
          auto q = grid_index(polarity_class(turn_polarity(*question, lexicon, mode)));
          auto a = grid_index(polarity_class(turn_polarity(turn, lexicon, mode)));
          ++counts[style][q][a];
        }
        question = nullptr;
      }
    }
  }

  std::vector<PolarityGrid> grids;
  for (std::size_t style = 0; style < 2; ++style) {
    PolarityGrid grid;
    grid.style = static_cast<PersonalityStyle>(style);
    for (std::size_t q = 0; q < 3; ++q) {
      std::size_t total = counts[style][q][0] + counts[style][q][1] + counts[style][q][2];
      grid.pairs_per_row[q] = total;
      grid.empty_row[q] = total == 0;
      for (std::size_t a = 0; a < 3 && total > 0; ++a) {
        grid.fractions[q][a] = static_cast<double>(counts[style][q][a]) / static_cast<double>(total);
      }
    }
    grids.push_back(grid);
  }
  return grids;
}

}  // namespace pstyle
