#include "pstyle/features.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "csv.hpp"
#include "json.hpp"
#include "pstyle/error.hpp"

namespace pstyle {

std::string_view to_string(ColumnKind kind) { return kind == ColumnKind::numeric ? "numeric" : "categorical"; }

std::string_view to_string(Provenance provenance) {
  switch (provenance) {
    case Provenance::questionnaire:
      return "questionnaire";
    case Provenance::tfidf:
      return "tfidf";
    case Provenance::liwc:
      return "liwc";
    case Provenance::sentiment:
      return "sentiment";
    case Provenance::embedding:
      return "embedding";
    case Provenance::audio:
      return "audio";
  }
  return "questionnaire";
}

// ---------------------------------------------------------------- matrix

FeatureMatrix::FeatureMatrix(std::vector<std::string> row_ids) : row_ids_(std::move(row_ids)) {}

void FeatureMatrix::add_column(Column column, std::vector<double> values) {
  if (values.size() != row_ids_.size()) {
    throw DataError("column '" + column.name + "' has " + std::to_string(values.size()) + " cells, expected " +
                    std::to_string(row_ids_.size()));
  }
  if (find_column(column.name)) throw DataError("duplicate column name '" + column.name + "'");
  for (double v : values) {
    if (is_missing(v)) continue;
    if (!std::isfinite(v)) throw DataError("column '" + column.name + "' holds a non-finite value");
    if (column.kind == ColumnKind::categorical &&
        (v < 0 || v != std::floor(v) || v >= static_cast<double>(column.levels.size()))) {
      throw DataError("column '" + column.name + "' holds an invalid level index");
    }
  }
  name_index_.emplace(column.name, columns_.size());
  columns_.push_back(std::move(column));
  values_.push_back(std::move(values));
}

std::optional<std::size_t> FeatureMatrix::find_column(std::string_view name) const {
  auto it = name_index_.find(std::string(name));
  if (it == name_index_.end()) return std::nullopt;
  return it->second;
}

FeatureMatrix FeatureMatrix::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::string> ids;
  ids.reserve(rows.size());
  for (auto r : rows) ids.push_back(row_ids_.at(r));
  FeatureMatrix out(std::move(ids));
  out.columns_ = columns_;
  out.name_index_ = name_index_;
  out.values_.resize(values_.size());
  for (std::size_t c = 0; c < values_.size(); ++c) {
    out.values_[c].reserve(rows.size());
    for (auto r : rows) out.values_[c].push_back(values_[c][r]);
  }
  return out;
}

bool FeatureMatrix::operator==(const FeatureMatrix& other) const {
  if (row_ids_ != other.row_ids_ || columns_.size() != other.columns_.size()) return false;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    const auto& a = columns_[c];
    const auto& b = other.columns_[c];
    if (a.name != b.name || a.kind != b.kind || a.provenance != b.provenance || a.levels != b.levels) return false;
    for (std::size_t r = 0; r < row_ids_.size(); ++r) {
      double x = values_[c][r];
      double y = other.values_[c][r];
      if (!(x == y || (is_missing(x) && is_missing(y)))) return false;
    }
  }
  return true;
}

FeatureMatrix concat_features(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.cols() == 0) return b;
  if (b.cols() == 0) return a;
  if (a.row_ids() != b.row_ids()) throw DataError("cannot concatenate matrices with different row ids");

  std::set<std::string> names_a;
  std::set<std::string> names_b;
  for (const auto& c : a.columns()) names_a.insert(c.name);
  for (const auto& c : b.columns()) names_b.insert(c.name);

  FeatureMatrix out(a.row_ids());
  auto append = [&](const FeatureMatrix& m, const std::set<std::string>& other_names) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      Column column = m.column(c);
      if (other_names.count(column.name)) column.name = std::string(to_string(column.provenance)) + ":" + column.name;
      auto values = m.values(c);
      out.add_column(std::move(column), std::vector<double>(values.begin(), values.end()));
    }
  };
  append(a, names_b);
  append(b, names_a);
  return out;
}

// ---------------------------------------------------------------- TF-IDF

double SparseVector::norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

std::vector<std::string> ngrams(std::span<const Token> doc, std::size_t n_max) {
  std::vector<std::string> out;
  for (std::size_t start = 0; start < doc.size(); ++start) {
    std::string gram;
    for (std::size_t n = 1; n <= n_max && start + n <= doc.size(); ++n) {
      if (n > 1) gram.push_back(' ');
      gram += doc[start + n - 1].text;
      out.push_back(gram);
    }
  }
  return out;
}

std::optional<std::size_t> TfidfModel::index_of(std::string_view term) const {
  auto it = vocabulary_.find(std::string(term));
  if (it == vocabulary_.end()) return std::nullopt;
  return it->second;
}

TfidfModel fit_tfidf(std::span<const TokenList> docs, std::size_t n_max, std::size_t min_df) {
  if (n_max == 0) throw ConfigError("n_max must be at least 1");
  bool any = std::any_of(docs.begin(), docs.end(), [](const TokenList& d) { return !d.empty(); });
  if (!any) throw DataError("TF-IDF needs at least one non-empty document");

  std::map<std::string, std::size_t> df;
  for (const auto& doc : docs) {
    auto grams = ngrams(doc, n_max);
    std::sort(grams.begin(), grams.end());
    grams.erase(std::unique(grams.begin(), grams.end()), grams.end());
    for (auto& g : grams) ++df[std::move(g)];
  }

  TfidfModel model;
  model.n_max_ = n_max;
  model.document_count_ = docs.size();
  auto n = static_cast<double>(docs.size());
  model.terms_.reserve(df.size());
  model.idf_.reserve(df.size());
  for (auto& [term, count] : df) {
    if (count < min_df) continue;
    model.vocabulary_.emplace(term, model.terms_.size());
    model.terms_.push_back(term);
    model.idf_.push_back(std::log((1.0 + n) / (1.0 + static_cast<double>(count))) + 1.0);
  }
  return model;
}

SparseVector TfidfModel::transform(std::span<const Token> doc) const {
  std::map<std::size_t, double> tf;
  for (const auto& gram : ngrams(doc, n_max_)) {
    auto it = vocabulary_.find(gram);
    if (it != vocabulary_.end()) tf[it->second] += 1.0;
  }
  SparseVector out;
  double sq = 0.0;
  for (const auto& [index, count] : tf) {
    double w = count * idf_[index];
    out.indices.push_back(index);
    out.values.push_back(w);
    sq += w * w;
  }
  if (sq > 0.0) {
    double inv = 1.0 / std::sqrt(sq);
    for (double& v : out.values) v *= inv;
  }
  return out;
}

SparseVector tfidf_vector(const TfidfModel& model, std::span<const Token> doc) { return model.transform(doc); }

FeatureMatrix tfidf_matrix(const TfidfModel& model, std::span<const TokenList> docs, std::vector<std::string> row_ids) {
  if (row_ids.size() != docs.size()) throw DataError("tfidf_matrix: one row id per document required");
  std::vector<std::vector<double>> dense(model.size(), std::vector<double>(docs.size(), 0.0));
  for (std::size_t d = 0; d < docs.size(); ++d) {
    auto v = model.transform(docs[d]);
    for (std::size_t i = 0; i < v.indices.size(); ++i) dense[v.indices[i]][d] = v.values[i];
  }
  FeatureMatrix out(std::move(row_ids));
  for (std::size_t j = 0; j < model.size(); ++j) {
    out.add_column({model.terms()[j], ColumnKind::numeric, Provenance::tfidf, {}}, std::move(dense[j]));
  }
  return out;
}

// ------------------------------------------------------------- embeddings

EmbeddingSet load_embeddings(std::string_view jsonl) {
  using nlohmann::json;
  EmbeddingSet set;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < jsonl.size()) {
    auto end = jsonl.find('\n', start);
    if (end == std::string_view::npos) end = jsonl.size();
    auto line = jsonl.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError("malformed embeddings record", line_no, e.byte);
    }
    try {
      EmbeddingChunk chunk;
      auto id = record.at("patient_id").get<std::string>();
      chunk.chunk_index = record.at("chunk_index").get<std::size_t>();
      chunk.is_summary = record.at("is_summary_row").get<std::vector<bool>>();
      chunk.vectors = record.at("vectors").get<std::vector<std::vector<float>>>();
      if (chunk.vectors.size() != chunk.is_summary.size()) {
        throw SchemaError("is_summary_row length differs from vectors length");
      }
      if (chunk.vectors.empty()) throw SchemaError("chunk without vectors");
      for (const auto& v : chunk.vectors) {
        if (set.dimension == 0) set.dimension = v.size();
        if (v.size() != set.dimension || v.empty()) throw SchemaError("embedding vectors must share one dimension");
      }
      auto& chunks = set.by_patient[id];
      for (const auto& existing : chunks) {
        if (existing.chunk_index == chunk.chunk_index) throw SchemaError("duplicate chunk index for " + id);
      }
      chunks.push_back(std::move(chunk));
    } catch (const json::exception& e) {
      throw SchemaError("embeddings line " + std::to_string(line_no) + ": " + e.what());
    } catch (const SchemaError& e) {
      throw SchemaError("embeddings line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (auto& [id, chunks] : set.by_patient) {
    std::sort(chunks.begin(), chunks.end(),
              [](const EmbeddingChunk& a, const EmbeddingChunk& b) { return a.chunk_index < b.chunk_index; });
  }
  return set;
}

std::vector<double> pool_chunk(const EmbeddingChunk& chunk, PoolingMode mode) {
  if (mode == PoolingMode::cls) {
    for (std::size_t i = 0; i < chunk.vectors.size(); ++i) {
      if (chunk.is_summary[i]) return {chunk.vectors[i].begin(), chunk.vectors[i].end()};
    }
    throw DataError("chunk " + std::to_string(chunk.chunk_index) + " has no summary row for cls pooling");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < chunk.vectors.size(); ++i) {
    if (chunk.is_summary[i]) continue;
    const auto& v = chunk.vectors[i];
    if (out.empty()) {
      out.assign(v.begin(), v.end());
    } else {
      for (std::size_t d = 0; d < v.size(); ++d) out[d] = std::max(out[d], static_cast<double>(v[d]));
    }
  }
  if (out.empty()) throw DataError("chunk " + std::to_string(chunk.chunk_index) + " has no token rows for max pooling");
  return out;
}

std::vector<std::vector<double>> pool_embeddings(std::span<const EmbeddingChunk> chunks, PoolingMode mode) {
  std::vector<std::vector<double>> out;
  out.reserve(chunks.size());
  for (const auto& chunk : chunks) out.push_back(pool_chunk(chunk, mode));
  return out;
}

std::vector<double> pool_document(std::span<const EmbeddingChunk> chunks, PoolingMode mode) {
  if (chunks.empty()) throw DataError("document without embedding chunks");
  auto pooled = pool_embeddings(chunks, mode);
  std::vector<double> out = pooled.front();
  for (std::size_t i = 1; i < pooled.size(); ++i) {
    for (std::size_t d = 0; d < out.size(); ++d) {
      out[d] = mode == PoolingMode::max ? std::max(out[d], pooled[i][d]) : out[d] + pooled[i][d];
    }
  }
  if (mode == PoolingMode::cls) {
    for (double& v : out) v /= static_cast<double>(pooled.size());
  }
  return out;
}

// ------------------------------------------------------------------ audio

AudioSegmentSet load_audio_segments(std::string_view text) {
  auto rows = csv::parse(text);
  if (rows.empty()) throw DataError("audio CSV is empty");
  const auto& header = rows.front();
  if (header.size() != 2 + kAudioDescriptorCount || header[0] != "patient_id" || header[1] != "segment_index") {
    throw SchemaError("audio CSV header must be patient_id,segment_index,d0..d87");
  }
  for (std::size_t d = 0; d < kAudioDescriptorCount; ++d) {
    if (header[2 + d] != "d" + std::to_string(d)) throw SchemaError("audio CSV header must be patient_id,segment_index,d0..d87");
  }

  std::map<std::string, std::map<long, std::vector<double>>> staged;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != header.size()) throw ParseError("ragged audio CSV row", r + 1, 1);
    double index = 0;
    if (!csv::parse_double(row[1], index) || index < 0 || index != std::floor(index)) {
      throw ParseError("segment_index must be a non-negative integer", r + 1, 1);
    }
    std::vector<double> descriptors(kAudioDescriptorCount);
    for (std::size_t d = 0; d < kAudioDescriptorCount; ++d) {
      if (!csv::parse_double(row[2 + d], descriptors[d]) || !std::isfinite(descriptors[d])) {
        throw ParseError("non-numeric audio descriptor", r + 1, 3 + d);
      }
    }
    if (!staged[row[0]].emplace(static_cast<long>(index), std::move(descriptors)).second) {
      throw DataError("duplicate segment " + row[1] + " for patient " + row[0]);
    }
  }
  AudioSegmentSet set;
  for (auto& [id, segments] : staged) {
    auto& out = set.segments[id];
    for (auto& [index, values] : segments) out.push_back(std::move(values));
  }
  return set;
}

AudioSegmentSet znorm_per_patient(const AudioSegmentSet& audio) {
  AudioSegmentSet out;
  out.warnings = audio.warnings;
  for (const auto& [id, segments] : audio.segments) {
    auto& normalized = out.segments[id];
    normalized = segments;
    if (segments.empty()) continue;
    std::size_t dims = segments.front().size();
    std::size_t constant = 0;
    for (std::size_t d = 0; d < dims; ++d) {
      double mean = 0.0;
      for (const auto& s : segments) mean += s[d];
      mean /= static_cast<double>(segments.size());
      double var = 0.0;
      for (const auto& s : segments) var += (s[d] - mean) * (s[d] - mean);
      var /= static_cast<double>(segments.size());
      double sd = std::sqrt(var);
      bool flat = !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
      if (flat) ++constant;
      for (auto& s : normalized) s[d] = flat ? 0.0 : (s[d] - mean) / sd;
    }
    if (constant > 0) {
      out.warnings.push_back("patient " + id + ": " + std::to_string(constant) +
                             " zero-variance descriptor(s) set to 0");
    }
  }
  return out;
}

namespace {

std::size_t letter_count(std::string_view word) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < word.size(); ++i) {
    auto c = static_cast<unsigned char>(word[i]);
    if (std::isalpha(c)) {
      ++n;
    } else if (c >= 0xC0) {
      ++n;  // lead byte of a multi-byte letter
    }
  }
  return n;
}

}  // namespace

SpeechRates speech_rates(std::span<const Turn> turns) {
  double elapsed = 0.0;
  double voiced = 0.0;
  std::size_t words = 0;
  std::size_t letters = 0;
  for (const auto& turn : turns) {
    if (turn.tokens.empty()) continue;
    if (!turn.timing) throw DataError("speech rates need word timing for every token");
    const auto& timing = *turn.timing;
    double first = timing.front().start_s;
    double last = first;
    for (std::size_t i = 0; i < turn.tokens.size(); ++i) {
      last = std::max(last, timing[i].end_s);
      if (!turn.tokens[i].is_word()) continue;
      ++words;
      letters += letter_count(turn.tokens[i].text);
      voiced += timing[i].end_s - timing[i].start_s;
    }
    elapsed += last - first;
  }
  if (!(elapsed > 0.0)) throw DataError("speech rates need a positive total speaking time");
  SpeechRates rates;
  rates.speaking_rate = static_cast<double>(words) / elapsed;
  rates.articulation_rate = voiced > 0.0 ? static_cast<double>(letters) / voiced : 0.0;
  rates.hesitation_fraction = std::clamp((elapsed - voiced) / elapsed, 0.0, 1.0);
  return rates;
}

SpeechRates speech_rates(const Transcript& transcript) {
  std::vector<Turn> patient;
  for (const auto& turn : transcript.turns) {
    if (turn.role == Role::patient) patient.push_back(turn);
  }
  return speech_rates(patient);
}

std::vector<double> assemble_audio_features(std::span<const std::vector<double>> segments, const SpeechRates& rates) {
  if (segments.empty()) throw DataError("audio features need at least one segment");
  for (const auto& s : segments) {
    if (s.size() != kAudioDescriptorCount) throw DataError("audio segment must hold 88 descriptors");
  }
  // Median over segments: the per-patient mean of standardized descriptors is identically zero.
  std::vector<double> row(kAudioDescriptorCount, 0.0);
  std::vector<double> column(segments.size());
  for (std::size_t d = 0; d < kAudioDescriptorCount; ++d) {
    for (std::size_t i = 0; i < segments.size(); ++i) column[i] = segments[i][d];
    std::sort(column.begin(), column.end());
    auto mid = column.size() / 2;
    row[d] = column.size() % 2 ? column[mid] : 0.5 * (column[mid - 1] + column[mid]);
  }
  row.push_back(rates.speaking_rate);
  row.push_back(rates.articulation_rate);
  row.push_back(rates.hesitation_fraction);
  return row;
}

std::vector<std::string> audio_feature_names() {
  std::vector<std::string> names;
  for (std::size_t d = 0; d < kAudioDescriptorCount; ++d) names.push_back("d" + std::to_string(d));
  names.emplace_back("speaking_rate");
  names.emplace_back("articulation_rate");
  names.emplace_back("hesitation_fraction");
  return names;
}

// ---------------------------------------------------------- questionnaire

TypeMap load_type_map(std::string_view text) {
  TypeMap types;
  auto rows = csv::parse(text);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != 2) throw ParseError("type map rows must be column,kind", r + 1, 1);
    if (r == 0 && row[0] == "column" && row[1] == "kind") continue;
    if (row[1] == "numeric") {
      types[row[0]] = ColumnKind::numeric;
    } else if (row[1] == "categorical") {
      types[row[0]] = ColumnKind::categorical;
    } else {
      throw ParseError("unknown column kind '" + row[1] + "'", r + 1, row[0].size() + 2);
    }
  }
  return types;
}

FeatureMatrix load_questionnaire(std::string_view text, const TypeMap& types) {
  auto rows = csv::parse(text);
  if (rows.empty()) throw DataError("questionnaire CSV is empty");
  const auto& header = rows.front();
  if (header.size() < 1) throw DataError("questionnaire CSV needs a patient id column");

  std::vector<std::string> ids;
  std::set<std::string> seen;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != header.size()) throw ParseError("ragged questionnaire row", r + 1, 1);
    if (!seen.insert(rows[r][0]).second) throw DataError("duplicate patient id '" + rows[r][0] + "'");
    ids.push_back(rows[r][0]);
  }

  FeatureMatrix matrix(ids);
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& name = header[c];
    std::optional<ColumnKind> kind;
    if (auto it = types.find(name); it != types.end()) kind = it->second;

    if (!kind) {
      kind = ColumnKind::numeric;
      double tmp = 0;
      for (std::size_t r = 1; r < rows.size(); ++r) {
        if (!rows[r][c].empty() && !csv::parse_double(rows[r][c], tmp)) kind = ColumnKind::categorical;
      }
    }

    std::vector<double> values;
    values.reserve(ids.size());
    Column column{name, *kind, Provenance::questionnaire, {}};
    if (*kind == ColumnKind::numeric) {
      for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cell = rows[r][c];
        double v = kMissing;
        if (!cell.empty() && !csv::parse_double(cell, v)) {
          throw DataError("column '" + name + "' row " + std::to_string(r + 1) + ": '" + cell + "' is not numeric");
        }
        values.push_back(v);
      }
    } else {
      std::set<std::string> levels;
      for (std::size_t r = 1; r < rows.size(); ++r) {
        if (!rows[r][c].empty()) levels.insert(rows[r][c]);
      }
      column.levels.assign(levels.begin(), levels.end());
      for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& cell = rows[r][c];
        if (cell.empty()) {
          values.push_back(kMissing);
        } else {
          auto pos = std::lower_bound(column.levels.begin(), column.levels.end(), cell) - column.levels.begin();
          values.push_back(static_cast<double>(pos));
        }
      }
    }
    matrix.add_column(std::move(column), std::move(values));
  }
  return matrix;
}

}  // namespace pstyle
