#include "pstyle/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>

#include "csv.hpp"
#include "pstyle/error.hpp"
#include "pstyle/lexicon.hpp"
#include "pstyle/util.hpp"

namespace pstyle {

namespace {

FeatureMatrix with_row_ids(const FeatureMatrix& m, const std::vector<std::string>& ids) {
  FeatureMatrix out(ids);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    auto values = m.values(c);
    out.add_column(m.column(c), std::vector<double>(values.begin(), values.end()));
  }
  return out;
}

// Column-wise union of document-level sources.
class ConcatSource : public eval::FeatureSource {
 public:
  ConcatSource(std::vector<std::unique_ptr<eval::FeatureSource>> parts, std::vector<std::string> ids)
      : parts_(std::move(parts)), ids_(std::move(ids)) {}

  std::size_t documents() const override { return ids_.size(); }

  std::shared_ptr<const eval::FoldFeatures> build(std::span<const std::size_t> train_docs) const override {
    FeatureMatrix combined(ids_);
    for (const auto& part : parts_) {
      auto rows = part->build(train_docs);
      for (std::size_t r = 0; r < rows->row_document.size(); ++r) {
        if (rows->row_document[r] != r) throw ConfigError("chunked feature sets cannot be combined");
      }
      combined = concat_features(combined, with_row_ids(rows->matrix, ids_));
    }
    std::vector<std::size_t> identity(ids_.size());
    for (std::size_t i = 0; i < identity.size(); ++i) identity[i] = i;
    return std::make_shared<const eval::FoldFeatures>(eval::FoldFeatures{std::move(combined), std::move(identity)});
  }

 private:
  std::vector<std::unique_ptr<eval::FeatureSource>> parts_;
  std::vector<std::string> ids_;
};

std::map<std::string, int> read_labels(const std::string& path) {
  auto rows = csv::parse(read_file(path));
  if (rows.empty() || rows[0].size() < 2 || rows[0][0] != "patient_id" || rows[0][1] != "label") {
    throw SchemaError("labels CSV must start with the header patient_id,label");
  }
  std::map<std::string, int> labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) throw ParseError("ragged labels CSV row", r + 1, 1);
    int label = parse_style(rows[r][1]) == PersonalityStyle::anaclitic ? 1 : 0;
    if (!labels.emplace(rows[r][0], label).second) throw DataError("duplicate patient " + rows[r][0] + " in labels CSV");
  }
  return labels;
}

const Transcript& require_transcripts(const Dataset& data, std::size_t i) {
  if (data.transcripts.size() != data.patient_ids.size()) throw ConfigError("this feature set needs transcripts_dir");
  return data.transcripts[i];
}

std::string cell_file_name(const std::string& fs, const std::string& model, const std::string& balance) {
  return "runs/" + fs + "__" + model + "__" + balance + ".jsonl";
}

void append_prefixed(std::map<std::string, std::string>& out, const ExperimentConfig& config,
                     const std::string& prefix) {
  auto text = emit_config(config);
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    auto line = text.substr(start, end - start);
    start = end + 1;
    if (line.rfind(prefix, 0) != 0) continue;
    auto eq = line.find(" = ");
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
}

}  // namespace

std::vector<PersonalityStyle> Dataset::styles() const {
  std::vector<PersonalityStyle> out;
  for (int y : labels) out.push_back(y == 1 ? PersonalityStyle::anaclitic : PersonalityStyle::introjective);
  return out;
}

Dataset load_dataset(const ExperimentConfig& config) {
  Dataset data;
  std::map<std::string, int> csv_labels;
  if (!config.labels_csv.empty()) csv_labels = read_labels(config.labels_csv);

  if (!config.transcripts_dir.empty()) {
    auto corpus = load_transcript_dir(config.transcripts_dir);
    if (corpus.empty()) throw DataError("no transcripts found in " + config.transcripts_dir);
    std::sort(corpus.begin(), corpus.end(),
              [](const Transcript& a, const Transcript& b) { return a.patient_id < b.patient_id; });
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      auto& t = corpus[i];
      if (i > 0 && corpus[i - 1].patient_id == t.patient_id) {
        throw DataError("duplicate patient id " + t.patient_id + " in transcripts");
      }
      auto it = csv_labels.find(t.patient_id);
      if (it != csv_labels.end()) {
        t.label = it->second == 1 ? PersonalityStyle::anaclitic : PersonalityStyle::introjective;
      } else if (!csv_labels.empty()) {
        throw DataError("patient " + t.patient_id + " is missing from the labels CSV");
      }
      if (!t.label) throw DataError("patient " + t.patient_id + " has no label");
      data.patient_ids.push_back(t.patient_id);
      data.labels.push_back(*t.label == PersonalityStyle::anaclitic ? 1 : 0);
    }
    data.transcripts = std::move(corpus);
  } else if (!csv_labels.empty()) {
    for (const auto& [id, label] : csv_labels) {
      data.patient_ids.push_back(id);
      data.labels.push_back(label);
    }
  } else {
    throw ConfigError("either transcripts_dir or labels_csv must be set");
  }
  return data;
}

void check_inputs(const ExperimentConfig& config, const std::string& feature_set) {
  auto need = [&](const std::string& value, const char* key, const std::string& part) {
    if (value.empty()) throw ConfigError("feature set '" + part + "' needs " + key);
  };
  for (const auto& part : feature_set_parts(feature_set)) {
    if (part == "questionnaire") need(config.questionnaire_csv, "questionnaire_csv", part);
    if (part == "tfidf" || part == "liwc" || part == "psychological" || part == "audio") {
      need(config.transcripts_dir, "transcripts_dir", part);
    }
    if (part == "liwc" || part == "psychological") need(config.lexicon, "lexicon", part);
    if (part == "psychological") need(config.sentiment_lexicon, "sentiment_lexicon", part);
    if (part == "embedding_cls" || part == "embedding_max") need(config.embeddings_jsonl, "embeddings_jsonl", part);
    if (part == "audio") need(config.audio_csv, "audio_csv", part);
  }
  auto mode = resolved_chunk_mode(config, feature_set);
  auto parts = feature_set_parts(feature_set);
  if (mode == "none") return;
  if (parts.size() > 1) throw ConfigError("chunk_mode " + mode + " cannot be used with combined feature set " + feature_set);
  const auto& p = parts.front();
  bool ok = p == "tfidf" || (mode == "window512" && (p == "embedding_cls" || p == "embedding_max"));
  if (!ok) throw ConfigError("chunk_mode " + mode + " is not available for feature set " + p);
}

std::string resolved_chunk_mode(const ExperimentConfig& config, const std::string& feature_set) {
  if (config.chunk_mode != "auto") return config.chunk_mode;
  auto parts = feature_set_parts(feature_set);
  if (parts.size() != 1) return "none";
  if (parts.front() == "tfidf") return "per_answer";
  if (parts.front() == "embedding_cls" || parts.front() == "embedding_max") return "window512";
  return "none";
}

FeatureMatrix liwc_features(const Dataset& data, const CategoryLexicon& lexicon) {
  FeatureMatrix m(data.patient_ids);
  std::vector<std::vector<double>> columns(lexicon.category_count(), std::vector<double>(data.patient_ids.size()));
  for (std::size_t i = 0; i < data.patient_ids.size(); ++i) {
    auto fractions = category_fractions(lexicon, patient_tokens(require_transcripts(data, i)));
    for (std::size_t c = 0; c < fractions.size(); ++c) columns[c][i] = fractions[c];
  }
  for (std::size_t c = 0; c < columns.size(); ++c) {
    m.add_column({lexicon.categories()[c], ColumnKind::numeric, Provenance::liwc, {}}, std::move(columns[c]));
  }
  return m;
}

FeatureMatrix sentiment_features(const Dataset& data, const SentimentLexicon& lexicon) {
  std::size_t n = data.patient_ids.size();
  std::vector<double> mp(n), sp(n), ms(n), ss(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto sentences = patient_sentences(require_transcripts(data, i));
    auto doc = document_sentiment(lexicon, sentences);
    mp[i] = doc.mean_polarity;
    sp[i] = doc.sd_polarity;
    ms[i] = doc.mean_subjectivity;
    ss[i] = doc.sd_subjectivity;
  }
  FeatureMatrix m(data.patient_ids);
  m.add_column({"polarity_mean", ColumnKind::numeric, Provenance::sentiment, {}}, mp);
  m.add_column({"polarity_sd", ColumnKind::numeric, Provenance::sentiment, {}}, sp);
  m.add_column({"subjectivity_mean", ColumnKind::numeric, Provenance::sentiment, {}}, ms);
  m.add_column({"subjectivity_sd", ColumnKind::numeric, Provenance::sentiment, {}}, ss);
  return m;
}

FeatureMatrix audio_features(const Dataset& data, const AudioSegmentSet& audio) {
  auto normalized = znorm_per_patient(audio);
  auto names = audio_feature_names();
  std::size_t n = data.patient_ids.size();
  std::vector<std::vector<double>> columns(names.size(), std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    auto it = normalized.segments.find(data.patient_ids[i]);
    if (it == normalized.segments.end()) throw DataError("no audio segments for patient " + data.patient_ids[i]);
    auto features = assemble_audio_features(it->second, speech_rates(require_transcripts(data, i)));
    for (std::size_t c = 0; c < features.size(); ++c) columns[c][i] = features[c];
  }
  FeatureMatrix m(data.patient_ids);
  for (std::size_t c = 0; c < names.size(); ++c) {
    m.add_column({names[c], ColumnKind::numeric, Provenance::audio, {}}, std::move(columns[c]));
  }
  return m;
}

FeatureMatrix questionnaire_features(const Dataset& data, const FeatureMatrix& questionnaire) {
  std::map<std::string, std::size_t> row_of;
  for (std::size_t r = 0; r < questionnaire.rows(); ++r) row_of[questionnaire.row_ids()[r]] = r;
  std::vector<std::size_t> rows;
  for (const auto& id : data.patient_ids) {
    auto it = row_of.find(id);
    if (it == row_of.end()) throw DataError("patient " + id + " is missing from the questionnaire");
    rows.push_back(it->second);
  }
  return questionnaire.select_rows(rows);
}

std::unique_ptr<eval::FeatureSource> build_feature_source(const ExperimentConfig& config, const Dataset& data,
                                                          const std::string& feature_set) {
  check_inputs(config, feature_set);
  auto mode = resolved_chunk_mode(config, feature_set);
  auto parts = feature_set_parts(feature_set);
  std::size_t n = data.patient_ids.size();
  std::vector<std::unique_ptr<eval::FeatureSource>> sources;
  for (const auto& part : parts) {
    if (part == "questionnaire") {
      TypeMap types;
      if (!config.questionnaire_types.empty()) types = load_type_map(read_file(config.questionnaire_types));
      auto q = load_questionnaire(read_file(config.questionnaire_csv), types);
      sources.push_back(std::make_unique<eval::StaticSource>(questionnaire_features(data, q)));
    } else if (part == "liwc") {
      auto lexicon = load_lexicon_file(config.lexicon);
      sources.push_back(std::make_unique<eval::StaticSource>(liwc_features(data, lexicon)));
    } else if (part == "psychological") {
      auto lexicon = load_lexicon_file(config.lexicon);
      auto sentiment = load_sentiment_lexicon_file(config.sentiment_lexicon);
      sources.push_back(std::make_unique<eval::StaticSource>(
          concat_features(liwc_features(data, lexicon), sentiment_features(data, sentiment))));
    } else if (part == "audio") {
      auto audio = load_audio_segments(read_file(config.audio_csv));
      sources.push_back(std::make_unique<eval::StaticSource>(audio_features(data, audio)));
    } else if (part == "tfidf") {
      std::vector<TokenList> texts;
      std::vector<std::size_t> row_document;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& t = require_transcripts(data, i);
        std::vector<TokenList> chunks;
        if (mode == "per_answer") {
          chunks = chunk_by_answer(t);
        } else if (mode == "window512") {
          chunks = chunk_by_window(patient_tokens(t), 512);
        } else {
          chunks.push_back(patient_tokens(t));
        }
        if (chunks.empty() || chunks.front().empty()) throw DataError("patient " + data.patient_ids[i] + " has no answer text");
        for (auto& c : chunks) {
          texts.push_back(std::move(c));
          row_document.push_back(i);
        }
      }
      sources.push_back(
          std::make_unique<eval::TfidfSource>(std::move(texts), std::move(row_document), n, config.tfidf_n_max,
                                              config.tfidf_min_df));
    } else {
      auto set = load_embeddings(read_file(config.embeddings_jsonl));
      auto pooling = part == "embedding_cls" ? PoolingMode::cls : PoolingMode::max;
      std::vector<std::vector<double>> rows;
      std::vector<std::size_t> row_document;
      std::vector<std::string> row_ids;
      for (std::size_t i = 0; i < n; ++i) {
        auto it = set.by_patient.find(data.patient_ids[i]);
        if (it == set.by_patient.end()) throw DataError("no embeddings for patient " + data.patient_ids[i]);
        if (mode == "window512") {
          auto pooled = pool_embeddings(it->second, pooling);
          for (std::size_t c = 0; c < pooled.size(); ++c) {
            rows.push_back(std::move(pooled[c]));
            row_document.push_back(i);
            row_ids.push_back(data.patient_ids[i] + "#" + std::to_string(c));
          }
        } else {
          rows.push_back(pool_document(it->second, pooling));
          row_document.push_back(i);
          row_ids.push_back(data.patient_ids[i]);
        }
      }
      FeatureMatrix m(row_ids);
      for (std::size_t d = 0; d < set.dimension; ++d) {
        std::vector<double> column(rows.size());
        for (std::size_t r = 0; r < rows.size(); ++r) column[r] = rows[r][d];
        m.add_column({part + "_" + std::to_string(d), ColumnKind::numeric, Provenance::embedding, {}},
                     std::move(column));
      }
      sources.push_back(std::make_unique<eval::StaticSource>(std::move(m), std::move(row_document), n));
    }
  }
  if (sources.size() == 1) return std::move(sources.front());
  return std::make_unique<ConcatSource>(std::move(sources), data.patient_ids);
}

ml::ModelSpec model_spec(const ExperimentConfig& config, const std::string& model) {
  ml::ModelSpec spec;
  spec.kind = ml::parse_model_kind(model);
  spec.logistic = config.logistic;
  spec.forest = config.forest;
  spec.boosted = config.boosted;
  return spec;
}

std::vector<EvaluatedCell> cmd_evaluate(const ExperimentConfig& config, std::ostream& log) {
  for (const auto& fs : config.feature_sets) check_inputs(config, fs);
  for (const auto& m : config.models) ml::parse_model_kind(m);
  for (const auto& b : config.balances) eval::parse_balance(b);
  if (config.repetitions == 0) throw ConfigError("repetitions must be at least 1");

  auto data = load_dataset(config);
  std::vector<EvaluatedCell> cells;
  for (const auto& fs : config.feature_sets) {
    auto source = build_feature_source(config, data, fs);
    for (const auto& model : config.models) {
      for (const auto& balance : config.balances) {
        auto spec = model_spec(config, model);
        eval::ProtocolConfig protocol;
        protocol.folds = config.folds;
        protocol.repetitions = config.repetitions;
        protocol.balance = eval::parse_balance(balance);
        protocol.smote_k = config.smote_k;
        protocol.master_seed = config.seed;
        protocol.threads = config.threads;

        std::map<std::string, std::string> description{
            {"feature_set", fs},
            {"model", std::string(ml::short_name(spec.kind))},
            {"balance", balance},
            {"chunk_mode", resolved_chunk_mode(config, fs)},
            {"folds", std::to_string(config.folds)},
            {"repetitions", std::to_string(config.repetitions)},
            {"seed", std::to_string(config.seed)},
            {"patients", std::to_string(data.patient_ids.size())},
        };
        if (protocol.balance == eval::Balance::smote) description["smote_k"] = std::to_string(config.smote_k);
        if (spec.kind == ml::ModelKind::logistic) append_prefixed(description, config, "lr_");
        if (spec.kind == ml::ModelKind::forest) append_prefixed(description, config, "rf_");
        if (spec.kind == ml::ModelKind::boosted) append_prefixed(description, config, "gbt_");
        if (fs.find("tfidf") != std::string::npos) append_prefixed(description, config, "tfidf_");

        EvaluatedCell cell;
        cell.run = eval::run_protocol(*source, data.labels, spec, protocol, description);
        auto file = cell_file_name(fs, std::string(ml::short_name(spec.kind)), balance);
        write_file(config.output_dir + "/" + file, eval::run_to_jsonl(cell.run));

        cell.cell = {fs,
                     std::string(ml::short_name(spec.kind)),
                     balance,
                     cell.run.summary("macro_f1"),
                     cell.run.summary("kappa"),
                     config.repetitions,
                     config.seed,
                     cell.run.fingerprint(),
                     file};
        log << fs << "\t" << cell.cell.model << "\t" << balance << "\tF1 " << report::mean_sd(cell.cell.f1)
            << "\tkappa " << report::mean_sd(cell.cell.kappa) << "\t" << file << std::endl;
        cells.push_back(std::move(cell));
      }
    }
  }

  std::vector<report::Cell> rows;
  for (const auto& c : cells) rows.push_back(c.cell);
  std::string md = "# Classification performance\n\n";
  md += std::to_string(config.folds) + "-fold cross-validation, " + std::to_string(config.repetitions) +
        " repetitions, seed " + std::to_string(config.seed) + ". Macro F1 and Cohen's kappa, mean ± sd over repetitions.\n\n";
  md += report::performance_markdown(rows);
  write_file(config.output_dir + "/performance.md", md);
  write_file(config.output_dir + "/performance.csv", report::performance_csv(rows));
  write_file(config.output_dir + "/config.txt", emit_config(config));
  return cells;
}

void cmd_analyze(const ExperimentConfig& config, std::ostream& log) {
  if (config.transcripts_dir.empty()) throw ConfigError("analyze needs transcripts_dir");
  for (const auto& fs : config.feature_sets) check_inputs(config, fs);
  auto data = load_dataset(config);
  auto styles = data.styles();
  std::size_t anaclitic = static_cast<std::size_t>(std::count(data.labels.begin(), data.labels.end(), 1));
  std::size_t introjective = data.labels.size() - anaclitic;
  if (anaclitic < 2 || introjective < 2) {
    throw DataError("analysis needs at least 2 patients of each style; found " + std::to_string(anaclitic) +
                    " anaclitic and " + std::to_string(introjective) + " introjective");
  }
  std::string dir = config.output_dir + "/analysis/";
  std::string md = "# Feature analysis\n\n" + std::to_string(data.patient_ids.size()) + " patients (" +
                   std::to_string(anaclitic) + " anaclitic, " + std::to_string(introjective) + " introjective), seed " +
                   std::to_string(config.seed) + ".\n\n";

  // Answer lengths.
  auto lengths = answer_length_stats(data.transcripts);
  std::string lengths_csv = "patient_id,label,tokens\n";
  for (const auto& e : lengths.per_patient) {
    lengths_csv += csv::join({e.patient_id, e.label ? std::string(to_string(*e.label)) : "", std::to_string(e.tokens)}) + "\n";
  }
  write_file(dir + "answer_lengths.csv", lengths_csv);
  md += "## Patient tokens per interview\n\n| group | patients | mean | sd |\n|---|---|---|---|\n";
  for (const auto& g : lengths.groups) {
    md += "| " + g.group + " | " + std::to_string(g.patients) + " | " + format_fixed(g.mean, 1) + " | " +
          format_fixed(g.sd, 1) + " |\n";
  }
  md += "\n";

  if (!config.lexicon.empty()) {
    auto lexicon = load_lexicon_file(config.lexicon);
    auto liwc = liwc_features(data, lexicon);
    auto ranking = stats::rank_features(liwc, styles, stats::FeatureTest::mann_whitney);
    write_file(dir + "liwc_features.csv", report::feature_matrix_csv(liwc));
    write_file(dir + "liwc_ranking.csv", stats::ranking_csv(ranking));
    md += "## Dictionary categories (Mann-Whitney)\n\n" + report::ranking_markdown(ranking, 10) + "\n";

    std::vector<report::BoxPlot> plots;
    for (std::size_t i = 0; i < ranking.size() && i < 4; ++i) {
      plots.push_back({ranking[i].name, stats::group_summary(liwc.values(ranking[i].column), styles)});
    }
    write_file(dir + "liwc_boxplots.csv", report::boxplot_csv(plots));
    if (config.svg) write_file(dir + "liwc_boxplots.svg", report::boxplot_svg(plots));
    log << "dictionary ranking: " << ranking.size() << " categories\n";
  }

  // Word TF-IDF restricted to words used in every transcript.
  {
    std::vector<TokenList> docs;
    for (const auto& t : data.transcripts) docs.push_back(patient_tokens(t));
    auto model = fit_tfidf(docs, 1);
    auto matrix = tfidf_matrix(model, docs, data.patient_ids);
    stats::UsageFilter filter;
    filter.min_mean = config.usage_min_mean;
    filter.counts.assign(model.size(), std::vector<double>(docs.size(), 0.0));
    for (std::size_t d = 0; d < docs.size(); ++d) {
      for (const auto& gram : ngrams(docs[d], 1)) {
        if (auto idx = model.index_of(gram)) filter.counts[*idx][d] += 1.0;
      }
    }
    auto ranking = stats::rank_features(matrix, styles, stats::FeatureTest::mann_whitney, &filter);
    write_file(dir + "tfidf_ranking.csv", stats::ranking_csv(ranking));
    md += "## Words used in every interview (TF-IDF, Mann-Whitney)\n\n" + report::ranking_markdown(ranking, 10) + "\n";
    log << "word ranking: " << ranking.size() << " words pass the usage filter\n";
  }

  if (!config.sentiment_lexicon.empty()) {
    auto sentiment = load_sentiment_lexicon_file(config.sentiment_lexicon);
    auto features = sentiment_features(data, sentiment);
    auto ranking = stats::rank_features(features, styles, stats::FeatureTest::mann_whitney);
    write_file(dir + "sentiment_ranking.csv", stats::ranking_csv(ranking));
    md += "## Sentiment statistics (Mann-Whitney)\n\n" + report::ranking_markdown(ranking, 4) + "\n";
    md += "## Question and answer polarity\n\n";
    for (auto mode : {PolarityMode::mean, PolarityMode::most_polarized}) {
      std::string name = mode == PolarityMode::mean ? "mean" : "most_polarized";
      auto grids = qa_polarity_grid(data.transcripts, sentiment, mode, config.qa_min_sentences);
      write_file(dir + "polarity_grid_" + name + ".csv", report::polarity_grid_csv(grids));
      md += report::polarity_grid_markdown(grids, "Answer polarity by " + name + " sentence score");
    }
    log << "polarity grids written\n";
  }

  if (!config.audio_csv.empty()) {
    auto audio = audio_features(data, load_audio_segments(read_file(config.audio_csv)));
    auto ranking = stats::rank_features(audio, styles, stats::FeatureTest::anova_f);
    if (ranking.size() > 10) ranking.resize(10);
    write_file(dir + "audio_anova_top10.csv", stats::ranking_csv(ranking));
    md += "## Audio features (ANOVA F, top 10)\n\n" + report::ranking_markdown(ranking, 10) + "\n";
    log << "audio ranking written\n";
  }

  for (const auto& w : lengths.warnings) md += "- warning: " + w + "\n";
  write_file(dir + "report.md", md);
  log << "analysis written to " << dir << "\n";
}

CompareOutput cmd_compare(const std::vector<std::string>& run_files, const std::string& metric, bool paired_balance) {
  eval::metric_value(eval::MetricSet{}, metric);
  if (run_files.size() < 2) throw ConfigError("compare needs at least two run files");
  std::vector<eval::EvaluationRun> runs;
  std::vector<std::string> labels;
  for (const auto& path : run_files) {
    runs.push_back(eval::run_from_jsonl(read_file(path)));
    const auto& c = runs.back().config;
    auto get = [&](const char* key) {
      auto it = c.find(key);
      return it == c.end() ? std::string() : it->second;
    };
    std::string label = get("feature_set") + "/" + get("model") + "/" + get("balance");
    if (label == "//") label = std::filesystem::path(path).stem().string();
    labels.push_back(label);
  }
  CompareOutput out;
  if (paired_balance) {
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::size_t>> groups;
    std::vector<std::pair<std::string, std::string>> order;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto& c = runs[i].config;
      std::pair<std::string, std::string> key{c.count("feature_set") ? c.at("feature_set") : labels[i],
                                              c.count("model") ? c.at("model") : ""};
      std::string balance = c.count("balance") ? c.at("balance") : "";
      if (!groups.count(key)) order.push_back(key);
      if (!groups[key].emplace(balance, i).second) {
        throw DataError("two runs share feature set, model and balance: " + labels[i]);
      }
    }
    std::vector<report::BalancePair> pairs;
    for (const auto& key : order) {
      const auto& g = groups[key];
      if (!g.count("none") || !g.count("smote")) continue;
      const auto& a = runs[g.at("none")];
      const auto& b = runs[g.at("smote")];
      pairs.push_back({key.first, key.second, a.summary(metric), b.summary(metric), eval::compare_runs(a, b, metric)});
    }
    if (pairs.empty()) throw DataError("no feature set and model has both an imbalanced and a smote run");
    out.markdown = report::balance_pairs_markdown(pairs, metric);
    out.csv = report::balance_pairs_csv(pairs, metric);
    return out;
  }
  report::Comparison c;
  c.labels = labels;
  c.metric = metric;
  std::size_t n = runs.size();
  c.p.assign(n, std::vector<double>(n, 1.0));
  c.statistic.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      auto t = eval::compare_runs(runs[i], runs[j], metric);
      c.p[i][j] = t.p_value;
      c.statistic[i][j] = t.statistic;
    }
  }
  out.markdown = report::comparison_markdown(c);
  out.csv = report::comparison_csv(c);
  return out;
}

}  // namespace pstyle
