#include "pstyle/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>

#include "pstyle/error.hpp"
#include "pstyle/util.hpp"
#include "csv.hpp"

namespace pstyle {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::size_t parse_count(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError(std::string(key) + " must be a non-negative integer, got '" + std::string(value) + "'");
  }
  return out;
}

std::uint64_t parse_seed(std::string_view key, std::string_view value) {
  std::uint64_t out = 0;
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc() || ptr != value.data() + value.size() || value.empty()) {
    throw ConfigError(std::string(key) + " must be a non-negative integer, got '" + std::string(value) + "'");
  }
  return out;
}

double parse_real(std::string_view key, std::string_view value) {
  double out = 0.0;
  if (!csv::parse_double(std::string(value), out) || !std::isfinite(out)) {
    throw ConfigError(std::string(key) + " must be a number, got '" + std::string(value) + "'");
  }
  return out;
}

bool parse_bool(std::string_view key, std::string_view value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(std::string(key) + " must be true or false, got '" + std::string(value) + "'");
}

std::vector<std::string> parse_list(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    auto end = value.find(',', start);
    if (end == std::string_view::npos) end = value.size();
    auto item = trim(value.substr(start, end - start));
    if (!item.empty()) out.emplace_back(item);
    start = end + 1;
  }
  return out;
}

std::string join_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& item : items) out += (out.empty() ? "" : ",") + item;
  return out;
}

std::string resolve(std::string_view value, const std::string& base_dir) {
  if (value.empty() || base_dir.empty()) return std::string(value);
  std::filesystem::path p{std::string(value)};
  if (p.is_absolute()) return p.string();
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

struct Key {
  std::string name;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, std::string_view, const std::string&)> set;
};

Key path_key(std::string name, std::string ExperimentConfig::*field) {
  return {name, [field](const ExperimentConfig& c) { return c.*field; },
          [field](ExperimentConfig& c, std::string_view v, const std::string& base) { c.*field = resolve(v, base); }};
}

template <typename T>
Key count_key(std::string name, T ExperimentConfig::*field) {
  return {name, [field](const ExperimentConfig& c) { return std::to_string(c.*field); },
          [field, name](ExperimentConfig& c, std::string_view v, const std::string&) {
            c.*field = static_cast<T>(parse_count(name, v));
          }};
}

const std::vector<Key>& keys() {
  static const std::vector<Key> table = [] {
    std::vector<Key> k;
    k.push_back(path_key("transcripts_dir", &ExperimentConfig::transcripts_dir));
    k.push_back(path_key("questionnaire_csv", &ExperimentConfig::questionnaire_csv));
    k.push_back(path_key("questionnaire_types", &ExperimentConfig::questionnaire_types));
    k.push_back(path_key("labels_csv", &ExperimentConfig::labels_csv));
    k.push_back(path_key("embeddings_jsonl", &ExperimentConfig::embeddings_jsonl));
    k.push_back(path_key("audio_csv", &ExperimentConfig::audio_csv));
    k.push_back(path_key("lexicon", &ExperimentConfig::lexicon));
    k.push_back(path_key("sentiment_lexicon", &ExperimentConfig::sentiment_lexicon));
    k.push_back({"feature_set", [](const ExperimentConfig& c) { return join_list(c.feature_sets); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   auto items = parse_list(v);
                   if (items.empty()) throw ConfigError("feature_set must name at least one feature set");
                   for (const auto& item : items) feature_set_parts(item);
                   c.feature_sets = items;
                 }});
    k.push_back({"model", [](const ExperimentConfig& c) { return join_list(c.models); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   auto items = parse_list(v);
                   if (items.empty()) throw ConfigError("model must name at least one model");
                   for (const auto& item : items) ml::parse_model_kind(item);
                   c.models = items;
                 }});
    k.push_back({"balance", [](const ExperimentConfig& c) { return join_list(c.balances); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   auto items = parse_list(v);
                   if (items.empty()) throw ConfigError("balance must name at least one mode");
                   for (const auto& item : items) {
                     if (item != "none" && item != "smote") {
                       throw ConfigError("unknown balance '" + item + "'; valid values: none, smote");
                     }
                   }
                   c.balances = items;
                 }});
    k.push_back({"chunk_mode", [](const ExperimentConfig& c) { return c.chunk_mode; },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   if (v != "auto" && v != "none" && v != "per_answer" && v != "window512") {
                     throw ConfigError("unknown chunk_mode '" + std::string(v) +
                                       "'; valid values: auto, none, per_answer, window512");
                   }
                   c.chunk_mode = std::string(v);
                 }});
    k.push_back(count_key("folds", &ExperimentConfig::folds));
    k.push_back(count_key("repetitions", &ExperimentConfig::repetitions));
    k.push_back({"seed", [](const ExperimentConfig& c) { return std::to_string(c.seed); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) { c.seed = parse_seed("seed", v); }});
    k.push_back(count_key("threads", &ExperimentConfig::threads));
    k.push_back(count_key("smote_k", &ExperimentConfig::smote_k));
    k.push_back(count_key("tfidf_n_max", &ExperimentConfig::tfidf_n_max));
    k.push_back(count_key("tfidf_min_df", &ExperimentConfig::tfidf_min_df));
    k.push_back({"lr_l2", [](const ExperimentConfig& c) { return format_double(c.logistic.l2); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.logistic.l2 = parse_real("lr_l2", v);
                 }});
    k.push_back({"lr_tol", [](const ExperimentConfig& c) { return format_double(c.logistic.tol); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.logistic.tol = parse_real("lr_tol", v);
                 }});
    k.push_back({"lr_max_iter", [](const ExperimentConfig& c) { return std::to_string(c.logistic.max_iter); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.logistic.max_iter = parse_count("lr_max_iter", v);
                 }});
    k.push_back({"rf_trees", [](const ExperimentConfig& c) { return std::to_string(c.forest.trees); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.forest.trees = parse_count("rf_trees", v);
                 }});
    k.push_back({"rf_max_depth", [](const ExperimentConfig& c) { return std::to_string(c.forest.max_depth); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.forest.max_depth = parse_count("rf_max_depth", v);
                 }});
    k.push_back({"rf_features_per_split",
                 [](const ExperimentConfig& c) { return std::to_string(c.forest.features_per_split); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.forest.features_per_split = parse_count("rf_features_per_split", v);
                 }});
    k.push_back({"gbt_rounds", [](const ExperimentConfig& c) { return std::to_string(c.boosted.rounds); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.boosted.rounds = parse_count("gbt_rounds", v);
                 }});
    k.push_back({"gbt_depth", [](const ExperimentConfig& c) { return std::to_string(c.boosted.depth); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.boosted.depth = parse_count("gbt_depth", v);
                 }});
    k.push_back({"gbt_learning_rate", [](const ExperimentConfig& c) { return format_double(c.boosted.learning_rate); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.boosted.learning_rate = parse_real("gbt_learning_rate", v);
                 }});
    k.push_back({"gbt_l2_leaf", [](const ExperimentConfig& c) { return format_double(c.boosted.l2_leaf); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.boosted.l2_leaf = parse_real("gbt_l2_leaf", v);
                 }});
    k.push_back({"gbt_subsample", [](const ExperimentConfig& c) { return format_double(c.boosted.subsample); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.boosted.subsample = parse_real("gbt_subsample", v);
                 }});
    k.push_back(path_key("output_dir", &ExperimentConfig::output_dir));
    k.push_back({"svg", [](const ExperimentConfig& c) { return std::string(c.svg ? "true" : "false"); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) { c.svg = parse_bool("svg", v); }});
    k.push_back(count_key("qa_min_sentences", &ExperimentConfig::qa_min_sentences));
    k.push_back({"usage_min_mean", [](const ExperimentConfig& c) { return format_double(c.usage_min_mean); },
                 [](ExperimentConfig& c, std::string_view v, const std::string&) {
                   c.usage_min_mean = parse_real("usage_min_mean", v);
                 }});
    return k;
  }();
  return table;
}

ExperimentConfig parse_config_impl(std::string_view text, const std::string& base_dir, ExperimentConfig config,
                                   int depth) {
  if (depth > 16) throw ConfigError("config includes nested more than 16 levels deep");
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    auto key = trim(line.substr(0, eq));
    auto value = trim(line.substr(eq + 1));
    if (key == "include") {
      auto path = resolve(value, base_dir);
      std::string included;
      try {
        included = read_file(path);
      } catch (const DataError&) {
        throw ConfigError("config line " + std::to_string(line_no) + ": cannot read include " + path);
      }
      auto dir = std::filesystem::path(path).parent_path().string();
      config = parse_config_impl(included, dir.empty() ? "." : dir, std::move(config), depth + 1);
      continue;
    }
    try {
      apply_setting(config, key, value, base_dir);
    } catch (const ConfigError& e) {
      throw ConfigError("config line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return config;
}

}  // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return emit_config(*this) == emit_config(other);
}

const std::vector<std::string>& base_feature_sets() {
  static const std::vector<std::string> names{"questionnaire", "tfidf",         "liwc", "psychological",
                                              "embedding_cls", "embedding_max", "audio"};
  return names;
}

std::vector<std::string> feature_set_parts(std::string_view feature_set) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= feature_set.size()) {
    auto end = feature_set.find('+', start);
    if (end == std::string_view::npos) end = feature_set.size();
    std::string part(trim(feature_set.substr(start, end - start)));
    const auto& valid = base_feature_sets();
    if (std::find(valid.begin(), valid.end(), part) == valid.end()) {
      throw ConfigError("unknown feature set '" + part + "'; valid values: " + join_list(valid) +
                        " (combine with '+')");
    }
    if (std::find(parts.begin(), parts.end(), part) != parts.end()) {
      throw ConfigError("feature set '" + part + "' listed twice in '" + std::string(feature_set) + "'");
    }
    parts.push_back(part);
    start = end + 1;
  }
  return parts;
}

void apply_setting(ExperimentConfig& config, std::string_view key, std::string_view value,
                   const std::string& base_dir) {
  for (const auto& k : keys()) {
    if (k.name == key) {
      k.set(config, trim(value), base_dir);
      return;
    }
  }
  throw ConfigError("unknown config key '" + std::string(key) + "' (run 'defaults' for the full list)");
}

ExperimentConfig parse_config(std::string_view text, const std::string& base_dir, ExperimentConfig start) {
  return parse_config_impl(text, base_dir, std::move(start), 0);
}

ExperimentConfig load_config(const std::string& path, ExperimentConfig start) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const DataError&) {
    throw ConfigError("cannot read config file " + path);
  }
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config_impl(text, dir.empty() ? "." : dir, std::move(start), 0);
}

std::string emit_config(const ExperimentConfig& config) {
  std::string out;
  for (const auto& k : keys()) out += k.name + " = " + k.get(config) + "\n";
  return out;
}

}  // namespace pstyle
