#include "pstyle/synthetic.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <string_view>

#include "json.hpp"
#include "pstyle/error.hpp"
#include "pstyle/features.hpp"
#include "pstyle/lexicon.hpp"
#include "pstyle/util.hpp"
#include "rng.hpp"

namespace pstyle {

namespace {

// Content words favoured by each style; all are dictionary entries.
constexpr std::array<std::string_view, 22> kAnacliticWords{
    "ik",    "mij",    "mijn",    "ze",    "hij",   "haar",   "samen",  "moeder", "vader",   "vriendin", "thuis",
    "huis",  "verdriet", "alleen", "eenzaam", "was", "vroeger", "zag",   "hoorde", "gezin",   "familie",  "praten"};
constexpr std::array<std::string_view, 22> kIntrojectiveWords{
    "misschien", "eventueel", "wellicht", "twijfel", "omdat", "want", "daardoor", "reden", "zal",  "morgen", "later",
    "toekomst",  "plan",      "uh",       "pff",     "wel",   "ook",  "denk",     "denken", "werk", "doel",  "moet"};
// Function and everyday words outside the dictionary.
constexpr std::array<std::string_view, 36> kNeutralWords{
    "de",   "het",  "een",   "en",   "van",   "in",     "op",     "met",   "voor",  "aan",  "er",    "niet",
    "maar", "als",  "dan",   "om",   "bij",   "naar",   "toen",   "tijd",  "dag",   "jaar", "keer",  "stad",
    "auto", "boek", "weer",  "water", "trein", "winkel", "school", "straat", "dorp", "fiets", "week", "maand"};

constexpr std::array<std::string_view, 7> kPositiveWords{"goed", "blij", "fijn", "mooi", "leuk", "prettig", "geweldig"};
constexpr std::array<std::string_view, 7> kNegativeWords{"slecht",  "triest", "boos",     "bang",
                                                         "moeilijk", "zwaar",  "vreselijk"};

// Question templates per mood: positive, neutral, negative.
constexpr std::array<std::array<std::string_view, 3>, 3> kQuestions{{
    {"Wat vond u daar goed aan?", "Was dat een fijne tijd?", "Wat maakt u blij?"},
    {"Kunt u daar meer over vertellen?", "Hoe verliep een dag toen?", "Wat gebeurde er daarna?"},
    {"Was dat moeilijk voor u?", "Wat vond u het slechtst?", "Wanneer was u bang?"},
}};

constexpr std::size_t kSignalDescriptors = 24;

template <std::size_t N>
std::string_view pick(Rng& rng, const std::array<std::string_view, N>& words) {
  return words[rng.below(N)];
}

double exponential(Rng& rng) {
  double u = rng.uniform();
  return -std::log1p(-u);
}

struct PatientProfile {
  PersonalityStyle style;
  double anaclitic_share;  // probability a content word comes from the anaclitic list
  double neutral_share;
  double sound_rate;
  double pause_mean;
  double mirror_rate;  // chance an answer takes over the question's mood
  double neutral_mood_rate;
};

PatientProfile make_profile(PersonalityStyle style, double signal, Rng& rng) {
  PatientProfile p;
  p.style = style;
  bool anaclitic = style == PersonalityStyle::anaclitic;
  double strength = signal * (0.6 + 0.4 * rng.uniform());
  p.anaclitic_share = 0.5 + (anaclitic ? 0.35 : -0.35) * strength;
  p.neutral_share = 0.45 + 0.2 * rng.uniform();
  p.sound_rate = 0.01 + (anaclitic ? 0.0 : 0.03 * signal);
  p.pause_mean = 0.12 + 0.08 * rng.uniform() + (anaclitic ? 0.0 : 0.15 * signal);
  p.mirror_rate = anaclitic ? 0.5 * signal : 0.0;
  p.neutral_mood_rate = anaclitic ? 0.0 : 0.4 * signal;
  return p;
}

std::string capitalize(std::string_view word) {
  std::string out(word);
  if (!out.empty() && out[0] >= 'a' && out[0] <= 'z') out[0] = static_cast<char>(out[0] - 'a' + 'A');
  return out;
}

// Sentence pieces of one answer in the given mood (0 positive, 1 neutral, 2 negative).
std::vector<std::string> answer_pieces(const PatientProfile& p, int mood, Rng& rng) {
  std::vector<std::string> pieces;
  std::size_t sentences = 2 + rng.below(13);
  for (std::size_t s = 0; s < sentences; ++s) {
    std::vector<std::string> words;
    std::size_t length = 5 + rng.below(8);
    for (std::size_t w = 0; w < length; ++w) {
      if (rng.uniform() < p.neutral_share) {
        words.emplace_back(pick(rng, kNeutralWords));
      } else if (rng.uniform() < p.anaclitic_share) {
        words.emplace_back(pick(rng, kAnacliticWords));
      } else {
        words.emplace_back(pick(rng, kIntrojectiveWords));
      }
      if (rng.uniform() < p.sound_rate) words.emplace_back(kSoundMarker);
      if (rng.uniform() < 0.004) words.emplace_back(kNameMarker);
    }
    if (rng.uniform() < 0.5) {
      auto at = rng.below(words.size() + 1);
      std::string_view sentiment = mood == 0 ? pick(rng, kPositiveWords)
                                   : mood == 2 ? pick(rng, kNegativeWords)
                                               : std::string_view("normaal");
      words.insert(words.begin() + static_cast<std::ptrdiff_t>(at), std::string(sentiment));
    }
    // Markers stay out of the first position so capitalization only touches words.
    if (words.front().front() == '<') words.insert(words.begin(), std::string(pick(rng, kNeutralWords)));
    words.front() = capitalize(words.front());
    words.back() += '.';
    for (auto& w : words) pieces.push_back(std::move(w));
  }
  return pieces;
}

std::size_t letters(std::string_view piece) {
  std::size_t n = 0;
  for (char c : piece) n += (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ? 1 : 0;
  return n;
}

std::string join(const std::vector<std::string>& pieces) {
  std::string out;
  for (const auto& p : pieces) {
    if (!out.empty()) out.push_back(' ');
    out += p;
  }
  return out;
}

Transcript make_transcript(const std::string& id, const PatientProfile& p, std::size_t answers, Rng& rng) {
  Transcript t;
  t.patient_id = id;
  t.label = p.style;
  double clock = 0.0;
  for (std::size_t a = 0; a < answers; ++a) {
    int question_mood = static_cast<int>(rng.below(3));
    std::string question(kQuestions[question_mood][rng.below(3)]);
    clock += 0.3 * static_cast<double>(question.size() / 5 + 1);
    t.turns.push_back(make_turn(Role::interviewer, question));
    if (rng.uniform() < 0.05) t.turns.push_back(make_turn(Role::noise, "<sound>"));

    int mood = static_cast<int>(rng.below(3));
    if (rng.uniform() < p.mirror_rate) mood = question_mood;
    if (rng.uniform() < p.neutral_mood_rate) mood = 1;
    auto pieces = answer_pieces(p, mood, rng);
    std::vector<WordTiming> timing;
    clock += 1.0;
    for (const auto& piece : pieces) {
      double duration = 0.08 + 0.045 * static_cast<double>(letters(piece) + 1);
      timing.push_back({clock, clock + duration});
      clock += duration + p.pause_mean * exponential(rng);
    }
    t.turns.push_back(make_turn(Role::patient, join(pieces), timing));
  }
  return t;
}

std::string fixed(double v, int decimals) { return format_fixed(v, decimals); }

}  // namespace

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec) {
  if (spec.anaclitic + spec.introjective < 2) throw ConfigError("synthetic corpus needs at least two patients");
  if (!(spec.signal >= 0.0 && spec.signal <= 1.0)) throw ConfigError("signal must be in [0, 1]");
  if (spec.answers == 0) throw ConfigError("synthetic interviews need at least one answer");
  if (spec.embedding_dim == 0) throw ConfigError("embedding dimension must be positive");
  if (spec.audio_segments < 2) throw ConfigError("synthetic audio needs at least two segments per patient");

  std::vector<PersonalityStyle> styles(spec.anaclitic, PersonalityStyle::anaclitic);
  styles.insert(styles.end(), spec.introjective, PersonalityStyle::introjective);
  Rng order_rng(derive_seed(spec.seed, 1));
  order_rng.shuffle(styles);

  SyntheticCorpus out;
  out.labels_csv = "patient_id,label\n";
  out.questionnaire_csv = "patient_id,age,depression_severity,dependency,self_criticism,gender,education\n";
  out.questionnaire_types_csv =
      "column,kind\nage,numeric\ndepression_severity,numeric\ndependency,numeric\nself_criticism,numeric\n"
      "gender,categorical\neducation,categorical\n";
  out.audio_csv = "patient_id,segment_index";
  for (std::size_t d = 0; d < kAudioDescriptorCount; ++d) out.audio_csv += ",d" + std::to_string(d);
  out.audio_csv += "\n";

  // Descriptor scales shared by all patients.
  Rng scale_rng(derive_seed(spec.seed, 2));
  std::vector<double> base(kAudioDescriptorCount);
  std::vector<double> spread(kAudioDescriptorCount);
  for (std::size_t d = 0; d < kAudioDescriptorCount; ++d) {
    base[d] = 10.0 * scale_rng.normal();
    spread[d] = 0.5 + 2.0 * scale_rng.uniform();
  }

  char id_buffer[16];
  for (std::size_t i = 0; i < styles.size(); ++i) {
    std::snprintf(id_buffer, sizeof(id_buffer), "P%03zu", i + 1);
    std::string id = id_buffer;
    bool anaclitic = styles[i] == PersonalityStyle::anaclitic;
    double sign = anaclitic ? 1.0 : -1.0;

    Rng text_rng(derive_seed(spec.seed, 10, i));
    auto profile = make_profile(styles[i], spec.signal, text_rng);
    out.transcripts.push_back(make_transcript(id, profile, spec.answers, text_rng));
    out.labels_csv += id + "," + std::string(to_string(styles[i])) + "\n";

    Rng q_rng(derive_seed(spec.seed, 11, i));
    auto cell = [&](double v, int decimals) {
      return q_rng.uniform() < 0.05 ? std::string() : fixed(v, decimals);
    };
    double age = 40.0 + 12.0 * q_rng.normal();
    double severity = 25.0 + 8.0 * q_rng.normal();
    double dependency = q_rng.normal() + 0.5 * spec.signal * (anaclitic ? 1.0 : 0.0);
    double criticism = q_rng.normal() + 0.5 * spec.signal * (anaclitic ? 0.0 : 1.0);
    std::string gender = q_rng.uniform() < 0.6 ? "f" : "m";
    static constexpr std::array<std::string_view, 3> kEducation{"low", "mid", "high"};
    std::string education(kEducation[q_rng.below(3)]);
    if (q_rng.uniform() < 0.05) education.clear();
    out.questionnaire_csv += id + "," + cell(age, 0) + "," + cell(severity, 1) + "," + cell(dependency, 3) + "," +
                             cell(criticism, 3) + "," + gender + "," + education + "\n";

    // One embedding chunk per 512 patient tokens: a summary row and three token rows.
    Rng e_rng(derive_seed(spec.seed, 12, i));
    auto tokens = patient_tokens(out.transcripts.back());
    std::size_t chunks = std::max<std::size_t>(1, (tokens.size() + 511) / 512);
    for (std::size_t c = 0; c < chunks; ++c) {
      nlohmann::json record;
      record["patient_id"] = id;
      record["chunk_index"] = c;
      std::vector<std::vector<float>> vectors;
      std::vector<bool> summary;
      for (std::size_t row = 0; row < 4; ++row) {
        std::vector<float> v(spec.embedding_dim);
        for (std::size_t d = 0; d < spec.embedding_dim; ++d) {
          double shift = d < 8 ? sign * 0.6 * spec.signal * (row == 0 ? 1.0 : 0.5) : 0.0;
          v[d] = static_cast<float>(std::round((e_rng.normal() + shift) * 1e5) / 1e5);
        }
        vectors.push_back(std::move(v));
        summary.push_back(row == 0);
      }
      record["is_summary_row"] = summary;
      record["vectors"] = vectors;
      out.embeddings_jsonl += record.dump() + "\n";
    }

    // Segment descriptors: patient-level offset and scale (removed by per-patient
    // standardization) plus, for introjective speakers, skewed noise on some descriptors.
    Rng a_rng(derive_seed(spec.seed, 13, i));
    std::vector<double> offset(kAudioDescriptorCount);
    std::vector<double> scale(kAudioDescriptorCount);
    for (std::size_t d = 0; d < kAudioDescriptorCount; ++d) {
      offset[d] = base[d] + spread[d] * a_rng.normal();
      scale[d] = spread[d] * (0.5 + a_rng.uniform());
    }
    for (std::size_t s = 0; s < spec.audio_segments; ++s) {
      out.audio_csv += id + "," + std::to_string(s);
      for (std::size_t d = 0; d < kAudioDescriptorCount; ++d) {
        double noise = a_rng.normal();
        if (!anaclitic && d < kSignalDescriptors) {
          noise = (1.0 - spec.signal) * noise + spec.signal * (exponential(a_rng) - 1.0);
        }
        out.audio_csv += "," + fixed(offset[d] + scale[d] * noise, 5);
      }
      out.audio_csv += "\n";
    }
  }
  return out;
}

void write_synthetic(const SyntheticCorpus& corpus, const std::string& directory) {
  auto path = [&](const std::string& name) { return directory + "/" + name; };
  for (const auto& t : corpus.transcripts) {
    write_file(path("transcripts/" + t.patient_id + ".json"), serialize_transcript(t) + "\n");
  }
  write_file(path("questionnaire.csv"), corpus.questionnaire_csv);
  write_file(path("questionnaire_types.csv"), corpus.questionnaire_types_csv);
  write_file(path("labels.csv"), corpus.labels_csv);
  write_file(path("embeddings.jsonl"), corpus.embeddings_jsonl);
  write_file(path("audio.csv"), corpus.audio_csv);
  write_file(path("lexicon.dic"), toy_category_lexicon_text());
  write_file(path("sentiment.tsv"), toy_sentiment_lexicon_text());
  write_file(path("corpus.conf"),
             "# Inputs of a generated corpus; include this file from an experiment config.\n"
             "transcripts_dir = transcripts\n"
             "questionnaire_csv = questionnaire.csv\n"
             "questionnaire_types = questionnaire_types.csv\n"
             "labels_csv = labels.csv\n"
             "embeddings_jsonl = embeddings.jsonl\n"
             "audio_csv = audio.csv\n"
             "lexicon = lexicon.dic\n"
             "sentiment_lexicon = sentiment.tsv\n");
}

}  // namespace pstyle
