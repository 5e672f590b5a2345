#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "pstyle/corpus.hpp"

namespace pstyle {

// Generator settings for a labelled toy corpus with a planted style signal.
struct SyntheticSpec {
  std::size_t anaclitic = 50;
  std::size_t introjective = 29;
  // 0 draws both styles from one distribution; 1 is a strong signal.
  double signal = 1.0;
  std::uint64_t seed = 0;
  std::size_t answers = 20;  // patient answers per interview
  std::size_t embedding_dim = 32;
  std::size_t audio_segments = 12;
};

struct SyntheticCorpus {
  std::vector<Transcript> transcripts;
  std::string questionnaire_csv;
  std::string questionnaire_types_csv;
  std::string labels_csv;
  std::string embeddings_jsonl;
  std::string audio_csv;
};

SyntheticCorpus generate_synthetic(const SyntheticSpec& spec);

/// Writes transcripts/, the tables, both toy lexicons and a corpus.conf that
/// points at them. Refuses to overwrite existing files.
void write_synthetic(const SyntheticCorpus& corpus, const std::string& directory);

}  // namespace pstyle
