#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "pstyle/error.hpp"
#include "pstyle/lexicon.hpp"

using namespace pstyle;

namespace {

CategoryLexicon small_lexicon() { return load_lexicon("%\n1\tppron\n2\tcogproc\n%\nik\t1\ndenk*\t2\nwij\t1\n"); }

}  // namespace

TEST_CASE("lexicon file format") {
  auto lex = small_lexicon();
  CHECK(lex.category_count() == 2);
  CHECK(lex.pattern_count() == 3);
  CHECK_THROWS_AS(load_lexicon("%\n%\nik\t1\n"), DataError);
  auto merged = load_lexicon("%\n1\ta\n2\tb\n%\nx\t1\nx\t2\n");
  CHECK(merged.categories_of(Token{"x", TokenKind::word}) == std::vector<std::size_t>{0, 1});
}

TEST_CASE("literal, wildcard and marker matching") {
  auto lex = small_lexicon();
  CHECK(lex.categories_of(Token{"denken", TokenKind::word}) == std::vector<std::size_t>{1});
  CHECK(lex.categories_of(Token{"ik", TokenKind::word}) == std::vector<std::size_t>{0});
  CHECK(lex.categories_of(Token{"<sound>", TokenKind::marker}).empty());
}

TEST_CASE("category fractions") {
  auto lex = load_lexicon("%\n1\tsocial\n2\tfamily\n%\nmoeder\t1,2\nvriend\t1\n");
  std::vector<Token> tokens;
  for (int i = 0; i < 20; ++i) tokens.push_back({i < 5 ? "vriend" : "tafel", TokenKind::word});
  auto f = category_fractions(lex, tokens);
  CHECK(f[0] == doctest::Approx(0.25));
  CHECK(f[1] == 0.0);

  std::vector<Token> none{{"tafel", TokenKind::word}};
  CHECK(category_fractions(lex, none) == std::vector<double>{0.0, 0.0});

  std::vector<Token> both{{"moeder", TokenKind::word}, {"<sound>", TokenKind::marker}};
  CHECK(category_fractions(lex, both) == std::vector<double>{1.0, 1.0});
  std::vector<Token> markers{{"<sound>", TokenKind::marker}};
  CHECK_THROWS_AS(category_fractions(lex, markers), DataError);
}

TEST_CASE("sentence and document sentiment") {
  auto lex = load_sentiment_lexicon("goed\t0.8\t0.9\nslecht\t-0.2\t0.5\n");
  std::vector<Token> s{{"goed", TokenKind::word}, {"en", TokenKind::word}, {"slecht", TokenKind::word}};
  auto score = sentence_sentiment(lex, s);
  CHECK(score.polarity == doctest::Approx(0.3));
  CHECK(score.subjectivity == doctest::Approx(0.7));
  std::vector<Token> miss{{"tafel", TokenKind::word}};
  CHECK(sentence_sentiment(lex, miss).polarity == 0.0);

  auto doc_lex = load_sentiment_lexicon("a\t0.4\t0.5\nb\t-0.4\t0.5\n");
  std::vector<Token> a{{"a", TokenKind::word}};
  std::vector<Token> b{{"b", TokenKind::word}};
  std::vector<std::span<const Token>> sentences{a, b};
  auto doc = document_sentiment(doc_lex, sentences);
  CHECK(doc.mean_polarity == doctest::Approx(0.0));
  CHECK(doc.sd_polarity == doctest::Approx(std::sqrt(0.32)).epsilon(1e-9));
  std::vector<std::span<const Token>> same{a, a};
  CHECK(document_sentiment(doc_lex, same).sd_polarity == 0.0);
  CHECK_THROWS_AS(document_sentiment(doc_lex, {}), DataError);
}

TEST_CASE("polarity classes use strict bounds") {
  CHECK(polarity_class(0.5) == PolarityClass::positive);
  CHECK(polarity_class(0.3) == PolarityClass::neutral);
  CHECK(polarity_class(-0.3) == PolarityClass::neutral);
  CHECK(polarity_class(-0.31) == PolarityClass::negative);
}

TEST_CASE("question and answer polarity grid") {
  auto lex = load_sentiment_lexicon("fijn\t0.9\t1\nvreselijk\t-0.9\t1\nbeetje\t0.1\t0.2\n");
  Transcript t;
  t.patient_id = "p";
  t.label = PersonalityStyle::anaclitic;
  t.turns.push_back(make_turn(Role::interviewer, "Hoe was het."));
  t.turns.push_back(make_turn(Role::patient, "Fijn."));
  std::vector<Transcript> corpus{t};
  auto grids = qa_polarity_grid(corpus, lex, PolarityMode::mean, 1);
  REQUIRE(grids.size() == 2);
  const auto& g = grids[0];
  CHECK(g.style == PersonalityStyle::anaclitic);
  CHECK(g.fractions[1] == std::array<double, 3>{1.0, 0.0, 0.0});
  CHECK(g.empty_row[0]);
  CHECK(g.empty_row[2]);
  CHECK(g.fractions[0] == std::array<double, 3>{0.0, 0.0, 0.0});

  Transcript m = t;
  m.turns[1] = make_turn(Role::patient, "Beetje. Vreselijk.");
  std::vector<Transcript> polarized{m};
  auto pg = qa_polarity_grid(polarized, lex, PolarityMode::most_polarized, 1);
  CHECK(pg[0].fractions[1][2] == 1.0);

  auto dropped = qa_polarity_grid(corpus, lex, PolarityMode::mean, 10);
  CHECK(dropped[0].pairs_per_row[1] == 0);
}

TEST_CASE("toy lexicons load") {
  auto lex = load_lexicon(toy_category_lexicon_text());
  CHECK(lex.index_of("ppron") < lex.category_count());
  CHECK(load_sentiment_lexicon(toy_sentiment_lexicon_text()).size() > 0);
}
