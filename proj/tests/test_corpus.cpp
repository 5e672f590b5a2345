#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "pstyle/corpus.hpp"
#include "pstyle/error.hpp"

using namespace pstyle;

namespace {

std::vector<std::string> texts(const TokenList& tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) out.push_back(t.text);
  return out;
}

Transcript with_turns(std::vector<std::pair<Role, std::string>> turns) {
  Transcript t;
  t.patient_id = "p";
  for (auto& [role, text] : turns) t.turns.push_back(make_turn(role, text));
  return t;
}

}  // namespace

TEST_CASE("parse a two-turn transcript") {
  auto t = parse_transcript(R"({"patient_id":"P1","label":"anaclitic","turns":[
    {"role":"interviewer","text":"Hoe gaat het?","timing":null},
    {"role":"patient","text":"Goed.","timing":null}]})");
  CHECK(t.patient_id == "P1");
  CHECK(t.label == PersonalityStyle::anaclitic);
  CHECK(t.turns.size() == 2);
  CHECK(texts(patient_tokens(t)) == std::vector<std::string>{"goed"});
}

TEST_CASE("empty turn list and null label are valid") {
  auto t = parse_transcript(R"({"patient_id":"P2","label":null,"turns":[]})");
  CHECK(t.turns.empty());
  CHECK_FALSE(t.label.has_value());
}

TEST_CASE("schema and syntax errors") {
  CHECK_THROWS_AS(parse_transcript(R"({"patient_id":"P","label":null,"turns":[{"role":"therapist","text":"x"}]})"),
                  SchemaError);
  CHECK_THROWS_AS(parse_transcript(R"({"patient_id":"P","label":"other","turns":[]})"), SchemaError);
  CHECK_THROWS_AS(parse_transcript("{\"patient_id\": \n  oops}"), ParseError);
  try {
    parse_transcript("{\"patient_id\": \n  oops}");
  } catch (const ParseError& e) {
    CHECK(e.line() == 2);
  }
}

TEST_CASE("serialize round trip") {
  auto t = with_turns({{Role::interviewer, "Hoe gaat het?"}, {Role::patient, "Ik denk, ja. Goed!"}});
  t.label = PersonalityStyle::introjective;
  CHECK(parse_transcript(serialize_transcript(t)) == t);
}

TEST_CASE("tokenize") {
  CHECK(texts(tokenize("Ik denk, ja.")) == std::vector<std::string>{"ik", "denk", "ja"});
  auto markers = tokenize("<sound> uh dat was in <location>");
  CHECK(texts(markers) == std::vector<std::string>{"<sound>", "uh", "dat", "was", "in", "<location>"});
  CHECK(markers.front().kind == TokenKind::marker);
  CHECK(markers[1].kind == TokenKind::word);
  CHECK(tokenize("").empty());
  CHECK(texts(tokenize("zo'n goed-gevoel")) == std::vector<std::string>{"zo'n", "goed-gevoel"});
}

TEST_CASE("sentence spans cover every token") {
  auto turn = make_turn(Role::patient, "Ja. Nee! Misschien wel");
  REQUIRE(turn.sentences.size() == 3);
  std::size_t pos = 0;
  for (const auto& s : turn.sentences) {
    CHECK(s.begin == pos);
    pos = s.end;
  }
  CHECK(pos == turn.tokens.size());
}

TEST_CASE("anonymize") {
  auto t = with_turns({{Role::patient, "jan woont in gent"}});
  auto a = anonymize(t, {"jan"}, {"gent"});
  CHECK(texts(a.turns[0].tokens) == std::vector<std::string>{"<name>", "woont", "in", "<location>"});
  CHECK(anonymize(t, {}, {}) == t);
  auto x = with_turns({{Role::patient, "x is hier"}});
  CHECK_THROWS_AS(anonymize(x, {"x"}, {"x"}), DataError);
}

TEST_CASE("patient tokens and answer chunks") {
  auto t = with_turns({{Role::interviewer, "vraag"}, {Role::patient, "ja"}, {Role::interviewer, "en"},
                       {Role::patient, ""}, {Role::patient, "nee"}});
  CHECK(texts(patient_tokens(t)) == std::vector<std::string>{"ja", "nee"});
  auto chunks = chunk_by_answer(t);
  REQUIRE(chunks.size() == 2);
  CHECK(chunks[0][0].text == "ja");
  CHECK(chunks[1][0].text == "nee");
  CHECK(chunk_by_answer(with_turns({{Role::interviewer, "vraag"}})).empty());
}

TEST_CASE("window chunks") {
  TokenList tokens(1030, Token{"w", TokenKind::word});
  auto chunks = chunk_by_window(tokens, 512);
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].size() == 512);
  CHECK(chunks[1].size() == 512);
  CHECK(chunks[2].size() == 6);
  CHECK(chunk_by_window(std::span<const Token>(tokens).first(10), 512).size() == 1);
  CHECK_THROWS_AS(chunk_by_window(tokens, 0), ConfigError);
}

TEST_CASE("answer length statistics use the sample sd") {
  std::string ten, twenty;
  for (int i = 0; i < 10; ++i) ten += "w ";
  for (int i = 0; i < 20; ++i) twenty += "w ";
  auto a = with_turns({{Role::patient, ten}});
  a.label = PersonalityStyle::anaclitic;
  auto b = with_turns({{Role::patient, twenty}});
  b.label = PersonalityStyle::introjective;
  std::vector<Transcript> corpus{a, b};
  auto stats = answer_length_stats(corpus);
  const auto& all = stats.groups.front();
  CHECK(all.group == "all");
  CHECK(all.mean == doctest::Approx(15.0));
  CHECK(all.sd == doctest::Approx(std::sqrt(50.0)));

  std::vector<Transcript> single{a};
  auto one = answer_length_stats(single);
  CHECK(one.groups.front().sd == 0.0);
  CHECK_FALSE(one.warnings.empty());
  CHECK_THROWS_AS(answer_length_stats(std::vector<Transcript>{}), DataError);
}
