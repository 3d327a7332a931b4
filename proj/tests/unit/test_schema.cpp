#include <catch2/catch_amalgamated.hpp>

#include "hydra/schema.hpp"

using namespace hydra;

TEST_CASE("tokenize on empty input") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("   \t  ").empty());
}

TEST_CASE("tokenize splits words and punctuation") {
  const std::vector<Token> toks = tokenize("Player's age?");
  REQUIRE(toks.size() == 5);
  CHECK(toks[0].lower == "player");
  CHECK(toks[1].lower == "'");
  CHECK(toks[2].lower == "s");
  CHECK(toks[3].lower == "age");
  CHECK(toks[4].lower == "?");
  CHECK(toks[0].text == "Player");  // raw casing preserved
}

TEST_CASE("tokenize keeps digit-flanked separators inside one token") {
  const std::vector<Token> toks = tokenize("56,355 rows");
  REQUIRE(toks.size() == 2);
  CHECK(toks[0].lower == "56,355");
  CHECK(toks[1].lower == "rows");
  CHECK(Cell::from_raw("56,355").numeric == 56355.0);

  const std::vector<Token> dec = tokenize("scored 3.5 points");
  REQUIRE(dec.size() == 3);
  CHECK(dec[1].text == "3.5");
}

TEST_CASE("tokenize separates trailing punctuation from numbers") {
  // "," or "." not flanked by digits on both sides ends the token.
  const std::vector<Token> toks = tokenize("in 1966, he won 12.");
  std::vector<std::string> texts;
  for (const Token& t : toks) texts.push_back(t.text);
  CHECK(texts == std::vector<std::string>{"in", "1966", ",", "he", "won", "12", "."});
}

TEST_CASE("token offsets re-slice the raw string") {
  const std::string raw = "What is  Terrence Ross' nationality, in 2,006?";
  for (const Token& t : tokenize(raw)) {
    CHECK(raw.substr(t.char_start, t.char_end - t.char_start) == t.text);
    CHECK(t.char_start < t.char_end);
  }
}

TEST_CASE("token offsets are ordered and non-overlapping") {
  const std::vector<Token> toks = tokenize("a bb  ccc; 1,2 x99");
  for (std::size_t i = 1; i < toks.size(); ++i) {
    CHECK(toks[i - 1].char_end <= toks[i].char_start);
  }
}

TEST_CASE("numeric grammar") {
  CHECK(parse_numeric("42") == 42.0);
  CHECK(parse_numeric("-7") == -7.0);
  CHECK(parse_numeric("+3") == 3.0);
  CHECK(parse_numeric("3.5") == 3.5);
  CHECK(parse_numeric("1,234") == 1234.0);
  CHECK(parse_numeric("1,234,567.25") == 1234567.25);
  CHECK(parse_numeric("  12  ") == 12.0);
  CHECK(parse_numeric(".5") == 0.5);

  CHECK_FALSE(parse_numeric("").has_value());
  CHECK_FALSE(parse_numeric("   ").has_value());
  CHECK_FALSE(parse_numeric("abc").has_value());
  CHECK_FALSE(parse_numeric("x9y").has_value());
  CHECK_FALSE(parse_numeric("3.5.1").has_value());
  CHECK_FALSE(parse_numeric("1.2,3").has_value());  // separator after the point
  CHECK_FALSE(parse_numeric("-").has_value());
  CHECK_FALSE(parse_numeric("n/a").has_value());
  CHECK_FALSE(parse_numeric("12e3").has_value());  // no exponent form
  CHECK_FALSE(parse_numeric("1 2").has_value());
}

TEST_CASE("cell parses its numeric view once") {
  const Cell c = Cell::from_raw(" 1,250.5 ");
  CHECK(c.raw == " 1,250.5 ");
  REQUIRE(c.numeric.has_value());
  CHECK(*c.numeric == 1250.5);
  CHECK_FALSE(Cell::from_raw("two words").numeric.has_value());
}

TEST_CASE("column representation joins type, table, and name") {
  Column col;
  col.index = 0;
  col.name = "age";
  col.type = ColumnType::real;
  col.table_name = "people";
  CHECK(column_representation(col) == "real people age");
}

TEST_CASE("column representation skips empty components and lowercases") {
  Column col;
  col.name = "Age";
  col.type = ColumnType::real;
  col.table_name = "";
  CHECK(column_representation(col) == "real age");

  col.table_name = "  ";
  CHECK(column_representation(col) == "real age");

  col.type = ColumnType::text;
  col.name = "No. of Episodes";
  col.table_name = "1-1000";
  CHECK(column_representation(col) == "text 1-1000 no. of episodes");
}

TEST_CASE("input pair layout and segment ids") {
  Column col;
  col.name = "name";
  col.type = ColumnType::text;
  col.table_name = "people";
  const Question q = Question::from_raw("who is tallest here");  // 4 tokens
  REQUIRE(q.tokens.size() == 4);

  const InputPair pair = make_input_pair(col, q);
  const std::size_t m = tokenize(pair.column_repr).size();
  REQUIRE(pair.sequence.size() == 1 + m + 1 + 4 + 1);
  CHECK(pair.sequence.front() == kClsMarker);
  CHECK(pair.sequence[1 + m] == kSepMarker);
  CHECK(pair.sequence.back() == kSepMarker);

  REQUIRE(pair.segment_ids.size() == pair.sequence.size());
  // Segment 0 through the first separator inclusive, segment 1 after.
  for (std::size_t i = 0; i <= 1 + m; ++i) CHECK(pair.segment_ids[i] == 0);
  for (std::size_t i = 2 + m; i < pair.segment_ids.size(); ++i) CHECK(pair.segment_ids[i] == 1);
}

TEST_CASE("input pair is deterministic") {
  Column col;
  col.name = "points";
  col.type = ColumnType::real;
  col.table_name = "t1";
  const Question q = Question::from_raw("How many points in 2,006?");
  const InputPair a = make_input_pair(col, q);
  const InputPair b = make_input_pair(col, q);
  CHECK(a.sequence == b.sequence);
  CHECK(a.segment_ids == b.segment_ids);
  CHECK(a.column_repr == b.column_repr);
}

TEST_CASE("column type names round-trip") {
  CHECK(column_type_from_string("text") == ColumnType::text);
  CHECK(column_type_from_string("real") == ColumnType::real);
  CHECK(std::string(to_string(ColumnType::real)) == "real");
  CHECK_THROWS_AS(column_type_from_string("integer"), std::invalid_argument);
}
