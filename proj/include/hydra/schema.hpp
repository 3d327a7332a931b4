#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hydra {

/// Column data types, matching the WikiSQL "types" vocabulary.
enum class ColumnType { text, real };

inline const char* to_string(ColumnType t) {
  return t == ColumnType::text ? "text" : "real";
}

inline ColumnType column_type_from_string(std::string_view s) {
  if (s == "text") return ColumnType::text;
  if (s == "real") return ColumnType::real;
  throw std::invalid_argument("unknown column type: " + std::string(s));
}

namespace detail {

inline bool is_space_byte(unsigned char c) { return std::isspace(c) != 0; }
inline bool is_digit_byte(unsigned char c) { return std::isdigit(c) != 0; }

// Word bytes: ASCII alphanumerics plus anything non-ASCII, so multi-byte
// UTF-8 characters stay inside a single word token.
inline bool is_word_byte(unsigned char c) {
  return std::isalnum(c) != 0 || c >= 0x80;
}

inline char lower_byte(char c) {
  return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

inline std::string to_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) out.push_back(lower_byte(c));
  return out;
}

inline std::string_view trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && is_space_byte(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space_byte(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Lowercase, trim, and collapse internal whitespace runs to single spaces.
inline std::string fold(std::string_view s) {
  std::string_view t = trim(s);
  std::string out;
  out.reserve(t.size());
  bool in_space = false;
  for (char c : t) {
    if (is_space_byte(static_cast<unsigned char>(c))) {
      in_space = true;
      continue;
    }
    if (in_space && !out.empty()) out.push_back(' ');
    in_space = false;
    out.push_back(lower_byte(c));
  }
  return out;
}

}  // namespace detail

/// Numeric cell grammar: optional sign, digits with optional "," thousands
/// separators (stripped before parsing), optional decimal point. No exponent.
inline std::optional<double> parse_numeric(std::string_view text) {
  std::string_view t = detail::trim(text);
  if (t.empty()) return std::nullopt;
  std::string digits;
  digits.reserve(t.size());
  std::size_t i = 0;
  if (t[0] == '+' || t[0] == '-') {
    if (t[0] == '-') digits.push_back('-');
    ++i;
  }
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < t.size(); ++i) {
    char c = t[i];
    if (detail::is_digit_byte(static_cast<unsigned char>(c))) {
      seen_digit = true;
      digits.push_back(c);
    } else if (c == ',') {
      if (seen_point) return std::nullopt;
    } else if (c == '.') {
      if (seen_point) return std::nullopt;
      seen_point = true;
      digits.push_back('.');
    } else {
      return std::nullopt;
    }
  }
  if (!seen_digit) return std::nullopt;
  double value = 0.0;
  const char* begin = digits.data();
  const char* end = begin + digits.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return value;
}

/// One table cell. `numeric` is present exactly when `raw` parses under the
/// numeric grammar above.
struct Cell {
  std::string raw;
  std::optional<double> numeric;

  static Cell from_raw(std::string raw) {
    Cell c;
    c.numeric = parse_numeric(raw);
    c.raw = std::move(raw);
    return c;
  }

  bool operator==(const Cell&) const = default;
};

struct Column {
  int index = 0;  // table-local ordinal, 0-based
  std::string name;
  ColumnType type = ColumnType::text;
  std::string table_name;

  bool operator==(const Column&) const = default;
};

struct Table {
  std::string id;
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  bool operator==(const Table&) const = default;
};

/// A question token. `text` is the exact raw slice [char_start, char_end);
/// `lower` is the case-folded view used for matching.
struct Token {
  std::string text;
  std::string lower;
  std::size_t char_start = 0;
  std::size_t char_end = 0;
};

/// Word/punctuation tokenizer with character offsets. Word tokens are runs of
/// alphanumeric (or non-ASCII) bytes; "," and "." stay inside a token when
/// flanked by digits, so "56,355" and "3.5" survive as single tokens. Any
/// other non-space character becomes a one-character token.
inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    if (detail::is_space_byte(c)) {
      ++i;
      continue;
    }
    std::size_t j = i;
    if (detail::is_word_byte(c)) {
      while (j < n) {
        unsigned char cj = static_cast<unsigned char>(text[j]);
        if (detail::is_word_byte(cj)) {
          ++j;
        } else if ((cj == ',' || cj == '.') && j > i && j + 1 < n &&
                   detail::is_digit_byte(static_cast<unsigned char>(text[j - 1])) &&
                   detail::is_digit_byte(static_cast<unsigned char>(text[j + 1]))) {
          ++j;
        } else {
          break;
        }
      }
    } else {
      j = i + 1;
    }
    Token tok;
    tok.text = std::string(text.substr(i, j - i));
    tok.lower = detail::to_lower(tok.text);
    tok.char_start = i;
    tok.char_end = j;
    tokens.push_back(std::move(tok));
    i = j;
  }
  return tokens;
}

struct Question {
  std::string raw;
  std::vector<Token> tokens;

  static Question from_raw(std::string raw) {
    Question q;
    q.tokens = tokenize(raw);
    q.raw = std::move(raw);
    return q;
  }
};

/// Column text representation: "<type> <table name> <column name>", empty
/// components skipped, lowercased.
inline std::string column_representation(const Column& column) {
  std::string out;
  auto append = [&out](std::string_view part) {
    std::string_view t = detail::trim(part);
    if (t.empty()) return;
    if (!out.empty()) out.push_back(' ');
    for (char c : t) out.push_back(detail::lower_byte(c));
  };
  append(to_string(column.type));
  append(column.table_name);
  append(column.name);
  return out;
}

/// The question-column input pair: marker-delimited token sequence
/// [CLS] x_1..x_m [SEP] y_1..y_n [SEP] with segment ids 0 for [CLS] through
/// the first [SEP] inclusive and 1 for the rest.
struct InputPair {
  std::string column_repr;
  Question question;
  std::vector<std::string> sequence;
  std::vector<int> segment_ids;
};

inline constexpr const char* kClsMarker = "[CLS]";
inline constexpr const char* kSepMarker = "[SEP]";

inline InputPair make_input_pair(const Column& column, const Question& question) {
  InputPair pair;
  pair.column_repr = column_representation(column);
  pair.question = question;
  pair.sequence.push_back(kClsMarker);
  pair.segment_ids.push_back(0);
  for (const Token& t : tokenize(pair.column_repr)) {
    pair.sequence.push_back(t.lower);
    pair.segment_ids.push_back(0);
  }
  pair.sequence.push_back(kSepMarker);
  pair.segment_ids.push_back(0);
  for (const Token& t : question.tokens) {
    pair.sequence.push_back(t.lower);
    pair.segment_ids.push_back(1);
  }
  pair.sequence.push_back(kSepMarker);
  pair.segment_ids.push_back(1);
  return pair;
}

}  // namespace hydra
