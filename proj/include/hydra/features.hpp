#pragma once

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hydra/encoder.hpp"
#include "hydra/schema.hpp"

namespace hydra {

/// Sparse feature map. std::map keeps iteration deterministic, which matters
/// for reproducible training.
using SparseFeatures = std::map<std::string, double>;

/// Features for one (column, question) pair: a pair-level map plus one map
/// per question token (index j-1 holds features of 1-based position j).
struct PairFeatures {
  SparseFeatures pair;
  std::vector<SparseFeatures> token;
};

namespace detail {

inline constexpr const char* kBoundaryStart = "<s>";
inline constexpr const char* kBoundaryEnd = "</s>";

inline std::set<std::string> char_trigrams(const std::string& s) {
  std::set<std::string> grams;
  if (s.size() < 3) {
    if (!s.empty()) grams.insert(s);
    return grams;
  }
  for (std::size_t i = 0; i + 3 <= s.size(); ++i) grams.insert(s.substr(i, 3));
  return grams;
}

inline double trigram_jaccard(const std::string& a, const std::string& b) {
  std::set<std::string> ga = char_trigrams(a);
  std::set<std::string> gb = char_trigrams(b);
  if (ga.empty() && gb.empty()) return 0.0;
  std::size_t inter = 0;
  for (const std::string& g : ga) inter += gb.count(g);
  std::size_t uni = ga.size() + gb.size() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

// First full occurrence of `needle` as a contiguous token subsequence of
// `haystack`; returns the 0-based start index or -1.
inline int find_token_subsequence(const std::vector<std::string>& haystack,
                                  const std::vector<std::string>& needle) {
  if (needle.empty() || haystack.size() < needle.size()) return -1;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (haystack[i + j] != needle[j]) {
        match = false;
        break;
      }
    }
    if (match) return static_cast<int>(i);
  }
  return -1;
}

}  // namespace detail

/// Deterministic sparse features shared by the desk-scale encoders:
/// token-overlap statistics, character trigram similarity, column type
/// indicators, lexical context around the column-name mention, question
/// unigrams, and per-token cues (membership in the column name, numeric
/// shape, capitalization, neighbor overlap, distance from the mention).
inline PairFeatures extract_features(const Column& column, const Question& question) {
  detail::require_nonempty_question(question);

  PairFeatures f;
  const std::size_t n = question.tokens.size();

  std::vector<std::string> q_lower;
  q_lower.reserve(n);
  for (const Token& t : question.tokens) q_lower.push_back(t.lower);

  std::vector<std::string> col_tokens;
  for (const Token& t : tokenize(column.name)) col_tokens.push_back(t.lower);
  std::set<std::string> col_token_set(col_tokens.begin(), col_tokens.end());

  // Pair-level statistics.
  f.pair["bias"] = 1.0;
  int overlap = 0;
  for (const std::string& t : q_lower) overlap += col_token_set.count(t) ? 1 : 0;
  f.pair["overlap_count"] = overlap;
  f.pair["overlap_ratio"] = static_cast<double>(overlap) / static_cast<double>(n);
  int covered = 0;
  for (const std::string& t : col_tokens) {
    if (std::find(q_lower.begin(), q_lower.end(), t) != q_lower.end()) ++covered;
  }
  f.pair["col_coverage"] =
      col_tokens.empty() ? 0.0 : static_cast<double>(covered) / static_cast<double>(col_tokens.size());

  const std::string folded_question = detail::fold(question.raw);
  const std::string folded_col = detail::fold(column.name);
  f.pair["char3_jaccard"] = detail::trigram_jaccard(column_representation(column), folded_question);
  if (!folded_col.empty() && folded_question.find(folded_col) != std::string::npos)
    f.pair["exact_substr"] = 1.0;
  f.pair[column.type == ColumnType::real ? "type_real" : "type_text"] = 1.0;

  // Lexical context around the first full mention of the column name.
  const int match_begin = detail::find_token_subsequence(q_lower, col_tokens);
  const int match_end = match_begin < 0 ? -1 : match_begin + static_cast<int>(col_tokens.size());
  if (match_begin >= 0) {
    f.pair["has_match"] = 1.0;
    const std::string prev =
        match_begin > 0 ? q_lower[match_begin - 1] : detail::kBoundaryStart;
    f.pair["match_prev=" + prev] = 1.0;
    for (int d = 0; d < 3; ++d) {
      const std::size_t idx = static_cast<std::size_t>(match_end + d);
      const std::string next = idx < n ? q_lower[idx] : detail::kBoundaryEnd;
      f.pair["match_next" + std::to_string(d + 1) + "=" + next] = 1.0;
      if (idx >= n) break;
    }
  } else {
    f.pair["no_match"] = 1.0;
  }

  for (const std::string& t : q_lower) f.pair["uni=" + t] = 1.0;

  // Per-token features, positions 1..n.
  f.token.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    SparseFeatures& tf = f.token[j];
    const Token& tok = question.tokens[j];
    tf["t_bias"] = 1.0;
    if (col_token_set.count(tok.lower)) tf["t_in_col"] = 1.0;
    if (parse_numeric(tok.text).has_value()) {
      tf["t_numeric"] = 1.0;
      if (column.type == ColumnType::real) tf["t_numeric_real_col"] = 1.0;
    }
    if (!tok.text.empty() && std::isupper(static_cast<unsigned char>(tok.text[0])))
      tf["t_capitalized"] = 1.0;
    const std::string prev = j > 0 ? q_lower[j - 1] : detail::kBoundaryStart;
    const std::string next = j + 1 < n ? q_lower[j + 1] : detail::kBoundaryEnd;
    if (j > 0 && col_token_set.count(prev)) tf["t_prev_in_col"] = 1.0;
    if (j + 1 < n && col_token_set.count(next)) tf["t_next_in_col"] = 1.0;
    tf["t_prev=" + prev] = 1.0;
    tf["t_next=" + next] = 1.0;
    if (j == 0) tf["t_first"] = 1.0;
    if (j + 1 == n) tf["t_last"] = 1.0;
    if (match_begin >= 0) {
      const int pos = static_cast<int>(j);
      if (pos < match_begin) tf["t_before_col"] = 1.0;
      const int dist = pos - match_end + 1;  // 1 = immediately after the mention
      if (dist >= 1 && dist <= 4) tf["t_after_col_d" + std::to_string(dist)] = 1.0;
    }
  }
  return f;
}

}  // namespace hydra
