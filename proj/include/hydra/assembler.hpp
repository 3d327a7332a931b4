#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "hydra/ranker.hpp"
#include "hydra/schema.hpp"
#include "hydra/scores.hpp"
#include "hydra/sql.hpp"

namespace hydra {

struct ExtractedValue {
  bool present = false;
  int start = 0;  // 1-based token positions, inclusive; 0 when absent
  int end = 0;
  double score = 0.0;  // start[s] * end[e] of the chosen span
  std::string text;
};

struct AssembleOptions {
  int max_span = kDefaultMaxSpan;
};

/// Best value span for one column under its start/end distributions.
/// Candidates are spans 1 <= s <= e <= n no longer than max_span, scored by
/// start[s] * end[e]; ties prefer the earlier start, then the earlier end.
/// The value is absent when position 0 (the no-answer sentinel on both
/// distributions) strictly outscores every candidate, or when no candidate
/// has positive score.
inline ExtractedValue extract_value(const ColumnScores& scores, const Question& question,
                                    int max_span = kDefaultMaxSpan) {
  const int n = static_cast<int>(question.tokens.size());
  if (static_cast<int>(scores.start_dist.size()) != n + 1 ||
      static_cast<int>(scores.end_dist.size()) != n + 1)
    throw std::invalid_argument("extract_value: span distribution length mismatch");
  if (max_span < 1) throw std::invalid_argument("extract_value: max_span must be positive");

  ExtractedValue best;
  for (int s = 1; s <= n; ++s) {
    const int last = std::min(n, s + max_span - 1);
    for (int e = s; e <= last; ++e) {
      const double sc = scores.start_dist[static_cast<std::size_t>(s)] *
                        scores.end_dist[static_cast<std::size_t>(e)];
      if (sc > best.score) {
        best.score = sc;
        best.start = s;
        best.end = e;
      }
    }
  }
  const double sentinel = scores.start_dist[0] * scores.end_dist[0];
  if (best.score <= 0.0 || sentinel > best.score) return ExtractedValue{};

  best.present = true;
  const Token& first = question.tokens[static_cast<std::size_t>(best.start - 1)];
  const Token& last = question.tokens[static_cast<std::size_t>(best.end - 1)];
  best.text = question.raw.substr(first.char_start, last.char_end - first.char_start);
  return best;
}

struct AssembleResult {
  SqlQuery query;
  int predicted_selects = 0;
  int predicted_wheres = 0;
  // Columns whose value span came out absent; the condition falls back to the
  // single most likely start token and should be treated as low confidence.
  std::vector<int> low_confidence_where;
};

namespace detail {

inline int argmax_code(const std::vector<double>& dist) {
  return argmax_smallest(dist);
}

// Fallback for an absent value: the one token the start distribution likes
// most (sentinel excluded), as a single-token span.
inline std::string fallback_value(const ColumnScores& scores, const Question& question) {
  if (question.tokens.empty()) return {};
  int best = 1;
  for (int s = 2; s < static_cast<int>(scores.start_dist.size()); ++s)
    if (scores.start_dist[static_cast<std::size_t>(s)] >
        scores.start_dist[static_cast<std::size_t>(best)])
      best = s;
  const Token& tok = question.tokens[static_cast<std::size_t>(best - 1)];
  return question.raw.substr(tok.char_start, tok.char_end - tok.char_start);
}

}  // namespace detail

/// Rule-based query assembly over per-column scores:
///   1. fuse the select and where counts across columns,
///   2. take the top-ranked select columns with their argmax aggregation,
///   3. take the top-ranked where columns with argmax operator and extracted
///      value span,
///   4. FROM is the union of the table names of every used column.
/// scores[i] must describe columns[i]; all distributions must share the
/// question's token count.
inline AssembleResult assemble(const std::vector<Column>& columns,
                               const std::vector<ColumnScores>& scores, const Question& question,
                               const AssembleOptions& opts = {}) {
  if (columns.empty()) throw std::invalid_argument("assemble: no columns");
  if (columns.size() != scores.size())
    throw std::invalid_argument("assemble: columns and scores differ in length");

  std::vector<int> indices(columns.size());
  std::unordered_map<int, std::size_t> position;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    indices[i] = columns[i].index;
    if (!position.emplace(columns[i].index, i).second)
      throw std::invalid_argument("assemble: duplicate column index " +
                                  std::to_string(columns[i].index));
  }

  AssembleResult out;
  out.predicted_selects = fuse_select_count(scores).predicted;
  out.predicted_wheres = fuse_where_count(scores).predicted;

  for (int col : top_k(scores, indices, RankTask::select,
                       static_cast<std::size_t>(out.predicted_selects))) {
    const ColumnScores& s = scores[position.at(col)];
    out.query.select.emplace_back(agg_from_code(detail::argmax_code(s.agg_dist)), col);
  }

  for (int col : top_k(scores, indices, RankTask::where,
                       static_cast<std::size_t>(out.predicted_wheres))) {
    const ColumnScores& s = scores[position.at(col)];
    Condition cond;
    cond.column_index = col;
    cond.op = cond_from_code(detail::argmax_code(s.op_dist));
    const ExtractedValue value = extract_value(s, question, opts.max_span);
    if (value.present) {
      cond.value = value.text;
    } else {
      cond.value = detail::fallback_value(s, question);
      out.low_confidence_where.push_back(col);
    }
    out.query.where.push_back(std::move(cond));
  }

  // Deduplicated in first-use order: select columns first, then conditions.
  std::vector<std::string> tables;
  auto add_table = [&tables, &position, &columns](int col) {
    const std::string& t = columns[position.at(col)].table_name;
    if (t.empty()) return;
    if (std::find(tables.begin(), tables.end(), t) == tables.end()) tables.push_back(t);
  };
  for (const auto& [agg, col] : out.query.select) add_table(col);
  for (const Condition& c : out.query.where) add_table(c.column_index);
  out.query.from_tables = std::move(tables);
  return out;
}

}  // namespace hydra
