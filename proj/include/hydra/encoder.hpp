#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hydra/schema.hpp"
#include "hydra/scores.hpp"
#include "hydra/sql.hpp"

namespace hydra {

/// The scoring contract every encoder implementation satisfies: one
/// ColumnScores per (column, question) pair, deterministic given the encoder
/// state. Downstream ranking, assembly, and execution-guided decoding depend
/// only on these values.
class Encoder {
 public:
  virtual ~Encoder() = default;
  virtual ColumnScores score(const Column& column, const Question& question) const = 0;
};

namespace detail {

inline void require_nonempty_question(const Question& question) {
  if (question.tokens.empty()) throw std::invalid_argument("empty question");
}

}  // namespace detail

/// Derives per-column training labels from a gold query. `value_spans` is
/// aligned 1:1 with gold.where and supplies the 1-based token span of each
/// condition value (absent when alignment failed). When the column appears in
/// several select items or conditions, the first occurrence labels it; the
/// caller is responsible for auditing such collisions.
///
/// Clause counts are clamped into the head ranges {1..ns_max} and {0..kNwMax}.
inline TaskLabels derive_labels(const SqlQuery& gold, const Column& column,
                                const Question& question,
                                const std::vector<std::optional<SpanRef>>& value_spans,
                                int ns_max = kDefaultNsMax) {
  if (value_spans.size() != gold.where.size())
    throw std::invalid_argument("value_spans not aligned with gold conditions");

  TaskLabels labels;
  labels.ns = std::clamp(static_cast<int>(gold.select.size()), 1, ns_max);
  labels.nw = std::clamp(static_cast<int>(gold.where.size()), 0, kNwMax);

  for (const auto& [agg, col] : gold.select) {
    if (col == column.index) {
      labels.is_select = true;
      labels.agg = agg;
      break;
    }
  }
  for (std::size_t i = 0; i < gold.where.size(); ++i) {
    if (gold.where[i].column_index != column.index) continue;
    labels.is_where = true;
    labels.op = gold.where[i].op;
    if (value_spans[i].has_value()) {
      const SpanRef span = *value_spans[i];
      const int n = static_cast<int>(question.tokens.size());
      if (span.start < 1 || span.end < span.start || span.end > n)
        throw std::invalid_argument("value span out of range: [" + std::to_string(span.start) +
                                    ", " + std::to_string(span.end) + "] over " +
                                    std::to_string(n) + " tokens");
      labels.start = span.start;
      labels.end = span.end;
    } else {
      labels.span_masked = true;
    }
    break;
  }
  labels.is_relevant = labels.is_select || labels.is_where;
  return labels;
}

}  // namespace hydra
