#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hydra/assembler.hpp"
#include "hydra/executor.hpp"
#include "hydra/ranker.hpp"
#include "hydra/schema.hpp"
#include "hydra/scores.hpp"
#include "hydra/sql.hpp"

namespace hydra {

struct SelectCandidate {
  int column = 0;
  AggOp agg = AggOp::None;
  double score = 0.0;  // p_select * P(agg | column)
};

struct ConditionCandidate {
  int column = 0;
  CondOp op = CondOp::Eq;
  int start = 0;  // 1-based inclusive span
  int end = 0;
  std::string value;
  double score = 0.0;  // p_where * P(op | column) * start[s] * end[e]
};

struct EgOptions {
  // Select beam width. 0 picks the default 6 * min(columns, 4), which keeps
  // every (aggregation, column) pair on tables of up to four columns.
  int k1 = 0;
  int k2 = 50;
  int spans_per_column = 4;
  int max_span = kDefaultMaxSpan;
};

/// Joint (aggregation, column) beam, best first. Zero-probability pairs are
/// dropped; ties order by column index, then aggregation code.
inline std::vector<SelectCandidate> beam_select(const std::vector<Column>& columns,
                                                const std::vector<ColumnScores>& scores,
                                                int k1 = 0) {
  if (columns.size() != scores.size())
    throw std::invalid_argument("beam_select: columns and scores differ in length");
  std::vector<SelectCandidate> beam;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (int a = 0; a < kAggOpCount; ++a) {
      const double sc = scores[i].p_select * scores[i].agg_dist[static_cast<std::size_t>(a)];
      if (sc > 0.0)
        beam.push_back(SelectCandidate{columns[i].index, agg_from_code(a), sc});
    }
  }
  std::sort(beam.begin(), beam.end(), [](const SelectCandidate& x, const SelectCandidate& y) {
    if (x.score != y.score) return x.score > y.score;
    if (x.column != y.column) return x.column < y.column;
    return code(x.agg) < code(y.agg);
  });
  if (k1 > 0 && static_cast<int>(beam.size()) > k1) beam.resize(static_cast<std::size_t>(k1));
  return beam;
}

/// Joint (column, operator, value span) beam, best first. Each column
/// contributes its top spans_per_column spans; ties order by column,
/// operator code, then span position.
inline std::vector<ConditionCandidate> beam_where(const std::vector<Column>& columns,
                                                  const std::vector<ColumnScores>& scores,
                                                  const Question& question,
                                                  const EgOptions& opts = {}) {
  if (columns.size() != scores.size())
    throw std::invalid_argument("beam_where: columns and scores differ in length");
  const int n = static_cast<int>(question.tokens.size());
  std::vector<ConditionCandidate> beam;

  for (std::size_t i = 0; i < columns.size(); ++i) {
    const ColumnScores& s = scores[i];
    if (static_cast<int>(s.start_dist.size()) != n + 1 ||
        static_cast<int>(s.end_dist.size()) != n + 1)
      throw std::invalid_argument("beam_where: span distribution length mismatch");

    struct Span {
      int start, end;
      double score;
    };
    std::vector<Span> spans;
    for (int st = 1; st <= n; ++st) {
      const int last = std::min(n, st + opts.max_span - 1);
      for (int en = st; en <= last; ++en) {
        const double sc = s.start_dist[static_cast<std::size_t>(st)] *
                          s.end_dist[static_cast<std::size_t>(en)];
        if (sc > 0.0) spans.push_back(Span{st, en, sc});
      }
    }
    std::sort(spans.begin(), spans.end(), [](const Span& a, const Span& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.start != b.start) return a.start < b.start;
      return a.end < b.end;
    });
    if (static_cast<int>(spans.size()) > opts.spans_per_column)
      spans.resize(static_cast<std::size_t>(opts.spans_per_column));

    for (const Span& sp : spans) {
      const Token& first = question.tokens[static_cast<std::size_t>(sp.start - 1)];
      const Token& last = question.tokens[static_cast<std::size_t>(sp.end - 1)];
      std::string text = question.raw.substr(first.char_start, last.char_end - first.char_start);
      for (int o = 0; o < kCondOpCount; ++o) {
        const double sc = s.p_where * s.op_dist[static_cast<std::size_t>(o)] * sp.score;
        if (sc > 0.0)
          beam.push_back(ConditionCandidate{columns[i].index, cond_from_code(o), sp.start,
                                            sp.end, text, sc});
      }
    }
  }

  std::sort(beam.begin(), beam.end(),
            [](const ConditionCandidate& x, const ConditionCandidate& y) {
              if (x.score != y.score) return x.score > y.score;
              if (x.column != y.column) return x.column < y.column;
              if (x.op != y.op) return code(x.op) < code(y.op);
              if (x.start != y.start) return x.start < y.start;
              return x.end < y.end;
            });
  if (opts.k2 > 0 && static_cast<int>(beam.size()) > opts.k2)
    beam.resize(static_cast<std::size_t>(opts.k2));
  return beam;
}

struct EgResult {
  SqlQuery query;
  std::vector<bool> select_verified;  // parallel to query.select
  std::vector<bool> where_verified;   // parallel to query.where
  bool fully_verified() const {
    for (bool v : select_verified)
      if (!v) return false;
    for (bool v : where_verified)
      if (!v) return false;
    return true;
  }
};

/// Execution-guided decoding. Fuses the clause counts, then walks each beam
/// accepting candidates whose probe query executes without error to a
/// non-empty result; a select probe runs the candidate clause alone and a
/// condition probe selects the condition's own column filtered by it. A
/// column is used at most once per clause. If verification cannot fill a
/// clause, the best remaining candidates are taken unverified so the output
/// shape still matches the fused counts where possible.
inline EgResult eg_decode(const Table& table, const std::vector<ColumnScores>& scores,
                          const Question& question, const EgOptions& opts = {}) {
  if (table.columns.empty()) throw std::invalid_argument("eg_decode: table has no columns");
  if (table.columns.size() != scores.size())
    throw std::invalid_argument("eg_decode: columns and scores differ in length");

  const int ns = fuse_select_count(scores).predicted;
  const int nw = fuse_where_count(scores).predicted;

  const int k1 = opts.k1 > 0
                     ? opts.k1
                     : 6 * std::min(static_cast<int>(table.columns.size()), 4);
  EgResult out;
  const std::vector<SelectCandidate> sel_beam = beam_select(table.columns, scores, k1);
  std::unordered_set<int> used_select;

  auto probe_select = [&table](const SelectCandidate& c) {
    SqlQuery probe;
    probe.select.emplace_back(c.agg, c.column);
    const ExecResult r = execute(table, probe);
    return exec_ok(r) && !is_empty(std::get<ResultSet>(r));
  };
  for (const SelectCandidate& c : sel_beam) {
    if (static_cast<int>(out.query.select.size()) >= ns) break;
    if (used_select.count(c.column)) continue;
    if (!probe_select(c)) continue;
    out.query.select.emplace_back(c.agg, c.column);
    out.select_verified.push_back(true);
    used_select.insert(c.column);
  }
  for (const SelectCandidate& c : sel_beam) {
    if (static_cast<int>(out.query.select.size()) >= ns) break;
    if (used_select.count(c.column)) continue;
    out.query.select.emplace_back(c.agg, c.column);
    out.select_verified.push_back(false);
    used_select.insert(c.column);
  }

  const std::vector<ConditionCandidate> cond_beam =
      beam_where(table.columns, scores, question, opts);
  std::unordered_set<int> used_where;

  auto probe_condition = [&table](const ConditionCandidate& c) {
    SqlQuery probe;
    probe.select.emplace_back(AggOp::None, c.column);
    probe.where.push_back(Condition{c.column, c.op, c.value});
    const ExecResult r = execute(table, probe);
    return exec_ok(r) && !is_empty(std::get<ResultSet>(r));
  };
  for (const ConditionCandidate& c : cond_beam) {
    if (static_cast<int>(out.query.where.size()) >= nw) break;
    if (used_where.count(c.column)) continue;
    if (!probe_condition(c)) continue;
    out.query.where.push_back(Condition{c.column, c.op, c.value});
    out.where_verified.push_back(true);
    used_where.insert(c.column);
  }
  for (const ConditionCandidate& c : cond_beam) {
    if (static_cast<int>(out.query.where.size()) >= nw) break;
    if (used_where.count(c.column)) continue;
    out.query.where.push_back(Condition{c.column, c.op, c.value});
    out.where_verified.push_back(false);
    used_where.insert(c.column);
  }

  std::unordered_map<int, std::size_t> position;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    position.emplace(table.columns[i].index, i);
  // Deduplicated in first-use order, matching assemble.
  std::vector<std::string> tables;
  auto add_table = [&](int col) {
    auto it = position.find(col);
    if (it == position.end()) return;
    const std::string& t = table.columns[it->second].table_name;
    if (t.empty()) return;
    if (std::find(tables.begin(), tables.end(), t) == tables.end()) tables.push_back(t);
  };
  for (const auto& [agg, col] : out.query.select) add_table(col);
  for (const Condition& c : out.query.where) add_table(c.column_index);
  out.query.from_tables = std::move(tables);
  return out;
}

}  // namespace hydra
