#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include "hydra/schema.hpp"
#include "hydra/sql.hpp"

namespace hydra {

struct ResultSet {
  enum class Kind { values, scalar };
  Kind kind = Kind::values;
  std::vector<Cell> values;  // row-major: matched_rows x select width
  double scalar = 0.0;
  std::size_t matched_rows = 0;
};

struct ExecError {
  std::string message;
};

using ExecResult = std::variant<ResultSet, ExecError>;

inline bool exec_ok(const ExecResult& r) { return std::holds_alternative<ResultSet>(r); }

inline const std::string& exec_error_message(const ExecResult& r) {
  return std::get<ExecError>(r).message;
}

/// Empty means the query matched no rows. Scalar results over zero matched
/// rows (COUNT = 0, SUM = 0) count as empty too; verification treats them as
/// evidence against the probed condition.
inline bool is_empty(const ResultSet& r) { return r.matched_rows == 0; }

namespace detail {

struct PreparedCondition {
  int column = 0;
  CondOp op = CondOp::Eq;
  Cell value;
  std::string folded;
};

inline bool condition_holds(const Cell& cell, const PreparedCondition& c) {
  switch (c.op) {
    case CondOp::Eq:
      if (cell.numeric && c.value.numeric) return *cell.numeric == *c.value.numeric;
      return fold_value(cell.raw) == c.folded;
    case CondOp::Gt:
      return cell.numeric && c.value.numeric && *cell.numeric > *c.value.numeric;
    case CondOp::Lt:
      return cell.numeric && c.value.numeric && *cell.numeric < *c.value.numeric;
  }
  return false;
}

}  // namespace detail

/// Single-table execution. Equality compares numerically when both sides
/// parse as numbers and otherwise by lowercased, trimmed text; order
/// comparisons are numeric-only and never match non-numeric cells. COUNT
/// counts matched rows; SUM over no numeric cells is 0; AVG, MAX, and MIN
/// over no numeric cells are errors, as is any numeric aggregate on a
/// text-typed column. Multiple select columns are only allowed without an
/// aggregate and come back zipped row-major.
inline ExecResult execute(const Table& table, const SqlQuery& query) {
  const int width = static_cast<int>(table.columns.size());
  if (query.select.empty()) return ExecError{"query has no select items"};
  for (const auto& [agg, col] : query.select)
    if (col < 0 || col >= width)
      return ExecError{"select column index out of range: " + std::to_string(col)};
  for (const Condition& c : query.where)
    if (c.column_index < 0 || c.column_index >= width)
      return ExecError{"where column index out of range: " + std::to_string(c.column_index)};
  if (query.select.size() > 1)
    for (const auto& [agg, col] : query.select)
      if (agg != AggOp::None) return ExecError{"aggregate over multiple select columns"};

  std::vector<detail::PreparedCondition> conds;
  conds.reserve(query.where.size());
  for (const Condition& c : query.where) {
    detail::PreparedCondition p;
    p.column = c.column_index;
    p.op = c.op;
    p.value = Cell::from_raw(c.value);
    p.folded = detail::fold_value(c.value);
    conds.push_back(std::move(p));
  }

  std::vector<std::size_t> matched;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const std::vector<Cell>& row = table.rows[r];
    bool ok = true;
    for (const detail::PreparedCondition& c : conds) {
      if (!detail::condition_holds(row[static_cast<std::size_t>(c.column)], c)) {
        ok = false;
        break;
      }
    }
    if (ok) matched.push_back(r);
  }

  ResultSet out;
  out.matched_rows = matched.size();
  const auto& [agg, col] = query.select.front();

  if (agg == AggOp::None) {
    out.kind = ResultSet::Kind::values;
    out.values.reserve(matched.size() * query.select.size());
    for (std::size_t r : matched)
      for (const auto& [a, c] : query.select)
        out.values.push_back(table.rows[r][static_cast<std::size_t>(c)]);
    return out;
  }

  out.kind = ResultSet::Kind::scalar;
  if (agg == AggOp::Count) {
    out.scalar = static_cast<double>(matched.size());
    return out;
  }

  if (table.columns[static_cast<std::size_t>(col)].type != ColumnType::real)
    return ExecError{"numeric aggregate on text column '" +
                     table.columns[static_cast<std::size_t>(col)].name + "'"};
  std::vector<double> nums;
  nums.reserve(matched.size());
  for (std::size_t r : matched) {
    const Cell& cell = table.rows[r][static_cast<std::size_t>(col)];
    if (cell.numeric) nums.push_back(*cell.numeric);
  }
  switch (agg) {
    case AggOp::Sum: {
      double s = 0.0;
      for (double v : nums) s += v;
      out.scalar = s;
      return out;
    }
    case AggOp::Avg: {
      if (nums.empty()) return ExecError{"average over no numeric values"};
      double s = 0.0;
      for (double v : nums) s += v;
      out.scalar = s / static_cast<double>(nums.size());
      return out;
    }
    case AggOp::Max: {
      if (nums.empty()) return ExecError{"maximum over no numeric values"};
      out.scalar = *std::max_element(nums.begin(), nums.end());
      return out;
    }
    case AggOp::Min: {
      if (nums.empty()) return ExecError{"minimum over no numeric values"};
      out.scalar = *std::min_element(nums.begin(), nums.end());
      return out;
    }
    default:
      break;
  }
  return ExecError{"unsupported aggregate"};
}

namespace detail {

// Order cells for multiset comparison: non-numeric before numeric, then by
// folded text or value. Stable enough for the tolerant pairwise pass.
inline bool cell_less(const Cell& a, const Cell& b) {
  const bool an = a.numeric.has_value();
  const bool bn = b.numeric.has_value();
  if (an != bn) return !an;
  if (an) {
    if (*a.numeric != *b.numeric) return *a.numeric < *b.numeric;
    return fold_value(a.raw) < fold_value(b.raw);
  }
  return fold_value(a.raw) < fold_value(b.raw);
}

inline bool scalar_close(double a, double b, double rel_tol) {
  return std::abs(a - b) <= rel_tol * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace detail

/// Result comparison for execution accuracy. Scalars compare with a relative
/// tolerance; value sets compare as multisets, numeric cells tolerantly and
/// text cells by lowercased, trimmed equality.
inline bool results_equal(const ResultSet& a, const ResultSet& b, double rel_tol = 1e-9) {
  if (a.kind != b.kind) return false;
  if (a.kind == ResultSet::Kind::scalar) return detail::scalar_close(a.scalar, b.scalar, rel_tol);
  if (a.values.size() != b.values.size()) return false;
  std::vector<Cell> av = a.values;
  std::vector<Cell> bv = b.values;
  std::sort(av.begin(), av.end(), detail::cell_less);
  std::sort(bv.begin(), bv.end(), detail::cell_less);
  for (std::size_t i = 0; i < av.size(); ++i) {
    const bool an = av[i].numeric.has_value();
    const bool bn = bv[i].numeric.has_value();
    if (an != bn) return false;
    if (an) {
      if (!detail::scalar_close(*av[i].numeric, *bv[i].numeric, rel_tol)) return false;
    } else if (detail::fold_value(av[i].raw) != detail::fold_value(bv[i].raw)) {
      return false;
    }
  }
  return true;
}

inline bool results_equal(const ExecResult& a, const ExecResult& b, double rel_tol = 1e-9) {
  if (!exec_ok(a) || !exec_ok(b)) return false;
  return results_equal(std::get<ResultSet>(a), std::get<ResultSet>(b), rel_tol);
}

}  // namespace hydra
