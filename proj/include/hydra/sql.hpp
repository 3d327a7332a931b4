#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hydra/schema.hpp"

namespace hydra {

/// Aggregation operators with WikiSQL integer codes (0 = none).
enum class AggOp { None = 0, Max = 1, Min = 2, Count = 3, Sum = 4, Avg = 5 };

inline constexpr int kAggOpCount = 6;

inline AggOp agg_from_code(int code) {
  if (code < 0 || code >= kAggOpCount)
    throw std::invalid_argument("unknown aggregation code: " + std::to_string(code));
  return static_cast<AggOp>(code);
}

inline int code(AggOp op) { return static_cast<int>(op); }

inline const char* to_sql_string(AggOp op) {
  switch (op) {
    case AggOp::None: return "";
    case AggOp::Max: return "MAX";
    case AggOp::Min: return "MIN";
    case AggOp::Count: return "COUNT";
    case AggOp::Sum: return "SUM";
    case AggOp::Avg: return "AVG";
  }
  return "";
}

/// Condition operators with WikiSQL integer codes.
enum class CondOp { Eq = 0, Gt = 1, Lt = 2 };

inline constexpr int kCondOpCount = 3;

inline CondOp cond_from_code(int code) {
  if (code < 0 || code >= kCondOpCount)
    throw std::invalid_argument("unknown condition operator code: " + std::to_string(code));
  return static_cast<CondOp>(code);
}

inline int code(CondOp op) { return static_cast<int>(op); }

inline const char* to_sql_string(CondOp op) {
  switch (op) {
    case CondOp::Eq: return "=";
    case CondOp::Gt: return ">";
    case CondOp::Lt: return "<";
  }
  return "=";
}

struct Condition {
  int column_index = 0;
  CondOp op = CondOp::Eq;
  std::string value;

  friend bool operator==(const Condition& a, const Condition& b) {
    return a.column_index == b.column_index && a.op == b.op && a.value == b.value;
  }
};

/// Structured SQL query: select list of (agg, column), from table ids, and a
/// conjunction of where conditions. No nesting.
struct SqlQuery {
  std::vector<std::pair<AggOp, int>> select;
  std::vector<std::string> from_tables;
  std::vector<Condition> where;
};

namespace detail {

// Value comparison key: lowercased and trimmed. Internal whitespace is kept.
inline std::string fold_value(std::string_view v) {
  return to_lower(trim(v));
}

}  // namespace detail

/// Comparison copy: select sorted by column index, conditions sorted by
/// (column, op code, folded value), values replaced by their folded form.
/// With fold_values=false values keep their exact text.
inline SqlQuery canonicalize(const SqlQuery& q, bool fold_values = true) {
  SqlQuery out = q;
  std::sort(out.select.begin(), out.select.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  if (fold_values) {
    for (Condition& c : out.where) c.value = detail::fold_value(c.value);
  }
  std::sort(out.where.begin(), out.where.end(), [](const Condition& a, const Condition& b) {
    return std::tie(a.column_index, a.op, a.value) < std::tie(b.column_index, b.op, b.value);
  });
  return out;
}

/// Exact-match equality on canonicalized forms. FROM lists are ignored: they
/// are redundant in the single-table profile and predictions round-tripped
/// through the WikiSQL encoding do not carry them.
inline bool logical_form_equal(const SqlQuery& a, const SqlQuery& b, bool fold_values = true) {
  SqlQuery ca = canonicalize(a, fold_values);
  SqlQuery cb = canonicalize(b, fold_values);
  return ca.select == cb.select && ca.where == cb.where;
}

/// WikiSQL JSON encoding: {"sel": int, "agg": int, "conds": [[col, op, value], ...]}.
/// Requires exactly one select item.
inline nlohmann::json to_wikisql_json(const SqlQuery& q) {
  if (q.select.size() != 1)
    throw std::invalid_argument("WikiSQL encoding requires exactly one select item, got " +
                                std::to_string(q.select.size()));
  nlohmann::json conds = nlohmann::json::array();
  for (const Condition& c : q.where) {
    conds.push_back(nlohmann::json::array({c.column_index, code(c.op), c.value}));
  }
  return nlohmann::json{{"sel", q.select[0].second},
                        {"agg", code(q.select[0].first)},
                        {"conds", std::move(conds)}};
}

namespace detail {

inline std::string json_value_to_string(const nlohmann::json& v, const char* field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number() || v.is_boolean()) return v.dump();
  throw std::invalid_argument(std::string("field \"") + field + "\" has unsupported value type");
}

}  // namespace detail

inline SqlQuery from_wikisql_json(const nlohmann::json& obj) {
  if (!obj.is_object()) throw std::invalid_argument("query is not a JSON object");
  auto require = [&obj](const char* field) -> const nlohmann::json& {
    auto it = obj.find(field);
    if (it == obj.end())
      throw std::invalid_argument(std::string("missing field \"") + field + "\"");
    return *it;
  };
  const nlohmann::json& sel = require("sel");
  const nlohmann::json& agg = require("agg");
  const nlohmann::json& conds = require("conds");
  if (!sel.is_number_integer()) throw std::invalid_argument("field \"sel\" is not an integer");
  if (!agg.is_number_integer()) throw std::invalid_argument("field \"agg\" is not an integer");
  if (!conds.is_array()) throw std::invalid_argument("field \"conds\" is not an array");

  SqlQuery q;
  q.select.emplace_back(agg_from_code(agg.get<int>()), sel.get<int>());
  for (const nlohmann::json& c : conds) {
    if (!c.is_array() || c.size() != 3)
      throw std::invalid_argument("field \"conds\" entry is not a [col, op, value] triple");
    if (!c[0].is_number_integer())
      throw std::invalid_argument("field \"conds\" column is not an integer");
    if (!c[1].is_number_integer())
      throw std::invalid_argument("field \"conds\" operator is not an integer");
    Condition cond;
    cond.column_index = c[0].get<int>();
    cond.op = cond_from_code(c[1].get<int>());
    cond.value = detail::json_value_to_string(c[2], "conds");
    q.where.push_back(std::move(cond));
  }
  return q;
}

/// Debug-only SQL text rendering; not used by any comparison.
inline std::string to_sql_text(const SqlQuery& q, const Table* table = nullptr) {
  auto col_name = [&](int idx) -> std::string {
    if (table && idx >= 0 && static_cast<std::size_t>(idx) < table->columns.size())
      return "\"" + table->columns[idx].name + "\"";
    return "col" + std::to_string(idx);
  };
  std::string out = "SELECT ";
  for (std::size_t i = 0; i < q.select.size(); ++i) {
    if (i) out += ", ";
    const auto& [agg, idx] = q.select[i];
    if (agg == AggOp::None) {
      out += col_name(idx);
    } else {
      out += std::string(to_sql_string(agg)) + "(" + col_name(idx) + ")";
    }
  }
  out += " FROM ";
  if (!q.from_tables.empty()) {
    for (std::size_t i = 0; i < q.from_tables.size(); ++i) {
      if (i) out += ", ";
      out += q.from_tables[i];
    }
  } else if (table) {
    out += table->id;
  } else {
    out += "?";
  }
  if (!q.where.empty()) {
    out += " WHERE ";
    for (std::size_t i = 0; i < q.where.size(); ++i) {
      if (i) out += " AND ";
      out += col_name(q.where[i].column_index);
      out += " ";
      out += to_sql_string(q.where[i].op);
      out += " '" + q.where[i].value + "'";
    }
  }
  return out;
}

}  // namespace hydra
