#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "hydra/encoder.hpp"
#include "hydra/linear_encoder.hpp"
#include "hydra/schema.hpp"
#include "hydra/scores.hpp"
#include "hydra/sql.hpp"

namespace hydra {

/// File-level failures: unreadable paths, malformed containers. Line-level
/// problems inside a readable file become LineIssues instead.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct LineIssue {
  std::size_t line = 0;  // 1-based
  std::string message;
};

struct TableLoad {
  std::map<std::string, Table> tables;
  std::vector<LineIssue> errors;
};

namespace detail {

inline std::ifstream open_for_reading(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  return in;
}

inline bool blank_line(const std::string& line) {
  for (char c : line)
    if (!is_space_byte(static_cast<unsigned char>(c))) return false;
  return true;
}

}  // namespace detail

/// Loads a JSONL tables file ({"id", "header", "types", "rows"} per line).
/// Malformed lines are reported with their line numbers and skipped; the
/// well-formed remainder still loads.
inline TableLoad load_tables(const std::string& path) {
  std::ifstream in = detail::open_for_reading(path);
  TableLoad out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_line(line)) continue;
    auto fail = [&out, line_no](std::string message) {
      out.errors.push_back(LineIssue{line_no, std::move(message)});
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("invalid JSON: ") + e.what());
      continue;
    }
    try {
      if (!j.is_object()) throw std::invalid_argument("line is not a JSON object");
      if (!j.contains("id") || !j["id"].is_string())
        throw std::invalid_argument("missing string field \"id\"");
      const std::string id = j["id"].get<std::string>();
      if (!j.contains("header") || !j["header"].is_array())
        throw std::invalid_argument("missing array field \"header\"");
      if (!j.contains("types") || !j["types"].is_array())
        throw std::invalid_argument("missing array field \"types\"");
      if (!j.contains("rows") || !j["rows"].is_array())
        throw std::invalid_argument("missing array field \"rows\"");

      Table table;
      table.id = id;
      const nlohmann::json& header = j["header"];
      const nlohmann::json& types = j["types"];
      if (header.size() != types.size())
        throw std::invalid_argument("header and types differ in length");
      if (header.empty()) throw std::invalid_argument("table has no columns");
      for (std::size_t c = 0; c < header.size(); ++c) {
        if (!header[c].is_string()) throw std::invalid_argument("header entry is not a string");
        if (!types[c].is_string()) throw std::invalid_argument("types entry is not a string");
        Column col;
        col.index = static_cast<int>(c);
        col.name = header[c].get<std::string>();
        col.type = column_type_from_string(types[c].get<std::string>());
        col.table_name = id;
        table.columns.push_back(std::move(col));
      }
      for (const nlohmann::json& row : j["rows"]) {
        if (!row.is_array()) throw std::invalid_argument("row is not an array");
        if (row.size() != header.size())
          throw std::invalid_argument("row arity mismatch: " + std::to_string(row.size()) +
                                      " cells for " + std::to_string(header.size()) +
                                      " columns");
        std::vector<Cell> cells;
        cells.reserve(row.size());
        for (const nlohmann::json& v : row)
          cells.push_back(Cell::from_raw(detail::json_value_to_string(v, "rows")));
        table.rows.push_back(std::move(cells));
      }
      if (out.tables.count(id)) throw std::invalid_argument("duplicate table id: " + id);
      out.tables.emplace(id, std::move(table));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  return out;
}

/// Writes tables back in the same JSONL shape. Cells are emitted as their raw
/// strings, so load → serialize → load is the identity.
inline void serialize_tables(const std::string& path, const std::map<std::string, Table>& tables) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path);
  for (const auto& [id, table] : tables) {
    nlohmann::json header = nlohmann::json::array();
    nlohmann::json types = nlohmann::json::array();
    for (const Column& c : table.columns) {
      header.push_back(c.name);
      types.push_back(to_string(c.type));
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const std::vector<Cell>& row : table.rows) {
      nlohmann::json r = nlohmann::json::array();
      for (const Cell& cell : row) r.push_back(cell.raw);
      rows.push_back(std::move(r));
    }
    out << nlohmann::json{{"id", id},
                          {"header", std::move(header)},
                          {"types", std::move(types)},
                          {"rows", std::move(rows)}}
               .dump()
        << "\n";
  }
  if (!out) throw IoError("failed writing tables: " + path);
}

struct Example {
  Question question;
  std::string table_id;
  SqlQuery gold;
};

struct ExampleLoad {
  std::vector<Example> examples;
  std::vector<LineIssue> errors;
  std::vector<LineIssue> warnings;  // loaded anyway, e.g. over-long condition lists
};

/// Loads a JSONL examples file ({"question", "table_id", "sql"} per line),
/// resolving table ids and range-checking column references. Condition lists
/// longer than the count head supports load with a warning.
inline ExampleLoad load_examples(const std::string& path,
                                 const std::map<std::string, Table>& tables) {
  std::ifstream in = detail::open_for_reading(path);
  ExampleLoad out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_line(line)) continue;
    auto fail = [&out, line_no](std::string message) {
      out.errors.push_back(LineIssue{line_no, std::move(message)});
    };
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(std::string("invalid JSON: ") + e.what());
      continue;
    }
    try {
      if (!j.is_object()) throw std::invalid_argument("line is not a JSON object");
      if (!j.contains("question") || !j["question"].is_string())
        throw std::invalid_argument("missing string field \"question\"");
      if (!j.contains("table_id") || !j["table_id"].is_string())
        throw std::invalid_argument("missing string field \"table_id\"");
      if (!j.contains("sql")) throw std::invalid_argument("missing field \"sql\"");

      Example ex;
      ex.question = Question::from_raw(j["question"].get<std::string>());
      if (ex.question.tokens.empty()) throw std::invalid_argument("question has no tokens");
      ex.table_id = j["table_id"].get<std::string>();
      auto it = tables.find(ex.table_id);
      if (it == tables.end())
        throw std::invalid_argument("unknown table id: " + ex.table_id);
      ex.gold = from_wikisql_json(j["sql"]);
      const int width = static_cast<int>(it->second.columns.size());
      for (const auto& [agg, col] : ex.gold.select)
        if (col < 0 || col >= width)
          throw std::invalid_argument("select column out of range: " + std::to_string(col));
      for (const Condition& c : ex.gold.where)
        if (c.column_index < 0 || c.column_index >= width)
          throw std::invalid_argument("condition column out of range: " +
                                      std::to_string(c.column_index));
      if (static_cast<int>(ex.gold.where.size()) > kNwMax)
        out.warnings.push_back(
            LineIssue{line_no, "query has " + std::to_string(ex.gold.where.size()) +
                                   " conditions, more than the supported " +
                                   std::to_string(kNwMax)});
      ex.gold.from_tables = {ex.table_id};
      out.examples.push_back(std::move(ex));
    } catch (const std::invalid_argument& e) {
      fail(e.what());
    }
  }
  return out;
}

/// Writes examples in the same JSONL shape load_examples reads.
inline void write_examples(const std::string& path, const std::vector<Example>& examples) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path);
  for (const Example& ex : examples) {
    out << nlohmann::json{{"question", ex.question.raw},
                          {"table_id", ex.table_id},
                          {"sql", to_wikisql_json(ex.gold)}}
               .dump()
        << "\n";
  }
  if (!out) throw IoError("failed writing examples: " + path);
}

namespace detail {

// Alignment key: lowercased with every whitespace byte removed, so spacing
// differences between a value and the question text cannot block a match.
inline std::string squash(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s)
    if (!is_space_byte(static_cast<unsigned char>(c))) out.push_back(lower_byte(c));
  return out;
}

}  // namespace detail

/// Finds the leftmost token span whose text, under the alignment fold
/// (case fold + whitespace removal), equals the folded value. Character-level
/// matches that do not land on token boundaries are rejected, which keeps the
/// guarantee that the span's folded text equals the folded value.
inline std::optional<SpanRef> align_value_span(const Question& question,
                                               const std::string& value) {
  const std::string needle = detail::squash(value);
  if (needle.empty()) return std::nullopt;

  std::string hay;
  std::vector<int> owner;  // 1-based token index of each hay character
  std::vector<bool> starts_token;
  for (std::size_t t = 0; t < question.tokens.size(); ++t) {
    const std::string& piece = question.tokens[t].lower;
    for (std::size_t k = 0; k < piece.size(); ++k) {
      hay.push_back(piece[k]);
      owner.push_back(static_cast<int>(t) + 1);
      starts_token.push_back(k == 0);
    }
  }
  if (hay.size() < needle.size()) return std::nullopt;

  for (std::size_t pos = hay.find(needle); pos != std::string::npos;
       pos = hay.find(needle, pos + 1)) {
    const std::size_t last = pos + needle.size() - 1;
    const bool at_start = starts_token[pos];
    const bool at_end = last + 1 == hay.size() || starts_token[last + 1];
    if (at_start && at_end && owner[pos] <= owner[last])
      return SpanRef{owner[pos], owner[last]};
  }
  return std::nullopt;
}

/// Writes one {"query": {"sel", "agg", "conds"}} object per line.
inline void write_predictions(const std::string& path, const std::vector<SqlQuery>& predictions) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path);
  for (const SqlQuery& q : predictions)
    out << nlohmann::json{{"query", to_wikisql_json(q)}}.dump() << "\n";
  if (!out) throw IoError("failed writing predictions: " + path);
}

inline std::vector<SqlQuery> load_predictions(const std::string& path) {
  std::ifstream in = detail::open_for_reading(path);
  std::vector<SqlQuery> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::blank_line(line)) continue;
    try {
      nlohmann::json j = nlohmann::json::parse(line);
      if (!j.is_object() || !j.contains("query"))
        throw std::invalid_argument("missing field \"query\"");
      out.push_back(from_wikisql_json(j["query"]));
    } catch (const std::exception& e) {
      throw IoError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

inline void write_report(const std::string& path, const nlohmann::json& report) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open file for writing: " + path);
  out << report.dump(2) << "\n";
  if (!out) throw IoError("failed writing report: " + path);
}

/// Label-derivation bookkeeping printed after training-set construction.
struct LabelingAudit {
  std::size_t examples = 0;
  std::size_t conditions = 0;
  std::size_t unaligned_values = 0;   // span-masked conditions
  std::size_t where_collisions = 0;   // extra conditions on an already-used column
  std::size_t select_collisions = 0;  // extra select items on an already-used column
};

struct TrainingBuild {
  std::vector<TrainSample> samples;
  LabelingAudit audit;
};

/// Expands examples into one training sample per (column, question) pair,
/// aligning gold condition values to question spans. Unalignable values keep
/// their ranking labels and mask the span loss.
inline TrainingBuild build_training_samples(const std::vector<Example>& examples,
                                            const std::map<std::string, Table>& tables,
                                            int ns_max = kDefaultNsMax) {
  TrainingBuild out;
  for (const Example& ex : examples) {
    auto it = tables.find(ex.table_id);
    if (it == tables.end()) throw IoError("unknown table id in examples: " + ex.table_id);
    const Table& table = it->second;

    std::vector<std::optional<SpanRef>> spans;
    spans.reserve(ex.gold.where.size());
    for (const Condition& c : ex.gold.where) {
      std::optional<SpanRef> span = align_value_span(ex.question, c.value);
      ++out.audit.conditions;
      if (!span) ++out.audit.unaligned_values;
      spans.push_back(span);
    }

    std::map<int, int> where_uses, select_uses;
    for (const Condition& c : ex.gold.where) ++where_uses[c.column_index];
    for (const auto& [agg, col] : ex.gold.select) ++select_uses[col];
    for (const auto& [col, n] : where_uses)
      if (n > 1) out.audit.where_collisions += static_cast<std::size_t>(n - 1);
    for (const auto& [col, n] : select_uses)
      if (n > 1) out.audit.select_collisions += static_cast<std::size_t>(n - 1);

    for (const Column& col : table.columns) {
      TrainSample sample;
      sample.column = col;
      sample.question = ex.question;
      sample.labels = derive_labels(ex.gold, col, ex.question, spans, ns_max);
      out.samples.push_back(std::move(sample));
    }
    ++out.audit.examples;
  }
  return out;
}

}  // namespace hydra
