#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "hydra/data_io.hpp"
#include "hydra/schema.hpp"
#include "hydra/sql.hpp"

namespace hydra {

struct SynthConfig {
  int tables = 60;
  int questions_per_table = 40;
  int min_rows = 6;
  int max_rows = 12;
  std::uint64_t seed = 7;
};

struct SynthData {
  std::map<std::string, Table> tables;
  std::vector<Example> examples;
};

namespace detail {

// Uniform draw via modulo: not perfectly unbiased, but deterministic across
// platforms, which the reproducibility contract needs more.
inline int randint(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

template <typename T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& pool) {
  return pool[static_cast<std::size_t>(randint(rng, 0, static_cast<int>(pool.size()) - 1))];
}

struct SynthVocab {
  std::vector<std::string> text_columns;
  std::vector<std::string> real_columns;
  std::map<std::string, std::vector<std::string>> values;  // per text column name
};

// Value pools are disjoint from column names and from each other's tokens,
// so a value never reads as a column mention (and vice versa).
inline const SynthVocab& synth_vocab() {
  static const SynthVocab vocab = [] {
    SynthVocab v;
    v.text_columns = {"name", "team",  "city",   "country", "player",
                      "coach", "venue", "nation", "driver",  "school"};
    v.real_columns = {"year", "points", "rank",  "wins", "goals",
                      "losses", "age",  "score", "laps", "round"};
    v.values["name"] = {"smith", "jones", "miller", "davis", "garcia", "wilson", "moore", "taylor"};
    v.values["team"] = {"tigers", "sharks", "eagles", "hawks", "bulls", "wolves", "giants", "royals"};
    v.values["city"] = {"boston",  "chicago",  "denver",   "seattle",
                        "atlanta", "portland", "new york", "san diego"};
    v.values["country"] = {"france", "brazil", "japan", "canada", "spain", "italy", "kenya", "norway"};
    v.values["player"] = {"ronaldo", "messi", "kane", "salah", "neymar", "modric", "ramos", "pele"};
    v.values["coach"] = {"ferguson",  "wenger", "mourinho", "guardiola",
                         "ancelotti", "klopp",  "zidane",   "conte"};
    v.values["venue"] = {"wembley", "anfield", "camden",  "fenway",
                         "lambeau", "soldier", "arrowhead", "staples"};
    v.values["nation"] = {"germany", "mexico", "egypt", "china", "india", "ghana", "chile", "poland"};
    v.values["driver"] = {"hamilton", "vettel", "alonso", "senna", "prost", "lauda", "hunt", "button"};
    v.values["school"] = {"harvard",   "stanford", "yale",   "princeton",
                          "duke",      "cornell",  "baylor", "gonzaga"};
    return v;
  }();
  return vocab;
}

template <typename T>
std::vector<T> sample_without_replacement(std::mt19937_64& rng, std::vector<T> pool, int k) {
  std::vector<T> out;
  for (int i = 0; i < k; ++i) {
    const int j = randint(rng, 0, static_cast<int>(pool.size()) - 1);
    out.push_back(pool[static_cast<std::size_t>(j)]);
    pool.erase(pool.begin() + j);
  }
  return out;
}

inline Table make_synth_table(std::mt19937_64& rng, const std::string& id, int min_rows,
                              int max_rows) {
  const SynthVocab& vocab = synth_vocab();
  const int ncols = randint(rng, 3, 5);
  const int n_text = randint(rng, 1, 2);
  const int n_real = ncols - n_text;

  std::vector<std::pair<std::string, ColumnType>> cols;
  for (const std::string& name : sample_without_replacement(rng, vocab.text_columns, n_text))
    cols.emplace_back(name, ColumnType::text);
  for (const std::string& name : sample_without_replacement(rng, vocab.real_columns, n_real))
    cols.emplace_back(name, ColumnType::real);
  for (std::size_t i = cols.size(); i > 1; --i)
    std::swap(cols[i - 1], cols[static_cast<std::size_t>(randint(rng, 0, static_cast<int>(i) - 1))]);

  Table table;
  table.id = id;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    Column col;
    col.index = static_cast<int>(c);
    col.name = cols[c].first;
    col.type = cols[c].second;
    col.table_name = id;
    table.columns.push_back(std::move(col));
  }
  const int rows = randint(rng, min_rows, max_rows);
  for (int r = 0; r < rows; ++r) {
    std::vector<Cell> row;
    for (const Column& col : table.columns) {
      if (col.type == ColumnType::text) {
        row.push_back(Cell::from_raw(pick(rng, vocab.values.at(col.name))));
      } else {
        row.push_back(Cell::from_raw(std::to_string(randint(rng, 2, 97))));
      }
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline const char* agg_word(AggOp agg) {
  switch (agg) {
    case AggOp::Sum: return "total";
    case AggOp::Avg: return "average";
    case AggOp::Max: return "highest";
    case AggOp::Min: return "lowest";
    default: return "";
  }
}

struct SynthCondition {
  int column = 0;
  CondOp op = CondOp::Eq;
  std::string value;
};

inline std::string condition_phrase(const Table& table, const SynthCondition& c) {
  const std::string& col = table.columns[static_cast<std::size_t>(c.column)].name;
  switch (c.op) {
    case CondOp::Gt: return col + " is more than " + c.value;
    case CondOp::Lt: return col + " is less than " + c.value;
    default: return col + " is " + c.value;
  }
}

inline Example make_synth_example(std::mt19937_64& rng, const Table& table) {
  const int ncols = static_cast<int>(table.columns.size());
  const int s = randint(rng, 0, ncols - 1);
  const bool s_real = table.columns[static_cast<std::size_t>(s)].type == ColumnType::real;

  AggOp agg = AggOp::None;
  {
    const int roll = randint(rng, 0, 39);
    if (s_real) {
      if (roll >= 20 && roll < 26) agg = AggOp::Count;
      else if (roll >= 26 && roll < 30) agg = AggOp::Sum;
      else if (roll >= 30 && roll < 34) agg = AggOp::Avg;
      else if (roll >= 34 && roll < 37) agg = AggOp::Max;
      else if (roll >= 37) agg = AggOp::Min;
    } else if (roll >= 32) {
      agg = AggOp::Count;
    }
  }

  int nw;
  {
    const int roll = randint(rng, 0, 39);
    nw = roll < 4 ? 0 : roll < 30 ? 1 : 2;
  }

  std::vector<SynthCondition> conds;
  for (int attempt = 0; attempt < 20 && static_cast<int>(conds.size()) < nw; ++attempt) {
    conds.clear();
    std::vector<int> candidates;
    for (int c = 0; c < ncols; ++c)
      if (c != s) candidates.push_back(c);
    const std::vector<int> chosen = sample_without_replacement(rng, candidates, nw);
    const std::size_t anchor = static_cast<std::size_t>(randint(
        rng, 0, static_cast<int>(table.rows.size()) - 1));
    for (int w : chosen) {
      const Column& col = table.columns[static_cast<std::size_t>(w)];
      const Cell& cell = table.rows[anchor][static_cast<std::size_t>(w)];
      SynthCondition c;
      c.column = w;
      c.op = CondOp::Eq;
      // The count template has no operator phrase, so it keeps equality.
      if (col.type == ColumnType::real && agg != AggOp::Count) {
        const int roll = randint(rng, 0, 39);
        if (roll >= 28 && roll < 34) c.op = CondOp::Gt;
        else if (roll >= 34) c.op = CondOp::Lt;
      }
      const int cell_int = static_cast<int>(cell.numeric.value_or(0));
      switch (c.op) {
        case CondOp::Gt: c.value = std::to_string(cell_int - 1); break;
        case CondOp::Lt: c.value = std::to_string(cell_int + 1); break;
        default: c.value = cell.raw; break;
      }
      conds.push_back(std::move(c));
    }
    // Repeated value text would make the leftmost span ambiguous; retry.
    if (conds.size() == 2 && conds[0].value == conds[1].value) continue;
    break;
  }
  if (conds.size() == 2 && conds[0].value == conds[1].value) conds.pop_back();

  const std::string& s_name = table.columns[static_cast<std::size_t>(s)].name;
  std::string text;
  if (agg == AggOp::Count) {
    text = "how many " + s_name;
    if (conds.empty()) {
      text += " are there ?";
    } else {
      text += " have";
      for (std::size_t i = 0; i < conds.size(); ++i) {
        const std::string& col =
            table.columns[static_cast<std::size_t>(conds[i].column)].name;
        text += (i ? " and a " : " a ") + col + " of " + conds[i].value;
      }
      text += " ?";
    }
  } else {
    text = "what is the ";
    if (agg != AggOp::None) text += std::string(agg_word(agg)) + " ";
    text += s_name;
    for (std::size_t i = 0; i < conds.size(); ++i)
      text += (i ? " and the " : " when the ") + condition_phrase(table, conds[i]);
    text += " ?";
  }

  Example ex;
  ex.question = Question::from_raw(text);
  ex.table_id = table.id;
  ex.gold.select.emplace_back(agg, s);
  for (const SynthCondition& c : conds)
    ex.gold.where.push_back(Condition{c.column, c.op, c.value});
  ex.gold.from_tables = {table.id};
  return ex;
}

}  // namespace detail

/// Deterministic templated corpus over random single-table schemas. Every
/// condition value is lifted from an actual cell (shifted by one for order
/// comparisons), so gold queries always execute to non-empty results, and
/// every value appears verbatim in the question so spans align.
inline SynthData generate_synthetic(const SynthConfig& config = {}) {
  if (config.tables < 1 || config.questions_per_table < 1)
    throw std::invalid_argument("synthetic corpus dimensions must be positive");
  if (config.min_rows < 2 || config.max_rows < config.min_rows)
    throw std::invalid_argument("bad synthetic row bounds");

  std::mt19937_64 rng(config.seed);
  SynthData out;
  for (int t = 0; t < config.tables; ++t) {
    char id[32];
    std::snprintf(id, sizeof(id), "synth_%03d", t);
    Table table = detail::make_synth_table(rng, id, config.min_rows, config.max_rows);
    for (int q = 0; q < config.questions_per_table; ++q)
      out.examples.push_back(detail::make_synth_example(rng, table));
    out.tables.emplace(table.id, std::move(table));
  }
  return out;
}

}  // namespace hydra
