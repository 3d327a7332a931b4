#pragma once

#include <algorithm>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "hydra/data_io.hpp"
#include "hydra/executor.hpp"
#include "hydra/schema.hpp"
#include "hydra/sql.hpp"

namespace hydra {

inline constexpr int kReportFormatVersion = 1;
inline constexpr const char* kReportFormatName = "hydra-eval-report";

struct EvalOptions {
  bool fold_values = true;   // value comparison is case- and trim-insensitive
  double result_tol = 1e-9;  // relative tolerance for executed results
};

struct ExampleFlags {
  bool lf = false;
  bool ex = false;
  bool s_col = false;  // select column sets equal
  bool s_agg = false;  // multiset of aggregation codes equal
  bool w_num = false;  // condition counts equal
  bool w_col = false;  // condition column multisets equal
  bool w_op = false;   // (column, operator) multisets equal
  bool w_val = false;  // canonicalized condition triples equal
  bool pred_exec_error = false;
  bool gold_exec_error = false;
};

/// Scores one prediction against its gold query. The execution flag is false
/// whenever the prediction fails to execute; a gold execution failure is
/// surfaced as an audit flag and also leaves ex false, since there is no
/// reference result to compare against.
inline ExampleFlags score_example(const SqlQuery& pred, const SqlQuery& gold, const Table& table,
                                  const EvalOptions& opts = {}) {
  ExampleFlags f;
  f.lf = logical_form_equal(pred, gold, opts.fold_values);

  auto columns_of = [](const SqlQuery& q, bool unique) {
    std::vector<int> cols;
    for (const auto& [agg, col] : q.select) cols.push_back(col);
    std::sort(cols.begin(), cols.end());
    if (unique) cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    return cols;
  };
  f.s_col = columns_of(pred, true) == columns_of(gold, true);

  auto aggs_of = [](const SqlQuery& q) {
    std::vector<int> aggs;
    for (const auto& [agg, col] : q.select) aggs.push_back(code(agg));
    std::sort(aggs.begin(), aggs.end());
    return aggs;
  };
  f.s_agg = aggs_of(pred) == aggs_of(gold);

  f.w_num = pred.where.size() == gold.where.size();

  auto where_keys = [&opts](const SqlQuery& q, bool with_op, bool with_val) {
    std::vector<std::tuple<int, int, std::string>> keys;
    for (const Condition& c : q.where) {
      std::string v;
      if (with_val) v = opts.fold_values ? detail::fold_value(c.value) : c.value;
      keys.emplace_back(c.column_index, with_op ? code(c.op) : 0, std::move(v));
    }
    std::sort(keys.begin(), keys.end());
    return keys;
  };
  f.w_col = where_keys(pred, false, false) == where_keys(gold, false, false);
  f.w_op = where_keys(pred, true, false) == where_keys(gold, true, false);
  f.w_val = where_keys(pred, true, true) == where_keys(gold, true, true);

  const ExecResult pr = execute(table, pred);
  const ExecResult gr = execute(table, gold);
  f.pred_exec_error = !exec_ok(pr);
  f.gold_exec_error = !exec_ok(gr);
  f.ex = exec_ok(pr) && exec_ok(gr) &&
         results_equal(std::get<ResultSet>(pr), std::get<ResultSet>(gr), opts.result_tol);
  return f;
}

struct EvalReport {
  std::size_t examples = 0;
  std::size_t gold_conditions = 0;
  double lf_acc = 0.0, ex_acc = 0.0;
  double s_col = 0.0, s_agg = 0.0, w_num = 0.0, w_col = 0.0, w_op = 0.0, w_val = 0.0;
  std::size_t pred_exec_errors = 0;
  std::size_t gold_exec_errors = 0;
  std::size_t span_alignment_failures = 0;  // gold values not found in questions
};

/// Evaluates predictions 1:1 against examples. Scoring is pure per example,
/// so it fans out across `workers` threads; the reduction only counts flags,
/// making the report independent of scheduling.
inline EvalReport evaluate(const std::vector<Example>& examples,
                           const std::vector<SqlQuery>& predictions,
                           const std::map<std::string, Table>& tables,
                           const EvalOptions& opts = {}, int workers = 1) {
  if (examples.size() != predictions.size())
    throw std::invalid_argument("got " + std::to_string(predictions.size()) +
                                " predictions for " + std::to_string(examples.size()) +
                                " examples");
  std::vector<const Table*> bound(examples.size());
  for (std::size_t i = 0; i < examples.size(); ++i) {
    auto it = tables.find(examples[i].table_id);
    if (it == tables.end())
      throw std::invalid_argument("unknown table id: " + examples[i].table_id);
    bound[i] = &it->second;
  }

  std::vector<ExampleFlags> flags(examples.size());
  std::vector<std::size_t> span_failures_per(examples.size(), 0);
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      flags[i] = score_example(predictions[i], examples[i].gold, *bound[i], opts);
      for (const Condition& c : examples[i].gold.where)
        if (!align_value_span(examples[i].question, c.value)) ++span_failures_per[i];
    }
  };
  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(examples.size())));
  if (n_workers <= 1 || examples.size() < 2) {
    run(0, examples.size());
  } else {
    std::vector<std::thread> pool;
    const std::size_t chunk = (examples.size() + n_workers - 1) / n_workers;
    for (int w = 0; w < n_workers; ++w) {
      const std::size_t begin = static_cast<std::size_t>(w) * chunk;
      const std::size_t end = std::min(examples.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run, begin, end);
    }
    for (std::thread& t : pool) t.join();
  }

  EvalReport r;
  r.examples = examples.size();
  std::size_t lf = 0, ex = 0, s_col = 0, s_agg = 0, w_num = 0, w_col = 0, w_op = 0, w_val = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    const ExampleFlags& f = flags[i];
    lf += f.lf;
    ex += f.ex;
    s_col += f.s_col;
    s_agg += f.s_agg;
    w_num += f.w_num;
    w_col += f.w_col;
    w_op += f.w_op;
    w_val += f.w_val;
    r.pred_exec_errors += f.pred_exec_error;
    r.gold_exec_errors += f.gold_exec_error;
    r.span_alignment_failures += span_failures_per[i];
    r.gold_conditions += examples[i].gold.where.size();
  }
  if (r.examples > 0) {
    const double n = static_cast<double>(r.examples);
    r.lf_acc = lf / n;
    r.ex_acc = ex / n;
    r.s_col = s_col / n;
    r.s_agg = s_agg / n;
    r.w_num = w_num / n;
    r.w_col = w_col / n;
    r.w_op = w_op / n;
    r.w_val = w_val / n;
  }
  return r;
}

inline nlohmann::json report_to_json(const EvalReport& r) {
  return nlohmann::json{
      {"format", kReportFormatName},
      {"format_version", kReportFormatVersion},
      {"examples", r.examples},
      {"gold_conditions", r.gold_conditions},
      {"accuracy",
       {{"lf", r.lf_acc},
        {"ex", r.ex_acc},
        {"s_col", r.s_col},
        {"s_agg", r.s_agg},
        {"w_num", r.w_num},
        {"w_col", r.w_col},
        {"w_op", r.w_op},
        {"w_val", r.w_val}}},
      {"counts",
       {{"pred_exec_errors", r.pred_exec_errors},
        {"gold_exec_errors", r.gold_exec_errors},
        {"span_alignment_failures", r.span_alignment_failures}}}};
}

/// Two-row table with the per-task breakdown column names.
inline std::string format_report_table(const EvalReport& r) {
  auto cell = [](double v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%-8.4f", v);
    return std::string(buf);
  };
  std::string out;
  out += "LF      EX      S-COL   S-AGG   W-NUM   W-COL   W-OP    W-VAL\n";
  out += cell(r.lf_acc) + cell(r.ex_acc) + cell(r.s_col) + cell(r.s_agg) + cell(r.w_num) +
         cell(r.w_col) + cell(r.w_op) + cell(r.w_val);
  out += "\n";
  return out;
}

}  // namespace hydra
