// Command-line surface over the library: train, predict, eval, exec, synth.
// Exit codes: 0 success, 1 domain error, 2 usage or I/O error.

#include <cstdlib>
#include <iostream>
#include <memory>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hydra/hydra.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int worker_count() {
  const char* env = std::getenv("HYDRA_NUM_WORKERS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (end == nullptr || *end != '\0' || v < 1 || v > 1024)
    throw UsageError("HYDRA_NUM_WORKERS must be an integer in [1, 1024], got \"" +
                     std::string(env) + "\"");
  return static_cast<int>(v);
}

void print_issues(const std::string& path, const char* kind,
                  const std::vector<hydra::LineIssue>& issues) {
  for (const hydra::LineIssue& issue : issues)
    std::cerr << path << ":" << issue.line << ": " << kind << ": " << issue.message << "\n";
}

std::map<std::string, hydra::Table> load_tables_checked(const std::string& path) {
  hydra::TableLoad load = hydra::load_tables(path);
  print_issues(path, "error", load.errors);
  if (load.tables.empty()) throw hydra::IoError("no usable tables in " + path);
  return std::move(load.tables);
}

std::vector<hydra::Example> load_examples_checked(const std::string& path,
                                                  const std::map<std::string, hydra::Table>& tables) {
  hydra::ExampleLoad load = hydra::load_examples(path, tables);
  print_issues(path, "error", load.errors);
  print_issues(path, "warning", load.warnings);
  if (load.examples.empty()) throw hydra::IoError("no usable examples in " + path);
  return std::move(load.examples);
}

hydra::TaskWeights parse_task_weights(const std::string& spec) {
  hydra::TaskWeights w;
  if (spec.empty()) return w;
  std::size_t pos = 0;
  while (pos < spec.size()) {
    std::size_t comma = spec.find(',', pos);
    if (comma == std::string::npos) comma = spec.size();
    const std::string part = spec.substr(pos, comma - pos);
    const std::size_t eq = part.find('=');
    if (eq == std::string::npos)
      throw UsageError("bad --task-weights entry \"" + part + "\", expected name=value");
    const std::string name = part.substr(0, eq);
    double value = 0.0;
    try {
      value = std::stod(part.substr(eq + 1));
    } catch (const std::exception&) {
      throw UsageError("bad --task-weights value in \"" + part + "\"");
    }
    if (name == "select") w.select = value;
    else if (name == "where") w.where = value;
    else if (name == "relevant") w.relevant = value;
    else if (name == "agg") w.agg = value;
    else if (name == "op") w.op = value;
    else if (name == "ns") w.ns = value;
    else if (name == "nw") w.nw = value;
    else if (name == "start") w.start = value;
    else if (name == "end") w.end = value;
    else throw UsageError("unknown task in --task-weights: \"" + name + "\"");
    pos = comma + 1;
  }
  return w;
}

struct TrainArgs {
  std::string data, tables, out;
  int epochs = 12;
  double lr = 0.1;
  int batch = 32;
  std::uint64_t seed = 1;
  int ns_max = hydra::kDefaultNsMax;
  std::string task_weights;
};

int run_train(const TrainArgs& args) {
  const auto tables = load_tables_checked(args.tables);
  const auto examples = load_examples_checked(args.data, tables);

  hydra::TrainingBuild build = hydra::build_training_samples(examples, tables, args.ns_max);
  hydra::TrainConfig config;
  config.epochs = args.epochs;
  config.learning_rate = args.lr;
  config.batch_size = args.batch;
  config.seed = args.seed;
  config.ns_max = args.ns_max;
  config.task_weights = parse_task_weights(args.task_weights);

  hydra::LinearEncoder encoder;
  const hydra::TrainTrace trace = encoder.fit(build.samples, config);
  encoder.save(args.out);

  const hydra::LabelingAudit& audit = build.audit;
  std::cout << "trained on " << build.samples.size() << " (column, question) samples from "
            << audit.examples << " examples\n";
  std::cout << "label audit: " << audit.conditions << " conditions, " << audit.unaligned_values
            << " unaligned values (span-masked), " << audit.where_collisions
            << " where-column collisions, " << audit.select_collisions
            << " select-column collisions\n";
  std::cout << "loss trace:";
  for (double loss : trace.epoch_loss) std::cout << " " << loss;
  std::cout << "\nmodel written to " << args.out << "\n";
  return kExitOk;
}

struct PredictArgs {
  std::string model, data, tables, out;
  bool eg = false;
  int k1 = 0;
  int k2 = 50;
  int spans_per_column = 4;
  int max_span = hydra::kDefaultMaxSpan;
  bool strict_values = false;  // accepted for interface symmetry with eval
};

int run_predict(const PredictArgs& args) {
  hydra::LinearEncoder encoder = [&] {
    try {
      return hydra::LinearEncoder::load(args.model);
    } catch (const std::exception& e) {
      throw hydra::IoError(e.what());
    }
  }();
  const auto tables = load_tables_checked(args.tables);
  const auto examples = load_examples_checked(args.data, tables);

  hydra::EgOptions eg_opts;
  eg_opts.k1 = args.k1;
  eg_opts.k2 = args.k2;
  eg_opts.spans_per_column = args.spans_per_column;
  eg_opts.max_span = args.max_span;
  hydra::AssembleOptions as_opts;
  as_opts.max_span = args.max_span;

  std::vector<hydra::SqlQuery> predictions(examples.size());
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const hydra::Example& ex = examples[i];
      const hydra::Table& table = tables.at(ex.table_id);
      std::vector<hydra::ColumnScores> scores;
      scores.reserve(table.columns.size());
      for (const hydra::Column& col : table.columns)
        scores.push_back(encoder.score(col, ex.question));
      if (args.eg) {
        predictions[i] = hydra::eg_decode(table, scores, ex.question, eg_opts).query;
      } else {
        predictions[i] = hydra::assemble(table.columns, scores, ex.question, as_opts).query;
      }
    }
  };
  const int workers =
      std::max(1, std::min<int>(worker_count(), static_cast<int>(examples.size())));
  if (workers <= 1) {
    run(0, examples.size());
  } else {
    // Contiguous chunks into a pre-sized vector keep output order independent
    // of scheduling.
    std::vector<std::thread> pool;
    const std::size_t chunk = (examples.size() + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const std::size_t begin = static_cast<std::size_t>(w) * chunk;
      const std::size_t end = std::min(examples.size(), begin + chunk);
      if (begin >= end) break;
      pool.emplace_back(run, begin, end);
    }
    for (std::thread& t : pool) t.join();
  }

  hydra::write_predictions(args.out, predictions);
  std::cout << "wrote " << predictions.size() << " predictions to " << args.out << "\n";
  return kExitOk;
}

struct EvalArgs {
  std::string gold, tables, pred, out;
  bool strict_values = false;
  double result_tol = 1e-9;
};

int run_eval(const EvalArgs& args) {
  const auto tables = load_tables_checked(args.tables);
  const auto examples = load_examples_checked(args.gold, tables);
  const std::vector<hydra::SqlQuery> predictions = hydra::load_predictions(args.pred);

  hydra::EvalOptions opts;
  opts.fold_values = !args.strict_values;
  opts.result_tol = args.result_tol;
  const hydra::EvalReport report =
      hydra::evaluate(examples, predictions, tables, opts, worker_count());

  std::cout << hydra::format_report_table(report);
  std::cout << "examples: " << report.examples << ", pred exec errors: "
            << report.pred_exec_errors << ", gold exec errors: " << report.gold_exec_errors
            << ", unaligned gold values: " << report.span_alignment_failures << "\n";
  if (!args.out.empty()) {
    hydra::write_report(args.out, hydra::report_to_json(report));
    std::cout << "report written to " << args.out << "\n";
  }
  return kExitOk;
}

struct ExecArgs {
  std::string tables, table_id, query;
};

int run_exec(const ExecArgs& args) {
  const auto tables = load_tables_checked(args.tables);
  auto it = tables.find(args.table_id);
  if (it == tables.end()) throw UsageError("table id not found: " + args.table_id);

  hydra::SqlQuery query;
  try {
    query = hydra::from_wikisql_json(nlohmann::json::parse(args.query));
  } catch (const std::exception& e) {
    throw UsageError(std::string("bad --query: ") + e.what());
  }

  const hydra::ExecResult result = hydra::execute(it->second, query);
  if (!hydra::exec_ok(result)) {
    std::cerr << "execution error: " << hydra::exec_error_message(result) << "\n";
    return kExitDomain;
  }
  const hydra::ResultSet& rs = std::get<hydra::ResultSet>(result);
  nlohmann::json out;
  out["matched_rows"] = rs.matched_rows;
  if (rs.kind == hydra::ResultSet::Kind::scalar) {
    out["kind"] = "scalar";
    out["scalar"] = rs.scalar;
  } else {
    out["kind"] = "values";
    nlohmann::json values = nlohmann::json::array();
    for (const hydra::Cell& c : rs.values) values.push_back(c.raw);
    out["values"] = std::move(values);
  }
  std::cout << out.dump() << "\n";
  return kExitOk;
}

struct SynthArgs {
  std::string out_tables, out_examples, out_heldout;
  int tables = 60;
  int questions_per_table = 40;
  int min_rows = 6;
  int max_rows = 12;
  std::uint64_t seed = 7;
  int heldout_every = 5;
};

int run_synth(const SynthArgs& args) {
  hydra::SynthConfig config;
  config.tables = args.tables;
  config.questions_per_table = args.questions_per_table;
  config.min_rows = args.min_rows;
  config.max_rows = args.max_rows;
  config.seed = args.seed;
  const hydra::SynthData data = hydra::generate_synthetic(config);

  hydra::serialize_tables(args.out_tables, data.tables);
  if (args.out_heldout.empty()) {
    hydra::write_examples(args.out_examples, data.examples);
    std::cout << "wrote " << data.tables.size() << " tables and " << data.examples.size()
              << " examples\n";
    return kExitOk;
  }
  if (args.heldout_every < 2) throw UsageError("--heldout-every must be at least 2");
  std::vector<hydra::Example> train, heldout;
  for (std::size_t i = 0; i < data.examples.size(); ++i) {
    if ((i + 1) % static_cast<std::size_t>(args.heldout_every) == 0) {
      heldout.push_back(data.examples[i]);
    } else {
      train.push_back(data.examples[i]);
    }
  }
  hydra::write_examples(args.out_examples, train);
  hydra::write_examples(args.out_heldout, heldout);
  std::cout << "wrote " << data.tables.size() << " tables, " << train.size()
            << " training examples, " << heldout.size() << " held-out examples\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"column-wise ranking text-to-SQL: train, predict, evaluate, execute"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand("train", "train the linear encoder on examples");
  train->add_option("--data", train_args.data, "training examples JSONL")->required();
  train->add_option("--tables", train_args.tables, "tables JSONL")->required();
  train->add_option("--out", train_args.out, "output model file")->required();
  train->add_option("--epochs", train_args.epochs, "training epochs");
  train->add_option("--lr", train_args.lr, "base learning rate");
  train->add_option("--batch", train_args.batch, "mini-batch size");
  train->add_option("--seed", train_args.seed, "shuffle seed");
  train->add_option("--ns-max", train_args.ns_max, "largest select count class");
  train->add_option("--task-weights", train_args.task_weights,
                    "per-task loss weights, e.g. select=1,where=2");

  PredictArgs predict_args;
  CLI::App* predict = app.add_subcommand("predict", "assemble queries for examples");
  predict->add_option("--model", predict_args.model, "model file from train")->required();
  predict->add_option("--data", predict_args.data, "examples JSONL")->required();
  predict->add_option("--tables", predict_args.tables, "tables JSONL")->required();
  predict->add_option("--out", predict_args.out, "output predictions JSONL")->required();
  predict->add_flag("--eg", predict_args.eg, "verify beam candidates by execution");
  predict->add_option("--k1", predict_args.k1, "select beam width (0 = unlimited)");
  predict->add_option("--k2", predict_args.k2, "condition beam width");
  predict->add_option("--spans-per-column", predict_args.spans_per_column,
                      "value spans kept per column in the condition beam");
  predict->add_option("--max-span", predict_args.max_span, "value span length cap");
  predict->add_flag("--strict-values", predict_args.strict_values,
                    "accepted for symmetry with eval; span text is always emitted verbatim");

  EvalArgs eval_args;
  CLI::App* eval = app.add_subcommand("eval", "score predictions against gold");
  eval->add_option("--gold", eval_args.gold, "gold examples JSONL")->required();
  eval->add_option("--tables", eval_args.tables, "tables JSONL")->required();
  eval->add_option("--pred", eval_args.pred, "predictions JSONL")->required();
  eval->add_option("--out", eval_args.out, "report JSON output path");
  eval->add_flag("--strict-values", eval_args.strict_values,
                 "compare condition values without case folding");
  eval->add_option("--result-tol", eval_args.result_tol,
                   "relative tolerance for executed-result comparison");

  ExecArgs exec_args;
  CLI::App* exec = app.add_subcommand("exec", "run one query against a table");
  exec->add_option("--tables", exec_args.tables, "tables JSONL")->required();
  exec->add_option("--table-id", exec_args.table_id, "table to query")->required();
  exec->add_option("--query", exec_args.query, R"(query JSON: {"sel",...,"agg",...,"conds",[...]})")
      ->required();

  SynthArgs synth_args;
  CLI::App* synth = app.add_subcommand("synth", "generate a templated synthetic corpus");
  synth->add_option("--out-tables", synth_args.out_tables, "tables JSONL output")->required();
  synth->add_option("--out-examples", synth_args.out_examples, "examples JSONL output")
      ->required();
  synth->add_option("--out-heldout", synth_args.out_heldout,
                    "optional held-out examples JSONL output");
  synth->add_option("--tables", synth_args.tables, "number of tables");
  synth->add_option("--questions-per-table", synth_args.questions_per_table,
                    "questions per table");
  synth->add_option("--min-rows", synth_args.min_rows, "minimum rows per table");
  synth->add_option("--max-rows", synth_args.max_rows, "maximum rows per table");
  synth->add_option("--seed", synth_args.seed, "generator seed");
  synth->add_option("--heldout-every", synth_args.heldout_every,
                    "send every n-th example to the held-out file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (train->parsed()) return run_train(train_args);
    if (predict->parsed()) return run_predict(predict_args);
    if (eval->parsed()) return run_eval(eval_args);
    if (exec->parsed()) return run_exec(exec_args);
    if (synth->parsed()) return run_synth(synth_args);
    std::cerr << "no subcommand given\n";
    return kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const hydra::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
}
