// Drives the installed binary end to end through a shell. HYDRA_CLI_PATH is
// injected by the build so the test never guesses at layout.

#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult run(const std::string& cmd, bool merge_stderr = false) {
  const std::string full = cmd + (merge_stderr ? " 2>&1" : " 2>/dev/null");
  FILE* pipe = popen(full.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string text;
  char buf[4096];
  std::size_t n = 0;
  while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) text.append(buf, n);
  const int status = pclose(pipe);
  RunResult r;
  r.out = std::move(text);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

const std::string& cli() {
  static const std::string path = HYDRA_CLI_PATH;
  return path;
}

const fs::path& work_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "hydra_cli_tests";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

// Shared pipeline artifacts, built once and reused across test cases.
struct Pipeline {
  std::string tables = path_of("tables.jsonl");
  std::string train = path_of("train.jsonl");
  std::string heldout = path_of("heldout.jsonl");
  std::string model = path_of("model.json");
  std::string preds = path_of("preds.jsonl");
  std::string report = path_of("report.json");
  RunResult synth, trained, predicted, evaled;

  Pipeline() {
    synth = run(cli() + " synth --out-tables " + tables + " --out-examples " + train +
                " --out-heldout " + heldout +
                " --tables 20 --questions-per-table 25 --seed 5 --heldout-every 5");
    trained = run(cli() + " train --data " + train + " --tables " + tables + " --out " + model +
                  " --seed 3");
    predicted = run(cli() + " predict --model " + model + " --data " + heldout + " --tables " +
                    tables + " --out " + preds);
    evaled = run(cli() + " eval --gold " + heldout + " --tables " + tables + " --pred " + preds +
                 " --out " + report);
  }
};

const Pipeline& pipeline() {
  static const Pipeline p;
  return p;
}

const std::string kExecTable =
    R"({"id":"t1","header":["city","points"],"types":["text","real"],"rows":[["boston","12"],["denver","7"],["boston","3"]]})";

}  // namespace

TEST_CASE("help exits cleanly and unknown arguments do not") {
  CHECK(run(cli() + " --help").code == 0);
  CHECK(run(cli() + " train --help").code == 0);
  CHECK(run(cli() + " frobnicate").code == 2);
  CHECK(run(cli() + " predict --model x").code == 2);  // missing required flags
  CHECK(run(cli()).code == 2);                         // a subcommand is required
}

TEST_CASE("synthetic corpus generation writes the split it reports") {
  const Pipeline& p = pipeline();
  REQUIRE(p.synth.code == 0);
  CHECK_THAT(p.synth.out, Catch::Matchers::ContainsSubstring(
                              "wrote 20 tables, 400 training examples, 100 held-out examples"));
  CHECK(fs::exists(p.tables));

  std::ifstream train_in(p.train), held_in(p.heldout);
  std::string line;
  int train_lines = 0, held_lines = 0;
  while (std::getline(train_in, line)) train_lines += !line.empty();
  while (std::getline(held_in, line)) held_lines += !line.empty();
  CHECK(train_lines == 400);
  CHECK(held_lines == 100);
}

TEST_CASE("training reports its audit and writes a loadable model") {
  const Pipeline& p = pipeline();
  REQUIRE(p.trained.code == 0);
  CHECK_THAT(p.trained.out, Catch::Matchers::ContainsSubstring("0 unaligned values"));
  CHECK_THAT(p.trained.out, Catch::Matchers::ContainsSubstring("loss trace:"));
  const nlohmann::json model = nlohmann::json::parse(read_file(p.model));
  CHECK(model.at("format") == "hydra-linear-encoder");
}

TEST_CASE("prediction and evaluation close the loop") {
  const Pipeline& p = pipeline();
  REQUIRE(p.trained.code == 0);
  REQUIRE(p.predicted.code == 0);
  CHECK_THAT(p.predicted.out, Catch::Matchers::ContainsSubstring("wrote 100 predictions"));
  REQUIRE(p.evaled.code == 0);
  CHECK_THAT(p.evaled.out, Catch::Matchers::ContainsSubstring("LF      EX"));

  const nlohmann::json report = nlohmann::json::parse(read_file(p.report));
  CHECK(report.at("format") == "hydra-eval-report");
  CHECK(report.at("examples") == 100);
  // Wiring-level floor; the acceptance suite holds the real quality bar.
  CHECK(report.at("accuracy").at("lf").get<double>() >= 0.5);
}

TEST_CASE("execution-guided prediction stays evaluable") {
  const Pipeline& p = pipeline();
  REQUIRE(p.trained.code == 0);
  const std::string eg_preds = path_of("preds_eg.jsonl");
  const std::string eg_report = path_of("report_eg.json");

  REQUIRE(run(cli() + " predict --model " + p.model + " --data " + p.heldout + " --tables " +
              p.tables + " --out " + eg_preds + " --eg")
              .code == 0);
  REQUIRE(run(cli() + " eval --gold " + p.heldout + " --tables " + p.tables + " --pred " +
              eg_preds + " --out " + eg_report)
              .code == 0);

  const nlohmann::json plain = nlohmann::json::parse(read_file(p.report));
  const nlohmann::json eg = nlohmann::json::parse(read_file(eg_report));
  CHECK(eg.at("accuracy").at("ex").get<double>() >=
        plain.at("accuracy").at("ex").get<double>());
}

TEST_CASE("prediction output is deterministic and worker-count independent") {
  const Pipeline& p = pipeline();
  REQUIRE(p.trained.code == 0);
  const std::string again = path_of("preds_again.jsonl");
  const std::string parallel = path_of("preds_parallel.jsonl");

  REQUIRE(run(cli() + " predict --model " + p.model + " --data " + p.heldout + " --tables " +
              p.tables + " --out " + again)
              .code == 0);
  REQUIRE(run("env HYDRA_NUM_WORKERS=4 " + cli() + " predict --model " + p.model + " --data " +
              p.heldout + " --tables " + p.tables + " --out " + parallel)
              .code == 0);

  const std::string base = read_file(p.preds);
  CHECK(base == read_file(again));
  CHECK(base == read_file(parallel));
}

TEST_CASE("training is seed-reproducible") {
  const Pipeline& p = pipeline();
  const std::string same = path_of("model_same.json");
  const std::string other = path_of("model_other.json");

  REQUIRE(run(cli() + " train --data " + p.train + " --tables " + p.tables + " --out " + same +
              " --seed 3")
              .code == 0);
  REQUIRE(run(cli() + " train --data " + p.train + " --tables " + p.tables + " --out " + other +
              " --seed 4")
              .code == 0);
  CHECK(read_file(p.model) == read_file(same));
  CHECK(read_file(p.model) != read_file(other));
}

TEST_CASE("zero-epoch training still produces a usable model") {
  const Pipeline& p = pipeline();
  const std::string model0 = path_of("model_zero.json");
  const std::string preds0 = path_of("preds_zero.jsonl");

  const RunResult t = run(cli() + " train --data " + p.train + " --tables " + p.tables +
                          " --out " + model0 + " --epochs 0");
  REQUIRE(t.code == 0);
  CHECK_THAT(t.out, Catch::Matchers::ContainsSubstring("loss trace:\n"));
  CHECK(run(cli() + " predict --model " + model0 + " --data " + p.heldout + " --tables " +
            p.tables + " --out " + preds0)
            .code == 0);
}

TEST_CASE("exec runs one query and reports results as JSON") {
  const std::string tables = path_of("exec_tables.jsonl");
  write_file(tables, kExecTable + "\n");

  const RunResult sum = run(cli() + " exec --tables " + tables + " --table-id t1 --query " +
                            R"('{"sel":1,"agg":4,"conds":[[0,0,"boston"]]}')");
  REQUIRE(sum.code == 0);
  const nlohmann::json out = nlohmann::json::parse(sum.out);
  CHECK(out.at("kind") == "scalar");
  CHECK(out.at("scalar").get<double>() == 15.0);
  CHECK(out.at("matched_rows") == 2);

  const RunResult rows = run(cli() + " exec --tables " + tables + " --table-id t1 --query " +
                             R"('{"sel":0,"agg":0,"conds":[[1,1,"5"]]}')");
  REQUIRE(rows.code == 0);
  const nlohmann::json rj = nlohmann::json::parse(rows.out);
  CHECK(rj.at("kind") == "values");
  CHECK(rj.at("values") == nlohmann::json::array({"boston", "denver"}));
}

TEST_CASE("exec separates domain failures from usage failures") {
  const std::string tables = path_of("exec_tables2.jsonl");
  write_file(tables, kExecTable + "\n");

  // A numeric aggregate over a text column is a domain error.
  const RunResult domain = run(cli() + " exec --tables " + tables + " --table-id t1 --query " +
                                   R"('{"sel":0,"agg":4,"conds":[]}')",
                               true);
  CHECK(domain.code == 1);
  CHECK_THAT(domain.out, Catch::Matchers::ContainsSubstring("execution error"));

  CHECK(run(cli() + " exec --tables " + tables + " --table-id nope --query " +
            R"('{"sel":0,"agg":0,"conds":[]}')")
            .code == 2);
  CHECK(run(cli() + " exec --tables " + tables + " --table-id t1 --query not-json").code == 2);
  CHECK(run(cli() + " exec --tables /nonexistent.jsonl --table-id t1 --query " +
            R"('{"sel":0,"agg":0,"conds":[]}')")
            .code == 2);
}

TEST_CASE("mismatched prediction files fail as domain errors") {
  const Pipeline& p = pipeline();
  const std::string short_preds = path_of("short_preds.jsonl");
  write_file(short_preds, R"({"query":{"sel":0,"agg":0,"conds":[]}})"
                          "\n");
  const RunResult r = run(cli() + " eval --gold " + p.heldout + " --tables " + p.tables +
                              " --pred " + short_preds,
                          true);
  CHECK(r.code == 1);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("predictions for"));
}

TEST_CASE("a bad worker-count environment value is a usage error") {
  const Pipeline& p = pipeline();
  const RunResult r = run("env HYDRA_NUM_WORKERS=zebra " + cli() + " eval --gold " + p.heldout +
                              " --tables " + p.tables + " --pred " + p.preds,
                          true);
  CHECK(r.code == 2);
  CHECK_THAT(r.out, Catch::Matchers::ContainsSubstring("HYDRA_NUM_WORKERS"));
}
