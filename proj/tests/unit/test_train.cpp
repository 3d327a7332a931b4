#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdio>
#include <limits>
#include <random>
#include <vector>

#include "hydra/data_io.hpp"
#include "hydra/linear_encoder.hpp"
#include "hydra/synth.hpp"

using namespace hydra;

namespace {

Column make_column(int index, const std::string& name, ColumnType type) {
  Column c;
  c.index = index;
  c.name = name;
  c.type = type;
  c.table_name = "t1";
  return c;
}

// A sample exercising every head: the column is both selected (SUM) and
// constrained (> with value at token 3).
TrainSample full_sample() {
  TrainSample s;
  s.column = make_column(0, "points", ColumnType::real);
  s.question = Question::from_raw("points above 5 today");
  s.labels.is_select = true;
  s.labels.is_where = true;
  s.labels.is_relevant = true;
  s.labels.agg = AggOp::Sum;
  s.labels.op = CondOp::Gt;
  s.labels.start = 3;
  s.labels.end = 3;
  s.labels.ns = 1;
  s.labels.nw = 1;
  return s;
}

std::vector<TrainSample> small_corpus() {
  SynthConfig cfg;
  cfg.tables = 4;
  cfg.questions_per_table = 8;
  cfg.seed = 21;
  const SynthData data = generate_synthetic(cfg);
  return build_training_samples(data.examples, data.tables).samples;
}

int argmax(const std::vector<double>& v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::string temp_path(const char* name) {
  return std::string("hydra_train_test_") + name + ".json";
}

}  // namespace

TEST_CASE("zero epochs leave the zero initialization in place") {
  const std::vector<TrainSample> samples = {full_sample()};
  TrainConfig cfg;
  cfg.epochs = 0;

  LinearEncoder trained;
  const TrainTrace trace = trained.fit(samples, cfg);
  CHECK(trace.epoch_loss.empty());

  LinearEncoder init;
  init.initialize(samples, cfg);
  CHECK(trained.to_json() == init.to_json());

  // Zero heads score maximally uncertain.
  const ColumnScores s = trained.score(samples[0].column, samples[0].question);
  CHECK(s.p_select == 0.5);
  CHECK(s.p_where == 0.5);
  for (double v : s.agg_dist) CHECK(v == Catch::Approx(1.0 / kAggOpCount));
}

TEST_CASE("a single sample is overfit to its labels") {
  const std::vector<TrainSample> samples = {full_sample()};
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.learning_rate = 0.5;
  cfg.batch_size = 1;

  LinearEncoder enc;
  enc.fit(samples, cfg);
  const ColumnScores s = enc.score(samples[0].column, samples[0].question);

  CHECK(s.p_select > 0.9);
  CHECK(s.p_where > 0.9);
  CHECK(s.p_relevant > 0.9);
  CHECK(argmax(s.agg_dist) == code(AggOp::Sum));
  CHECK(argmax(s.op_dist) == code(CondOp::Gt));
  CHECK(argmax(s.ns_dist) == 0);  // ns = 1
  CHECK(argmax(s.nw_dist) == 1);
  CHECK(argmax(s.start_dist) == 3);
  CHECK(argmax(s.end_dist) == 3);
}

TEST_CASE("loss trace is non-increasing on a separable corpus") {
  const std::vector<TrainSample> samples = small_corpus();
  REQUIRE(samples.size() > 50);
  TrainConfig cfg;
  cfg.epochs = 8;

  LinearEncoder enc;
  const TrainTrace trace = enc.fit(samples, cfg);
  REQUIRE(trace.epoch_loss.size() == 8);
  for (std::size_t i = 1; i < trace.epoch_loss.size(); ++i)
    CHECK(trace.epoch_loss[i] <= trace.epoch_loss[i - 1] + 1e-6);
  CHECK(trace.epoch_loss.back() < 0.8 * trace.epoch_loss.front());
}

TEST_CASE("analytic gradients match central finite differences") {
  std::vector<TrainSample> samples = small_corpus();
  samples.resize(24);
  TrainConfig cfg;

  LinearEncoder enc;
  enc.initialize(samples, cfg);

  // Random but reproducible non-zero weights, so the gradient is generic.
  std::mt19937_64 rng(77);
  detail::for_each_parameter(enc.heads(), [&rng](double& w) {
    w = (static_cast<double>(rng() >> 11) / 9007199254740992.0 - 0.5);
  });

  const LinearHeads analytic = enc.loss_gradient(samples);
  std::vector<double> flat;
  detail::for_each_parameter(const_cast<LinearHeads&>(analytic),
                             [&flat](double& g) { flat.push_back(g); });

  std::vector<double*> params;
  detail::for_each_parameter(enc.heads(), [&params](double& w) { params.push_back(&w); });
  REQUIRE(params.size() == flat.size());

  const double eps = 1e-6;
  int checked = 0;
  for (int t = 0; t < 400; ++t) {
    const std::size_t i = rng() % params.size();
    const double saved = *params[i];
    *params[i] = saved + eps;
    const double up = enc.dataset_loss(samples);
    *params[i] = saved - eps;
    const double down = enc.dataset_loss(samples);
    *params[i] = saved;
    const double fd = (up - down) / (2 * eps);
    CHECK(std::abs(fd - flat[i]) <= 1e-6 + 1e-4 * std::abs(flat[i]));
    ++checked;
  }
  CHECK(checked == 400);
}

TEST_CASE("masked tasks contribute no loss and no gradient") {
  TrainSample select_only = full_sample();
  select_only.labels.is_where = false;
  select_only.labels.op.reset();
  select_only.labels.start = 0;
  select_only.labels.end = 0;
  select_only.labels.nw = 0;

  TrainSample where_only = full_sample();
  where_only.labels.is_select = false;
  where_only.labels.agg.reset();

  TrainSample masked_span = full_sample();
  masked_span.labels.span_masked = true;
  masked_span.labels.start = 0;
  masked_span.labels.end = 0;

  TrainConfig cfg;
  LinearEncoder enc;
  enc.initialize({select_only, where_only, masked_span}, cfg);

  auto all_zero = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
  };

  const LinearHeads g_sel = enc.loss_gradient({select_only});
  for (const auto& row : g_sel.op_head.weights) CHECK(all_zero(row));
  CHECK(all_zero(g_sel.op_head.bias));

  const LinearHeads g_where = enc.loss_gradient({where_only});
  for (const auto& row : g_where.agg_head.weights) CHECK(all_zero(row));
  CHECK(all_zero(g_where.agg_head.bias));

  const LinearHeads g_span = enc.loss_gradient({masked_span});
  CHECK(all_zero(g_span.start_head.weights));
  CHECK(g_span.start_head.sentinel_bias == 0.0);
  CHECK(all_zero(g_span.end_head.weights));
  CHECK(g_span.end_head.sentinel_bias == 0.0);
}

TEST_CASE("training is reproducible bit for bit") {
  const std::vector<TrainSample> samples = small_corpus();
  TrainConfig cfg;
  cfg.epochs = 4;
  cfg.seed = 42;

  LinearEncoder a, b;
  const TrainTrace ta = a.fit(samples, cfg);
  const TrainTrace tb = b.fit(samples, cfg);
  CHECK(ta.epoch_loss == tb.epoch_loss);
  CHECK(a.to_json().dump() == b.to_json().dump());

  cfg.seed = 43;
  LinearEncoder c;
  c.fit(samples, cfg);
  CHECK(a.to_json().dump() != c.to_json().dump());  // the seed matters
}

TEST_CASE("model save and load round-trips scores exactly") {
  const std::vector<TrainSample> samples = small_corpus();
  TrainConfig cfg;
  cfg.epochs = 3;

  LinearEncoder enc;
  enc.fit(samples, cfg);
  const std::string path = temp_path("roundtrip");
  enc.save(path);
  const LinearEncoder loaded = LinearEncoder::load(path);
  std::remove(path.c_str());

  CHECK(loaded.to_json() == enc.to_json());
  const ColumnScores a = enc.score(samples[0].column, samples[0].question);
  const ColumnScores b = loaded.score(samples[0].column, samples[0].question);
  CHECK(a.p_select == b.p_select);
  CHECK(a.agg_dist == b.agg_dist);
  CHECK(a.start_dist == b.start_dist);
}

TEST_CASE("model files are validated on load") {
  const std::vector<TrainSample> samples = {full_sample()};
  TrainConfig cfg;
  cfg.epochs = 1;
  LinearEncoder enc;
  enc.fit(samples, cfg);

  nlohmann::json good = enc.to_json();

  nlohmann::json bad_format = good;
  bad_format["format"] = "something-else";
  CHECK_THROWS_WITH(LinearEncoder::from_json(bad_format),
                    Catch::Matchers::ContainsSubstring("not a model file"));

  nlohmann::json bad_version = good;
  bad_version["format_version"] = kModelFormatVersion + 1;
  CHECK_THROWS_WITH(LinearEncoder::from_json(bad_version),
                    Catch::Matchers::ContainsSubstring("version"));

  nlohmann::json bad_shape = good;
  bad_shape["heads"]["select"]["weights"].get_ref<nlohmann::json::array_t&>().push_back(0.0);
  CHECK_THROWS_WITH(LinearEncoder::from_json(bad_shape),
                    Catch::Matchers::ContainsSubstring("shape"));

  CHECK_THROWS_AS(LinearEncoder::load("no_such_model_file.json"), std::runtime_error);
}

TEST_CASE("non-finite training is aborted with a diagnostic") {
  const std::vector<TrainSample> samples = {full_sample()};
  TrainConfig cfg;
  cfg.epochs = 2;
  cfg.task_weights.select = std::numeric_limits<double>::infinity();

  LinearEncoder enc;
  CHECK_THROWS_WITH(enc.fit(samples, cfg), Catch::Matchers::ContainsSubstring("non-finite"));
}

TEST_CASE("training inputs are validated") {
  LinearEncoder enc;
  TrainConfig cfg;
  CHECK_THROWS_AS(enc.fit({}, cfg), std::invalid_argument);
  CHECK_THROWS_AS(enc.dataset_loss({}), std::invalid_argument);

  TrainSample bad = full_sample();
  bad.labels.start = 9;  // past the 4-token question
  bad.labels.end = 9;
  CHECK_THROWS_AS(enc.fit({bad}, cfg), std::invalid_argument);

  TrainSample bad_nw = full_sample();
  bad_nw.labels.nw = kNwMax + 1;
  CHECK_THROWS_AS(enc.fit({bad_nw}, cfg), std::invalid_argument);
}
