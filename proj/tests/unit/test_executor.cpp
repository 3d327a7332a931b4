#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "generators.hpp"
#include "hydra/executor.hpp"
#include "naive_executor.hpp"

using namespace hydra;

namespace {

Table fixture_table() {
  // city (text), points (real with one unparseable cell), coach (text)
  Table t;
  t.id = "games";
  const std::vector<std::pair<std::string, ColumnType>> cols = {
      {"city", ColumnType::text}, {"points", ColumnType::real}, {"coach", ColumnType::text}};
  for (std::size_t i = 0; i < cols.size(); ++i) {
    Column c;
    c.index = static_cast<int>(i);
    c.name = cols[i].first;
    c.type = cols[i].second;
    c.table_name = t.id;
    t.columns.push_back(c);
  }
  auto row = [&t](const std::string& a, const std::string& b, const std::string& c) {
    t.rows.push_back({Cell::from_raw(a), Cell::from_raw(b), Cell::from_raw(c)});
  };
  row(" Boston ", "12", "smith");
  row("chicago", "n/a", "jones");
  row("BOSTON", "3.50", "smith");
  row("denver", "-4", "自由");
  return t;
}

SqlQuery select_only(AggOp agg, int col) {
  SqlQuery q;
  q.select.emplace_back(agg, col);
  return q;
}

const ResultSet& ok(const ExecResult& r) {
  REQUIRE(exec_ok(r));
  return std::get<ResultSet>(r);
}

}  // namespace

TEST_CASE("select with no conditions returns every row") {
  const Table t = fixture_table();
  const ResultSet r = ok(execute(t, select_only(AggOp::None, 0)));
  CHECK(r.kind == ResultSet::Kind::values);
  CHECK(r.matched_rows == 4);
  REQUIRE(r.values.size() == 4);
  CHECK(r.values[0].raw == " Boston ");
}

TEST_CASE("count over an empty match is zero, not an error") {
  const Table t = fixture_table();
  SqlQuery q = select_only(AggOp::Count, 0);
  q.where = {Condition{0, CondOp::Eq, "nowhere"}};
  const ResultSet r = ok(execute(t, q));
  CHECK(r.kind == ResultSet::Kind::scalar);
  CHECK(r.scalar == 0.0);
  CHECK(r.matched_rows == 0);
  CHECK(is_empty(r));
}

TEST_CASE("equality folds case and whitespace, or compares numerically") {
  const Table t = fixture_table();

  SqlQuery by_city = select_only(AggOp::None, 1);
  by_city.where = {Condition{0, CondOp::Eq, "boston"}};
  CHECK(ok(execute(t, by_city)).matched_rows == 2);  // " Boston " and "BOSTON"

  SqlQuery by_points = select_only(AggOp::None, 0);
  by_points.where = {Condition{1, CondOp::Eq, "3.5"}};
  CHECK(ok(execute(t, by_points)).matched_rows == 1);  // "3.50" == 3.5 numerically
}

TEST_CASE("order comparisons are numeric-only") {
  const Table t = fixture_table();

  SqlQuery gt = select_only(AggOp::None, 0);
  gt.where = {Condition{1, CondOp::Gt, "0"}};
  CHECK(ok(execute(t, gt)).matched_rows == 2);  // 12 and 3.50; "n/a" excluded

  SqlQuery lt = select_only(AggOp::None, 0);
  lt.where = {Condition{1, CondOp::Lt, "4"}};
  CHECK(ok(execute(t, lt)).matched_rows == 2);  // 3.50 and -4

  // Non-numeric comparison value matches nothing.
  SqlQuery junk = select_only(AggOp::None, 0);
  junk.where = {Condition{1, CondOp::Gt, "abc"}};
  CHECK(ok(execute(t, junk)).matched_rows == 0);
}

TEST_CASE("aggregates follow the numeric column rules") {
  const Table t = fixture_table();

  CHECK(ok(execute(t, select_only(AggOp::Sum, 1))).scalar == Catch::Approx(11.5));
  CHECK(ok(execute(t, select_only(AggOp::Max, 1))).scalar == 12.0);
  CHECK(ok(execute(t, select_only(AggOp::Min, 1))).scalar == -4.0);
  CHECK(ok(execute(t, select_only(AggOp::Avg, 1))).scalar ==
        Catch::Approx(11.5 / 3.0));  // "n/a" is skipped
  CHECK(ok(execute(t, select_only(AggOp::Count, 0))).scalar == 4.0);

  // Numeric aggregates on text columns are type errors; COUNT is not.
  CHECK_FALSE(exec_ok(execute(t, select_only(AggOp::Sum, 0))));
  CHECK_FALSE(exec_ok(execute(t, select_only(AggOp::Avg, 0))));
  CHECK_FALSE(exec_ok(execute(t, select_only(AggOp::Max, 2))));
  CHECK_FALSE(exec_ok(execute(t, select_only(AggOp::Min, 2))));
  CHECK(exec_error_message(execute(t, select_only(AggOp::Sum, 0))).find("text column") !=
        std::string::npos);
}

TEST_CASE("aggregates over zero numeric cells") {
  const Table t = fixture_table();
  SqlQuery none = select_only(AggOp::Sum, 1);
  none.where = {Condition{0, CondOp::Eq, "nowhere"}};
  CHECK(ok(execute(t, none)).scalar == 0.0);  // SUM of nothing is 0

  none.select[0].first = AggOp::Avg;
  CHECK_FALSE(exec_ok(execute(t, none)));
  none.select[0].first = AggOp::Max;
  CHECK_FALSE(exec_ok(execute(t, none)));
  none.select[0].first = AggOp::Min;
  CHECK_FALSE(exec_ok(execute(t, none)));
}

TEST_CASE("column references are bounds-checked") {
  const Table t = fixture_table();
  CHECK_FALSE(exec_ok(execute(t, select_only(AggOp::None, 3))));
  CHECK_FALSE(exec_ok(execute(t, select_only(AggOp::None, -1))));
  SqlQuery q = select_only(AggOp::None, 0);
  q.where = {Condition{7, CondOp::Eq, "x"}};
  CHECK_FALSE(exec_ok(execute(t, q)));
  SqlQuery empty;
  CHECK_FALSE(exec_ok(execute(t, empty)));
}

TEST_CASE("multiple select columns zip without aggregates") {
  const Table t = fixture_table();
  SqlQuery q;
  q.select = {{AggOp::None, 0}, {AggOp::None, 2}};
  q.where = {Condition{2, CondOp::Eq, "smith"}};
  const ResultSet r = ok(execute(t, q));
  CHECK(r.matched_rows == 2);
  REQUIRE(r.values.size() == 4);  // 2 rows x 2 columns
  CHECK(r.values[0].raw == " Boston ");
  CHECK(r.values[1].raw == "smith");

  q.select[1].first = AggOp::Count;
  CHECK_FALSE(exec_ok(execute(t, q)));
}

TEST_CASE("adding a condition never increases the match count") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 200; ++trial) {
    const Table t = hydra_test::random_table(rng);
    SqlQuery q = hydra_test::random_query(rng, t);
    q.select[0].first = AggOp::None;  // keep both executions error-free
    const ExecResult before = execute(t, q);

    hydra::Condition extra;
    extra.column_index = hydra_test::rand_int(
        rng, 0, static_cast<int>(t.columns.size()) - 1);
    extra.op = cond_from_code(hydra_test::rand_int(rng, 0, kCondOpCount - 1));
    extra.value = hydra_test::random_cell_text(rng);
    q.where.push_back(extra);
    const ExecResult after = execute(t, q);

    CHECK(ok(after).matched_rows <= ok(before).matched_rows);
  }
}

TEST_CASE("executor agrees with the naive row scan on random instances") {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 500; ++trial) {
    const Table t = hydra_test::random_table(rng);
    const SqlQuery q = hydra_test::random_query(rng, t);
    const ExecResult lib = execute(t, q);
    const hydra_test::OracleResult want = hydra_test::naive_execute(t, q);

    REQUIRE(exec_ok(lib) == !want.error);
    if (want.error) continue;
    const ResultSet& got = std::get<ResultSet>(lib);
    CHECK(got.matched_rows == want.matched);
    if (want.scalar) {
      REQUIRE(got.kind == ResultSet::Kind::scalar);
      CHECK(got.scalar == want.value);  // same arithmetic order: exact
    } else {
      REQUIRE(got.kind == ResultSet::Kind::values);
      REQUIRE(got.values.size() == want.values.size());
      for (std::size_t i = 0; i < want.values.size(); ++i)
        CHECK(got.values[i].raw == want.values[i]);
    }
  }
}

TEST_CASE("results_equal compares scalars with tolerance") {
  ResultSet a, b;
  a.kind = b.kind = ResultSet::Kind::scalar;
  a.scalar = 2.0;
  b.scalar = 2.0 + 1e-12;
  CHECK(results_equal(a, b));
  b.scalar = 2.1;
  CHECK_FALSE(results_equal(a, b));
}

TEST_CASE("results_equal compares values as a folded multiset") {
  ResultSet a, b;
  a.kind = b.kind = ResultSet::Kind::values;
  a.values = {Cell::from_raw("A"), Cell::from_raw("b")};
  a.matched_rows = 2;
  b.values = {Cell::from_raw("B"), Cell::from_raw("a")};
  b.matched_rows = 2;
  CHECK(results_equal(a, b));

  b.values = {Cell::from_raw("a"), Cell::from_raw("c")};
  CHECK_FALSE(results_equal(a, b));

  ResultSet n1, n2;
  n1.kind = n2.kind = ResultSet::Kind::values;
  n1.values = {Cell::from_raw("3.5"), Cell::from_raw("12")};
  n2.values = {Cell::from_raw("12.0"), Cell::from_raw("3.50")};
  CHECK(results_equal(n1, n2));

  n2.values = {Cell::from_raw("12"), Cell::from_raw("x")};
  CHECK_FALSE(results_equal(n1, n2));
}

TEST_CASE("results_equal distinguishes kinds and sizes") {
  ResultSet scalar, values;
  scalar.kind = ResultSet::Kind::scalar;
  scalar.scalar = 1.0;
  scalar.matched_rows = 1;
  values.kind = ResultSet::Kind::values;
  values.values = {Cell::from_raw("1")};
  values.matched_rows = 1;
  CHECK_FALSE(results_equal(scalar, values));

  ResultSet more = values;
  more.values.push_back(Cell::from_raw("1"));
  CHECK_FALSE(results_equal(values, more));
}

TEST_CASE("results_equal on results treats errors as unequal") {
  const Table t = fixture_table();
  const ExecResult good = execute(t, select_only(AggOp::None, 0));
  const ExecResult bad = execute(t, select_only(AggOp::Sum, 0));
  CHECK_FALSE(exec_ok(bad));
  CHECK_FALSE(results_equal(good, bad));
  CHECK_FALSE(results_equal(bad, bad));
  CHECK(results_equal(good, good));
}
