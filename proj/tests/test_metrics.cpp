#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "sqlgate/metrics.hpp"

using namespace sqlgate;

namespace {

const char* kOutstandingGold =
    "SELECT id, bill_amnt FROM inv WHERE (status='RT' OR status='RJ' OR status='P' OR status='A') AND created='Y'";
const char* kOutstandingPred =
    "select count(*) from inv as t1 join contract as t2 on t1.con_number = t2.con_number";

}  // namespace

TEST_SUITE("metrics") {
  TEST_CASE("exact match examples") {
    const char* a = "SELECT name FROM employees WHERE dept = 'Sales' OR salary = 2";
    const char* b = "SELECT name FROM employees WHERE salary = 2 OR dept = 'Sales'";
    CHECK(exact_match(a, b, nullptr, true) == EmVerdict::Match);
    CHECK(exact_match(a, b, nullptr, false) == EmVerdict::Match);
    CHECK(exact_match(a, a, nullptr) == EmVerdict::Match);
    CHECK(exact_match(kOutstandingGold, kOutstandingPred, nullptr) == EmVerdict::NoMatch);
    const char* with = "WITH d AS (SELECT dept, avg(salary) AS s FROM employees GROUP BY dept) SELECT dept FROM d";
    CHECK(exact_match(with, with, nullptr) == EmVerdict::Match);
    CHECK(exact_match("SELECT (", a, nullptr) == EmVerdict::GoldUnparseable);
    CHECK(exact_match(a, "SELECT (", nullptr) == EmVerdict::PredUnparseable);
  }

  TEST_CASE("literal values and select order") {
    const char* a = "SELECT name FROM employees WHERE dept = 'Sales'";
    const char* b = "SELECT name FROM employees WHERE dept = 'Legal'";
    CHECK(exact_match(a, b, nullptr, true) == EmVerdict::NoMatch);
    CHECK(exact_match(a, b, nullptr, false) == EmVerdict::Match);
    CHECK(exact_match("SELECT name, dept FROM employees", "SELECT dept, name FROM employees", nullptr) ==
          EmVerdict::NoMatch);
  }

  TEST_CASE("aliases and cte names are renamed away") {
    CHECK(exact_match("SELECT T1.name FROM employees AS T1 JOIN employees AS T2 ON T1.manager = T2.emp_no",
                      "SELECT a.name FROM employees AS a JOIN employees AS b ON a.manager = b.emp_no",
                      nullptr) == EmVerdict::Match);
    CHECK(exact_match("WITH x AS (SELECT dept FROM employees) SELECT dept FROM x",
                      "WITH y AS (SELECT dept FROM employees) SELECT dept FROM y", nullptr) == EmVerdict::Match);
  }

  TEST_CASE("execution accuracy examples") {
    const auto& hr = fixtures::corpus(DbKind::HR, Variant::Base);
    CHECK(execution_accuracy("SELECT max(salary) FROM employees",
                             "SELECT salary FROM employees ORDER BY salary DESC LIMIT 1", hr.db_path) ==
          ExVerdict::Match);
    CHECK(execution_accuracy("SELECT name FROM employees", "SELECT name FROM employees", hr.db_path) ==
          ExVerdict::Match);
    CHECK(execution_accuracy("SELECT nope FROM employees", "SELECT name FROM employees", hr.db_path) ==
          ExVerdict::GoldExecError);
    CHECK(execution_accuracy("SELECT name FROM employees", "SELECT nope FROM employees", hr.db_path) ==
          ExVerdict::PredExecError);
    // Row order only counts under a top-level ORDER BY.
    CHECK(execution_accuracy("SELECT name FROM employees", "SELECT name FROM employees ORDER BY name DESC",
                             hr.db_path) == ExVerdict::Match);
    CHECK(execution_accuracy("SELECT name FROM employees ORDER BY name", "SELECT name FROM employees ORDER BY name DESC",
                             hr.db_path) == ExVerdict::NoMatch);
    CHECK_THROWS_AS(execution_accuracy("SELECT 1", "SELECT 1", "/nonexistent/db.sqlite"), IoError);
  }

  TEST_CASE("mutated status literal changes the result") {
    const auto& in = fixtures::corpus(DbKind::IN, Variant::Base);
    std::string gold =
        "SELECT id, bill_amnt FROM inv WHERE (status = 'RT' OR status = 'RJ' OR status = 'P' OR status = 'A') AND "
        "created = 'Y'";
    std::string pred = gold;
    pred.replace(pred.find("'RT'"), 4, "'XX'");
    CHECK(execution_accuracy(gold, gold, in.db_path) == ExVerdict::Match);
    CHECK(execution_accuracy(gold, pred, in.db_path) == ExVerdict::NoMatch);
  }

  TEST_CASE("corpus report") {
    const auto& hr = fixtures::corpus(DbKind::HR, Variant::Base);
    auto cat = fixtures::catalog_of(hr);
    std::vector<EvalInput> inputs;
    for (const auto& r : hr.test) inputs.push_back({r.question, r.gold, r.gold});
    auto same = evaluate_corpus(inputs, cat.get(), hr.db_path);
    REQUIRE(same.em);
    REQUIRE(same.ex);
    CHECK(*same.em->percent() == doctest::Approx(100.0));
    CHECK(*same.ex->percent() == doctest::Approx(100.0));
    CHECK(report_table(same, "HR").find("100.0") != std::string::npos);

    // Every gold returns rows, so an always-empty prediction never matches.
    inputs.resize(10);
    for (size_t i = 0; i < 10; i += 2) inputs[i].pred = "SELECT name FROM employees WHERE 1 = 0";
    size_t expected = 0;
    for (const auto& in : inputs) expected += in.pred == in.gold;
    auto half = evaluate_corpus(inputs, cat.get(), hr.db_path, EvalOptions{.jobs = 3});
    CHECK(expected == 5);
    CHECK(half.ex->matched == expected);
    CHECK(format_percent(*half.ex->percent()) == "50.0");

    auto empty = evaluate_corpus({}, cat.get(), hr.db_path);
    CHECK(empty.empty());
    CHECK_FALSE(empty.ex->percent().has_value());
    auto j = nlohmann::json::parse(report_json(empty));
    CHECK(j["empty"] == true);
  }

  TEST_CASE("unparseable golds are excluded") {
    const auto& hr = fixtures::corpus(DbKind::HR, Variant::Base);
    std::vector<EvalInput> inputs = {{"q", "SELECT (", "SELECT name FROM employees"},
                                     {"q", "SELECT name FROM employees", "SELECT name FROM employees"}};
    auto rep = evaluate_corpus(inputs, nullptr, hr.db_path);
    CHECK(rep.em->excluded == 1);
    CHECK(rep.em->scored == 1);
    CHECK(rep.records[0].em == EmVerdict::GoldUnparseable);
    CHECK(rep.records[0].ex == ExVerdict::GoldExecError);
  }

  TEST_CASE("format_percent") {
    CHECK(format_percent(50) == "50.0");
    CHECK(format_percent(2.0 / 3.0 * 100) == "66.7");
  }
}
