#include <regex>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "sqlgate/corpus.hpp"
#include "sqlgate/sql_ast.hpp"
#include "sqlgate/sqlite_db.hpp"

using namespace sqlgate;

TEST_SUITE("corpus") {
  TEST_CASE("split sizes") {
    CHECK(default_splits(DbKind::HR, Variant::Base) == SplitSizes{99, 10, 78});
    CHECK(default_splits(DbKind::WH, Variant::Base) == SplitSizes{146, 16, 40});
    CHECK(default_splits(DbKind::IN, Variant::Base) == SplitSizes{145, 18, 46});
    CHECK(default_splits(DbKind::HR, Variant::With) == SplitSizes{35, 4, 8});
    CHECK(default_splits(DbKind::WH, Variant::With) == SplitSizes{18, 3, 7});
    CHECK(default_splits(DbKind::HR, Variant::Fnc) == default_splits(DbKind::HR, Variant::Base));
    CHECK_THROWS_AS(default_splits(DbKind::IN, Variant::With), ConfigError);
    for (auto [db, v] : fixtures::all_specs()) {
      const auto& g = fixtures::corpus(db, v);
      auto want = default_splits(db, v);
      CHECK(g.train.size() == want.train);
      CHECK(g.dev.size() == want.dev);
      CHECK(g.test.size() == want.test);
      CHECK(load_corpus(g.test_path) == g.test);
    }
    CHECK(fixtures::all_records(fixtures::corpus(DbKind::HR, Variant::Base)).size() == 187);
    CHECK(fixtures::all_records(fixtures::corpus(DbKind::HR, Variant::With)).size() == 47);
    CHECK(fixtures::all_records(fixtures::corpus(DbKind::WH, Variant::With)).size() == 28);
  }

  TEST_CASE("every gold returns rows and is unique") {
    for (auto [db, v] : fixtures::all_specs()) {
      const auto& g = fixtures::corpus(db, v);
      auto conn = db::Database::open_readonly(g.db_path);
      std::set<std::string> seen;
      for (const auto& r : fixtures::all_records(g)) {
        CHECK_MESSAGE(!conn.query(r.gold).rows.empty(), r.gold);
        CHECK(seen.insert(r.gold).second);
        CHECK(r.db_id == fixture_db_id(db));
      }
    }
  }

  TEST_CASE("variant content") {
    for (auto db : {DbKind::HR, DbKind::WH})
      for (const auto& r : fixtures::all_records(fixtures::corpus(db, Variant::With)))
        CHECK(!parse_complete(r.gold, Profile::Extended).ctes.empty());
    for (auto db : {DbKind::HR, DbKind::WH, DbKind::IN})
      for (const auto& r : fixtures::all_records(fixtures::corpus(db, Variant::Fnc)))
        CHECK(r.gold.find("lower(trim(") != std::string::npos);
    // Multi-way OR group conjoined with another condition.
    std::regex group(R"(\((\w+ = '[A-Z]+' OR ){3,}\w+ = '[A-Z]+'\) AND )");
    size_t groups = 0;
    for (const auto& r : fixtures::all_records(fixtures::corpus(DbKind::IN, Variant::Base)))
      groups += std::regex_search(r.gold, group);
    CHECK(groups > 0);
  }

  TEST_CASE("deterministic per seed") {
    auto dir_a = fixtures::root() / "det_a";
    auto dir_b = fixtures::root() / "det_b";
    std::filesystem::create_directories(dir_a);
    std::filesystem::create_directories(dir_b);
    CorpusSpec spec{DbKind::WH, Variant::Fnc, default_splits(DbKind::WH, Variant::Fnc), 5};
    auto a = generate(spec, dir_a.string());
    auto b = generate(spec, dir_b.string());
    for (auto pick : {&GeneratedCorpus::db_path, &GeneratedCorpus::train_path, &GeneratedCorpus::test_path,
                      &GeneratedCorpus::schema_path, &GeneratedCorpus::dictionary_path})
      CHECK(read_file(a.*pick) == read_file(b.*pick));
    auto manifest = nlohmann::json::parse(read_file(a.manifest_path));
    CHECK(manifest["seed"] == 5);
    CHECK(manifest["variant"] == "fnc");
    spec.seed = 6;
    auto dir_c = fixtures::root() / "det_c";
    std::filesystem::create_directories(dir_c);
    CHECK(read_file(generate(spec, dir_c.string()).train_path) != read_file(a.train_path));
  }

  TEST_CASE("fnc rewrite") {
    auto cat = fixtures::catalog_of(fixtures::corpus(DbKind::HR, Variant::Base));
    CHECK(apply_fnc_to_sql("SELECT name FROM employees WHERE dept = 'Sales'", *cat) ==
          "SELECT name FROM employees WHERE lower(trim(dept)) = lower(trim('Sales'))");
    const char* numeric = "SELECT name FROM employees WHERE salary > 100 AND emp_no = 3";
    CHECK(apply_fnc_to_sql(numeric, *cat) == numeric);
    std::vector<CorpusRecord> recs = {{"Who works in Sales?", "SELECT name FROM employees WHERE dept = 'Sales'", "hr",
                                       std::nullopt}};
    auto out = apply_fnc_transform(recs, *cat);
    CHECK(out[0].question == recs[0].question);
    CHECK(out[0].gold != recs[0].gold);
  }

  TEST_CASE("loading") {
    CHECK(parse_corpus("").empty());
    const char* good = R"({"question":"q","gold":"SELECT name FROM employees","db_id":"hr"})";
    const char* bad = R"({"question":"q","gold":"SELECT FROM WHERE","db_id":"hr"})";
    std::string text = std::string(good) + "\n" + good + "\n{broken\n";
    try {
      parse_corpus(text);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    try {
      parse_corpus(std::string(good) + "\n" + bad + "\n");
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    CHECK(parse_corpus(std::string(bad) + "\n", false).size() == 1);
    auto one = parse_corpus(good);
    CHECK(parse_corpus(corpus_to_jsonl(one)) == one);
    CHECK_THROWS_AS(load_corpus("/nonexistent/corpus.jsonl"), IoError);
  }
}
