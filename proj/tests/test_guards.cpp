#include "doctest.h"
#include "fixtures.hpp"
#include "sqlgate/guards.hpp"
#include "sqlgate/sql_ast.hpp"

using namespace sqlgate;

namespace {

const SchemaCatalog& cat(DbKind db) {
  static std::map<DbKind, std::shared_ptr<const SchemaCatalog>> cache;
  auto& c = cache[db];
  if (!c) c = fixtures::catalog_of(fixtures::corpus(db, Variant::Base));
  return *c;
}

VisibleRelation base(const SchemaCatalog& c, const std::string& table, const std::string& alias = "") {
  RelationDesc d;
  d.kind = RelationDesc::Kind::Base;
  d.name = table;
  for (const auto& col : c.table(table)->columns) d.columns.push_back(col.name);
  return {alias.empty() ? table : alias, d};
}

std::vector<std::string> cte_cols(const std::string& body, const SchemaCatalog* c = nullptr) {
  auto st = parse_complete(body, Profile::Extended);
  auto r = cte_output_columns(st.query, c);
  REQUIRE_FALSE(r.violation.has_value());
  return r.columns;
}

std::vector<GuardViolation> violations(const std::string& sql, const SchemaCatalog& c) {
  return check_statement(parse_complete(sql, Profile::Extended), c);
}

}  // namespace

TEST_SUITE("guards") {
  TEST_CASE("check_relation") {
    Scope s;
    CHECK_FALSE(check_relation(s, "employees", cat(DbKind::HR)).has_value());
    auto v = check_relation(s, "departments", cat(DbKind::HR));
    REQUIRE(v.has_value());
    CHECK(v->kind == ViolationKind::UnknownTable);
    CHECK(v->subject == "departments");
    s.ctes.push_back({"x", {"a"}});
    CHECK_FALSE(check_relation(s, "x", cat(DbKind::HR)).has_value());
  }

  TEST_CASE("cte names shadow base tables") {
    Scope s;
    s.ctes.push_back({"employees", {"only"}});
    auto r = resolve_relation(s, "employees", cat(DbKind::HR));
    REQUIRE(r.has_value());
    CHECK(r->kind == RelationDesc::Kind::Cte);
    CHECK(r->columns == std::vector<std::string>{"only"});
    CHECK(violations("WITH employees AS (SELECT name FROM employees) SELECT salary FROM employees", cat(DbKind::HR))
              .size() == 1);
  }

  TEST_CASE("check_column") {
    const auto& in = cat(DbKind::IN);
    Scope s;
    s.relations.push_back(base(in, "inv", "t1"));
    CHECK_FALSE(check_column(s, "t1", "status", in).has_value());
    auto unbound = check_column(s, "t2", "status", in);
    REQUIRE(unbound.has_value());
    CHECK(unbound->kind == ViolationKind::UnboundAlias);

    const auto& hr = cat(DbKind::HR);
    Scope e;
    e.relations.push_back(base(hr, "employees"));
    CHECK_FALSE(check_column(e, std::nullopt, "salary", hr).has_value());
    CHECK(check_column(e, std::nullopt, "wage", hr)->kind == ViolationKind::UnknownColumn);

    const auto& wh = cat(DbKind::WH);
    Scope two;
    two.relations.push_back(base(wh, "customers"));
    two.relations.push_back(base(wh, "vendors"));
    auto amb = check_column(two, std::nullopt, "name", wh);
    REQUIRE(amb.has_value());
    CHECK(amb->kind == ViolationKind::AmbiguousColumn);
    CHECK_FALSE(check_column(two, "vendors", "name", wh).has_value());
  }

  TEST_CASE("correlated references reach the parent scope") {
    const auto& hr = cat(DbKind::HR);
    auto parent = std::make_shared<Scope>();
    parent->relations.push_back(base(hr, "employees", "e"));
    Scope inner;
    inner.relations.push_back(base(hr, "employees", "m"));
    inner.parent = parent;
    CHECK_FALSE(check_column(inner, "e", "dept", hr).has_value());
    CHECK(violations("SELECT name FROM employees AS e WHERE salary > (SELECT avg(salary) FROM employees AS m "
                     "WHERE m.dept = e.dept)",
                     hr)
              .empty());
  }

  TEST_CASE("cte_output_columns") {
    CHECK(cte_cols("SELECT avg(salary) AS a FROM employees") == std::vector<std::string>{"a"});
    CHECK(cte_cols("SELECT dept, salary FROM employees") == std::vector<std::string>{"dept", "salary"});
    CHECK(cte_cols("SELECT salary*2 FROM employees") == std::vector<std::string>{"_c1"});
    CHECK(cte_cols("SELECT dept, count(*) FROM employees GROUP BY dept") == std::vector<std::string>{"dept", "_c2"});
    CHECK(cte_cols("SELECT * FROM employees", &cat(DbKind::HR)).size() == 9);
    auto st = parse_complete("SELECT * FROM employees", Profile::Extended);
    auto r = cte_output_columns(st.query);
    CHECK(r.violation.has_value());
  }

  TEST_CASE("statement checks") {
    const auto& hr = cat(DbKind::HR);
    CHECK(violations("WITH d AS (SELECT dept, avg(salary) AS s FROM employees GROUP BY dept) SELECT dept FROM d "
                     "WHERE s > 100",
                     hr)
              .empty());
    auto v = violations("WITH d AS (SELECT dept FROM employees) SELECT salary FROM d", hr);
    REQUIRE(v.size() == 1);
    CHECK(v[0].kind == ViolationKind::UnknownColumn);
    CHECK(v[0].subject == "salary");
    CHECK(violations("SELECT a.name FROM employees AS a JOIN employees AS a ON a.emp_no = a.manager", hr)
              .at(0)
              .kind == ViolationKind::DuplicateAlias);
    CHECK(violations("SELECT name FROM employees ORDER BY name", hr).empty());
    // Output aliases are visible in ORDER BY.
    CHECK(violations("SELECT dept, count(*) AS n FROM employees GROUP BY dept ORDER BY n DESC", hr).empty());
  }

  TEST_CASE("no violations on generated golds") {
    for (auto [db, v] : fixtures::all_specs()) {
      const auto& g = fixtures::corpus(db, v);
      auto c = fixtures::catalog_of(g);
      for (const auto& r : fixtures::all_records(g)) CHECK_MESSAGE(violations(r.gold, *c).empty(), r.gold);
    }
  }
}
