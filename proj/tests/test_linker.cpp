#include <algorithm>

#include "doctest.h"
#include "fixtures.hpp"
#include "sqlgate/linker.hpp"

using namespace sqlgate;

namespace {

const SchemaCatalog& wh() {
  static auto c = fixtures::catalog_of(fixtures::corpus(DbKind::WH, Variant::Base));
  return *c;
}

std::vector<Rule> table6_lrf() {
  return adapt(load_rules(fixtures::data("table6.trf")), parse_saf(fixtures::data("table6.saf")));
}

const AnnotatedToken& token(const std::vector<AnnotatedToken>& toks, const std::string& surface) {
  auto it = std::find_if(toks.begin(), toks.end(), [&](const auto& t) { return t.surface == surface; });
  REQUIRE(it != toks.end());
  return *it;
}

}  // namespace

TEST_SUITE("linker") {
  TEST_CASE("parse_saf") {
    auto saf = parse_saf(fixtures::data("table6.saf"), &wh());
    REQUIRE(saf.size() == 1);
    SafEntry want{"product has price", "PRODUCTS", "PRODUCT_ID", DataType::Integer,
                  "PRODUCTS", "PRICE", DataType::Decimal};
    CHECK(saf[0] == want);
    CHECK(parse_saf_text("").empty());
    CHECK(parse_saf_text("  \n\n").empty());
  }

  TEST_CASE("parse_saf errors") {
    const char* missing =
        "product has price; tableName1 is PRODUCTS; colName1 is PRODUCT_ID; dataType1 is integer;\n"
        "tableName2 is PRODUCTS; colName2 is PRICE;\n";
    try {
      parse_saf_text(missing);
      FAIL("expected a format error");
    } catch (const FormatError& e) {
      std::string msg = e.what();
      CHECK(msg.find("dataType2") != std::string::npos);
      CHECK(msg.find("line 1") != std::string::npos);
    }
    const char* unknown =
        "product has weight; tableName1 is PRODUCTS; colName1 is PRODUCT_ID; dataType1 is integer; "
        "tableName2 is PRODUCTS; colName2 is WEIGHT; dataType2 is decimal;";
    CHECK_NOTHROW(parse_saf_text(unknown));
    CHECK_THROWS_AS(parse_saf_text(unknown, &wh()), IntegrityError);
  }

  TEST_CASE("adapt reproduces the Table 6 LRF") {
    auto lrf = table6_lrf();
    auto expected = load_rules(fixtures::data("table6.lrf"));
    REQUIRE(lrf.size() == 1);
    CHECK(lrf == expected);
    CHECK(lrf[0].name == "prop_owner_product_has_price_");
    REQUIRE(lrf[0].arcs.size() == 2);
    CHECK(lrf[0].arcs[0].role == "subj");
    CHECK(lrf[0].arcs[0].target == "product");
    CHECK(lrf[0].arcs[1].role == "obj");
    CHECK(lrf[0].arcs[1].target == "price");
    CHECK(parse_rules(write_rules(lrf)) == lrf);
  }

  TEST_CASE("adapt edge cases") {
    auto saf = parse_saf(fixtures::data("table6.saf"));
    CHECK(adapt({}, saf).empty());
    // Head constraints require the lemma "have": a "places" entry never instantiates it.
    auto has_rule = load_rules(fixtures::data("table6.trf"));
    auto places = parse_saf_text(
        "customer places order; tableName1 is CUSTOMERS; colName1 is CUSTOMER_ID; dataType1 is integer; "
        "tableName2 is SALES; colName2 is SALE_ID; dataType2 is integer;");
    CHECK(adapt(has_rule, places).empty());
    auto all = load_rules(fixtures::data("rules.trf"));
    auto out = adapt(all, places);
    CHECK(!out.empty());
    for (const auto& r : out) CHECK(r.name.find("VAR") == std::string::npos);

    auto odd = parse_saf_text(
        "price of product; tableName1 is PRODUCTS; colName1 is PRODUCT_ID; dataType1 is integer; "
        "tableName2 is PRODUCTS; colName2 is PRICE; dataType2 is decimal;");
    try {
      adapt(has_rule, odd);
      FAIL("expected an adaptation error");
    } catch (const AdaptationError& e) {
      CHECK(std::string(e.what()).find("price of product") != std::string::npos);
    }
  }

  TEST_CASE("adapt ignores SAF order") {
    auto trf = load_rules(fixtures::data("rules.trf"));
    auto saf = parse_saf(fixtures::data("wh.saf"));
    auto a = adapt(trf, saf);
    std::reverse(saf.begin(), saf.end());
    auto b = adapt(trf, saf);
    auto by_name = [](const Rule& x, const Rule& y) { return write_rules({x}) < write_rules({y}); };
    std::sort(a.begin(), a.end(), by_name);
    std::sort(b.begin(), b.end(), by_name);
    CHECK(a == b);
  }

  TEST_CASE("annotate") {
    auto t = annotate("How many products have price having");
    CHECK(token(t, "have").lemma == "have");
    CHECK(token(t, "have").pos == Pos::Verb);
    CHECK(token(t, "products").lemma == "product");
    CHECK(token(t, "products").pos == Pos::Noun);
    CHECK(token(t, "having").lemma == "have");
    CHECK(token(t, "having").features.count("ving") == 1);
    for (size_t i = 1; i < t.size(); ++i) CHECK(t[i - 1].end <= t[i].begin);
    CHECK(annotate("").empty());
  }

  TEST_CASE("process_query reproduces the data-items") {
    auto items = process_query("How many products have price higher than 100?", table6_lrf(), ValueDictionary{}, wh());
    REQUIRE(items.size() == 2);
    DataItem price;
    price.table = "PRODUCTS";
    price.column = "PRICE";
    price.data_type = DataType::Decimal;
    price.filter_flag = true;
    price.value = "100";
    price.op = "greaterThan";
    DataItem id;
    id.table = "PRODUCTS";
    id.column = "PRODUCT_ID";
    id.data_type = DataType::Integer;
    id.focus = "select";
    id.aggr_flag = true;
    id.aggr_function = "countDistinct";
    CHECK(items[0] == price);
    CHECK(items[1] == id);
    CHECK(extract_column_value_pairs(items) == std::vector<ColumnValue>{{"PRODUCTS", "PRICE", "100"}});
    CHECK(process_query("", table6_lrf(), ValueDictionary{}, wh()).empty());
    CHECK(extract_column_value_pairs({}).empty());
  }

  TEST_CASE("dictionary links use the longest match") {
    ValueDictionary dict({{"acme", {{"vendors", "name"}}}, {"acme corp", {{"customers", "name"}}}}, {});
    auto items = process_query("Show invoices for ACME Corp", {}, dict, wh());
    REQUIRE(items.size() == 1);
    CHECK(items[0].key() == "[CUSTOMERS].[NAME]");
    CHECK(items[0].filter_flag);
    CHECK(items[0].value == "ACME Corp");
    CHECK(items[0].op == "equals");
    CHECK_FALSE(items[0].ambiguous);

    auto short_only = process_query("Show invoices for ACME", {}, dict, wh());
    REQUIRE(short_only.size() == 1);
    CHECK(short_only[0].key() == "[VENDORS].[NAME]");
  }

  TEST_CASE("ambiguous values link to every column") {
    ValueDictionary dict({{"acme corp", {{"customers", "name"}, {"vendors", "name"}}}}, {});
    auto items = process_query("Show invoices for ACME Corp", {}, dict, wh());
    REQUIRE(items.size() == 2);
    for (const auto& it : items) CHECK(it.ambiguous);
    auto pairs = extract_column_value_pairs(items);
    CHECK(pairs == std::vector<ColumnValue>{{"CUSTOMERS", "NAME", "ACME Corp"}, {"VENDORS", "NAME", "ACME Corp"}});
  }

  TEST_CASE("every item names a catalog column") {
    auto lrf = adapt(load_rules(fixtures::data("rules.trf")), parse_saf(fixtures::data("wh.saf"), &wh()));
    const auto& g = fixtures::corpus(DbKind::WH, Variant::Base);
    auto dict = ValueDictionary::from_json(read_file(g.dictionary_path), wh());
    for (const auto& r : fixtures::all_records(g))
      for (const auto& it : process_query(r.question, lrf, dict, wh())) {
        const auto* c = wh().column(it.table, it.column);
        REQUIRE_MESSAGE(c != nullptr, it.key());
        CHECK(c->type == it.data_type);
        if (it.filter_flag) CHECK((it.value && it.op));
        if (it.aggr_flag) CHECK(it.aggr_function.has_value());
      }
  }

  TEST_CASE("format_data_items") {
    auto items = process_query("How many products have price higher than 100?", table6_lrf(), ValueDictionary{}, wh());
    auto text = format_data_items(items);
    CHECK(text.find("[PRODUCTS].[PRODUCT_ID]={") != std::string::npos);
    CHECK(text.find("aggrFunction=countDistinct") != std::string::npos);
    CHECK(text.find("operator=greaterThan") != std::string::npos);
  }
}
