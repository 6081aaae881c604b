#include <regex>

#include "doctest.h"
#include "fixtures.hpp"
#include "sqlgate/serializer.hpp"

using namespace sqlgate;

namespace {

const SchemaCatalog& wh() {
  static auto c = fixtures::catalog_of(fixtures::corpus(DbKind::WH, Variant::Base));
  return *c;
}

const char* kQuestion = "How many products have price higher than 100?";

}  // namespace

TEST_SUITE("serializer") {
  TEST_CASE("value tag after its column") {
    auto s = serialize(kQuestion, wh(), {{"products", "price", "100"}});
    CHECK(s.rfind("how many products have price higher than 100? | warehouse | ", 0) == 0);
    CHECK(s.find("| products : product_id, name, category, price ( 100 ), manufacturer_id, vendor_id") !=
          std::string::npos);
  }

  TEST_CASE("layout follows catalog order") {
    auto s = serialize("q", wh(), {}, {DbContent::Disabled, true});
    std::string want = "q | warehouse";
    for (const auto& t : wh().tables()) {
      want += " | " + t.name + " :";
      for (size_t i = 0; i < t.columns.size(); ++i) want += (i ? ", " : " ") + t.columns[i].name;
    }
    CHECK(s == want);
  }

  TEST_CASE("disabled content drops every value") {
    auto s = serialize(kQuestion, wh(), {{"products", "price", "100"}}, {DbContent::Disabled, true});
    CHECK(s.find('(') == std::string::npos);
    CHECK(s == serialize(kQuestion, wh(), {}, {DbContent::Disabled, true}));
    CHECK_THROWS_AS(serialize(kQuestion, wh(), {{"products", "weight", "1"}}, {DbContent::Disabled, true}),
                    IntegrityError);
  }

  TEST_CASE("two values on one column") {
    auto s = serialize("q", wh(), {{"customers", "name", "ACME Corp"}, {"customers", "name", "Globex"}});
    CHECK(s.find("customers : customer_id, name ( ACME Corp , Globex ), city") != std::string::npos);
  }

  TEST_CASE("unknown column") {
    CHECK_THROWS_AS(serialize("q", wh(), {{"products", "weight", "1"}}), IntegrityError);
    CHECK_THROWS_AS(serialize("q", wh(), {{"parts", "price", "1"}}), IntegrityError);
  }

  TEST_CASE("schema case flag") {
    auto s = serialize("Q", wh(), {}, {DbContent::Enabled, false});
    CHECK(s.rfind("q | warehouse", 0) == 0);
  }

  TEST_CASE("tags read back") {
    std::vector<ColumnValue> links = {
        {"customers", "name", "ACME Corp"}, {"products", "category", "Office"}, {"products", "price", "100"}};
    auto s = serialize("q", wh(), links);
    CHECK(extract_value_tags(s) == links);
    CHECK(s == serialize("q", wh(), links));
    // Independent regex scan: one tag group per linked column.
    std::regex tag(R"(([a-z_]+) \( ([^)]*) \))");
    size_t groups = 0;
    for (std::sregex_iterator it(s.begin(), s.end(), tag), end; it != end; ++it) ++groups;
    CHECK(groups == 3);
    CHECK(extract_value_tags(serialize("q", wh(), {}, {DbContent::Disabled, true})).empty());
  }
}
