#include "doctest.h"
#include "fixtures.hpp"
#include "sqlgate/server.hpp"
#include "sqlgate/service.hpp"

#include "httplib.h"

using namespace sqlgate;

namespace {

Json call(Service& svc, const Json& req) { return Json::parse(svc.handle(req.dump())); }

std::string register_hr(Service& svc) {
  const auto& g = fixtures::corpus(DbKind::HR, Variant::Base);
  auto r = call(svc, {{"op", "register_schema"}, {"schema_path", g.schema_path}});
  REQUIRE(r["ok"] == true);
  return r["schema_id"];
}

std::string register_wh(Service& svc) {
  const auto& g = fixtures::corpus(DbKind::WH, Variant::Base);
  auto r = call(svc, {{"op", "register_schema"},
                      {"db_path", g.db_path},
                      {"dictionary_path", g.dictionary_path},
                      {"lrf", read_file(fixtures::data("table6.lrf"))}});
  REQUIRE(r["ok"] == true);
  return r["schema_id"];
}

}  // namespace

TEST_SUITE("service") {
  TEST_CASE("register_schema ids") {
    Service svc;
    CHECK(register_hr(svc) == "hr-1");
    CHECK(register_hr(svc) == "hr-2");
    auto bad = call(svc, {{"op", "register_schema"}, {"schema", {{"db_id", "x"}}}});
    CHECK(bad["ok"] == false);
    CHECK(bad["error"]["code"] == "format");
    CHECK(bad["error"]["message"].get<std::string>().find("table_names_original") != std::string::npos);
    CHECK(call(svc, {{"op", "register_schema"}})["error"]["code"] == "usage");
  }

  TEST_CASE("malformed requests") {
    Service svc;
    CHECK(Json::parse(svc.handle("{"))["error"]["code"] == "format");
    CHECK(Json::parse(svc.handle("[1]"))["error"]["code"] == "format");
    CHECK(Json::parse(svc.handle("{}"))["error"]["code"] == "usage");
    CHECK(call(svc, {{"op", "fly"}})["error"]["code"] == "usage");
    CHECK(call(svc, {{"op", "parse"}, {"sql", "SELECT"}, {"mode", "strict"}})["error"]["code"] == "usage");
  }

  TEST_CASE("batch shape and library agreement") {
    Service svc;
    auto id = register_hr(svc);
    std::vector<std::string> cands = {"*", "FROM ", "name"};
    Json req = {{"op", "batch_feasibility"},
                {"schema_id", id},
                {"mode", "guard"},
                {"profile", "ext"},
                {"items", Json::array({{{"prefix", "SELECT "}, {"candidates", cands}},
                                       {{"prefix", "SELECT name FROM employees"}, {"candidates", cands}}})}};
    auto r = call(svc, req);
    REQUIRE(r["ok"] == true);
    REQUIRE(r["results"].size() == 2);
    auto cat = svc.schema(id)->catalog;
    const char* prefixes[] = {"SELECT ", "SELECT name FROM employees"};
    for (size_t i = 0; i < 2; ++i) {
      REQUIRE(r["results"][i]["verdicts"].size() == 3);
      auto lib = feasible_extensions(sqlgate::advance(init(Mode::ParseWithGuards, Profile::Extended, cat), prefixes[i]), cands);
      for (size_t k = 0; k < 3; ++k) CHECK(r["results"][i]["verdicts"][k] == verdict_name(lib[k]));
    }
  }

  TEST_CASE("errors stay per item") {
    Service svc;
    auto r = call(svc, {{"op", "batch_feasibility"},
                        {"items", Json::array({{{"session_id", "s-99"}, {"candidates", {"x"}}},
                                               {{"prefix", "SELECT "}, {"candidates", {"name"}}}})}});
    REQUIRE(r["ok"] == true);
    CHECK(r["results"][0]["error"]["code"] == "not_found");
    CHECK(r["results"][1]["verdicts"][0] == "valid_prefix");
  }

  TEST_CASE("sessions: commit, probe, dead state") {
    Service svc;
    auto id = register_hr(svc);
    auto open = call(svc, {{"op", "open_session"}, {"schema_id", id}, {"mode", "guard"}});
    std::string sid = open["session_id"];
    CHECK(sid == "s-1");
    Json probe = {{"op", "batch_feasibility"}, {"items", Json::array({{{"session_id", sid}, {"candidates", {"SELECT ", ")"}}}})}};
    auto first = svc.handle(probe.dump());
    CHECK(svc.handle(probe.dump()) == first);
    CHECK(Json::parse(first)["results"][0]["verdicts"] == Json::array({"valid_prefix", "invalid"}));

    Json commit = {{"op", "batch_feasibility"},
                   {"items", Json::array({{{"session_id", sid}, {"candidates", Json::array()}, {"commit", "SELECT ) "}}})}};
    CHECK(call(svc, commit)["results"][0]["verdict"] == "invalid");
    auto dead = call(svc, probe);
    CHECK(dead["results"][0]["verdicts"] == Json::array({"invalid", "invalid"}));
    CHECK(call(svc, {{"op", "close_session"}, {"session_id", sid}})["ok"] == true);
    CHECK(call(svc, {{"op", "close_session"}, {"session_id", sid}})["error"]["code"] == "not_found");
  }

  TEST_CASE("idle sessions expire") {
    auto now = std::chrono::steady_clock::time_point{};
    ServiceOptions opts;
    opts.session_ttl = std::chrono::seconds(300);
    opts.clock = [&] { return now; };
    Service svc(opts);
    call(svc, {{"op", "open_session"}});
    call(svc, {{"op", "open_session"}});
    CHECK(svc.session_count() == 2);
    now += std::chrono::seconds(200);
    Json touch = {{"op", "batch_feasibility"}, {"items", Json::array({{{"session_id", "s-1"}, {"candidates", {"SELECT"}}}})}};
    CHECK(call(svc, touch)["results"][0].contains("verdicts"));
    now += std::chrono::seconds(200);
    CHECK(svc.purge_expired() == 1);
    CHECK(svc.session_count() == 1);
    now += std::chrono::seconds(301);
    CHECK(call(svc, touch)["results"][0]["error"]["code"] == "not_found");
  }

  TEST_CASE("link_and_serialize") {
    Service svc;
    auto id = register_wh(svc);
    auto r = call(svc, {{"op", "link_and_serialize"},
                        {"schema_id", id},
                        {"question", "How many products have price higher than 100?"}});
    REQUIRE(r["ok"] == true);
    CHECK(r["data_items_text"] ==
          "[PRODUCTS].[PRICE]={filterFlag=1, value=100, dataType=decimal, operator=greaterThan}\n"
          "[PRODUCTS].[PRODUCT_ID]={aggrFlag=1, dataType=integer, focus=select, aggrFunction=countDistinct}\n");
    CHECK(r["serialized"].get<std::string>().find("price ( 100 )") != std::string::npos);

    auto off = call(svc, {{"op", "link_and_serialize"},
                          {"schema_id", id},
                          {"question", "How many products have price higher than 100?"},
                          {"db_content", false}});
    CHECK(off["data_items"].empty());
    CHECK(off["serialized"].get<std::string>().find('(') == std::string::npos);

    CHECK(call(svc, {{"op", "link_and_serialize"}, {"schema_id", "nope-1"}, {"question", "q"}})["error"]["code"] ==
          "not_found");
    auto hr = register_hr(svc);
    CHECK(call(svc, {{"op", "link_and_serialize"}, {"schema_id", hr}, {"question", "q"}})["error"]["code"] == "config");
  }

  TEST_CASE("line protocol and http serve the same records") {
    Service local;
    Service remote;
    Server tcp(remote, parse_listen_address("tcp://127.0.0.1:0"));
    tcp.start();
    LineClient client(parse_listen_address(tcp.address()));
    const auto& g = fixtures::corpus(DbKind::HR, Variant::Base);
    std::vector<Json> reqs = {
        {{"op", "register_schema"}, {"schema_path", g.schema_path}},
        {{"op", "parse"}, {"sql", "SELECT name FROM employees"}, {"mode", "guard"}, {"schema_id", "hr-1"}},
        {{"op", "open_session"}, {"prefix", "SELECT "}},
        {{"op", "nope"}},
    };
    for (const auto& r : reqs) CHECK(client.request(r.dump()) == local.handle(r.dump()));

    Server http(remote, parse_listen_address("http://127.0.0.1:0"));
    http.start();
    httplib::Client hc("127.0.0.1", http.port());
    auto res = hc.Post("/v1/parse", R"({"sql":"SELECT name FROM employees"})", "application/json");
    REQUIRE(res);
    CHECK(res->status == 200);
    CHECK(res->body == local.handle(R"({"sql":"SELECT name FROM employees","op":"parse"})") + "\n");
    auto missing = hc.Post("/v1/close_session", R"({"session_id":"s-42"})", "application/json");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    http.stop();
    tcp.stop();
  }

  TEST_CASE("listen addresses") {
    CHECK(parse_listen_address("127.0.0.1:7000").port == 7000);
    CHECK(parse_listen_address("unix:///tmp/x.sock").kind == ListenAddress::Kind::Unix);
    CHECK(parse_listen_address("http://0.0.0.0:80").kind == ListenAddress::Kind::Http);
    CHECK_THROWS_AS(parse_listen_address("localhost"), UsageError);
    CHECK_THROWS_AS(parse_listen_address("tcp://h:99999"), UsageError);
  }
}
