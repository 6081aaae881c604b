#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "sqlgate/catalog.hpp"
#include "sqlgate/linker.hpp"
#include "sqlgate/parser.hpp"

namespace sqlgate {

using Json = nlohmann::ordered_json;

struct ServiceOptions {
  std::chrono::seconds session_ttl{300};
  /// Injected for expiry tests.
  std::function<std::chrono::steady_clock::time_point()> clock = [] { return std::chrono::steady_clock::now(); };
};

struct RegisteredSchema {
  std::shared_ptr<const SchemaCatalog> catalog;
  std::optional<ValueDictionary> dictionary;
  std::optional<std::vector<Rule>> lrf;
  std::string db_path;  // empty when registered from a schema document
};

/// Request/response front of the library. Every request is one JSON object
/// with an "op" field; every response carries "ok" and, on failure,
/// "error": {"code", "message"}. Thread-safe.
class Service {
 public:
  explicit Service(ServiceOptions opts = {});

  /// One request line in, one response line out (no trailing newline).
  /// Never throws.
  std::string handle(std::string_view request);
  /// Same, with the op taken from the HTTP path instead of the body.
  std::string handle_op(std::string_view op, std::string_view body);

  size_t session_count();
  /// Drops sessions idle longer than the TTL; returns how many went.
  size_t purge_expired();

  std::shared_ptr<const RegisteredSchema> schema(const std::string& id);

 private:
  struct Session {
    ParserState state;
    std::string schema_id;
    std::chrono::steady_clock::time_point last_used;
    std::shared_ptr<std::mutex> commit_lock = std::make_shared<std::mutex>();
  };

  Json dispatch(std::string_view op, const Json& req);
  Json register_schema(const Json& req);
  Json open_session(const Json& req);
  Json close_session(const Json& req);
  Json batch_feasibility(const Json& req);
  Json parse(const Json& req);
  Json link_and_serialize(const Json& req);
  Json adapt(const Json& req);
  Json evaluate(const Json& req);
  Json gen_corpus(const Json& req);
  Json decode(const Json& req);

  ServiceOptions opts_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const RegisteredSchema>> schemas_;
  std::map<std::string, Session> sessions_;
  size_t next_schema_ = 1;
  size_t next_session_ = 1;
};

/// Response status code of a response line ("ok" or an error code name).
std::string response_status(std::string_view response);

}  // namespace sqlgate
