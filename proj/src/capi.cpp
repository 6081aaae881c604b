#include "sqlgate/sqlgate.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "sqlgate/server.hpp"
#include "sqlgate/service.hpp"

struct sqlgate_service {
  std::unique_ptr<sqlgate::Service> impl;
};

struct sqlgate_server {
  std::unique_ptr<sqlgate::Server> impl;
};

namespace {

thread_local std::string g_last_error;

sqlgate_status fail(sqlgate_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

sqlgate_status status_from_name(const std::string& code) {
  static const char* names[] = {"ok",     "usage",    "format",     "integrity",  "io",       "config",
                                "contract", "adaptation", "generation", "not_found", "internal"};
  for (int i = 0; i <= SQLGATE_E_INTERNAL; ++i)
    if (code == names[i]) return static_cast<sqlgate_status>(i);
  return SQLGATE_E_INTERNAL;
}

sqlgate_status status_from(const sqlgate::Error& e) {
  return status_from_name(std::string(sqlgate::error_code_name(e.code())));
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* sqlgate_version(void) { return "0.1.0"; }

const char* sqlgate_status_name(sqlgate_status status) {
  switch (status) {
    case SQLGATE_OK: return "ok";
    case SQLGATE_E_USAGE: return "usage";
    case SQLGATE_E_FORMAT: return "format";
    case SQLGATE_E_INTEGRITY: return "integrity";
    case SQLGATE_E_IO: return "io";
    case SQLGATE_E_CONFIG: return "config";
    case SQLGATE_E_CONTRACT: return "contract";
    case SQLGATE_E_ADAPTATION: return "adaptation";
    case SQLGATE_E_GENERATION: return "generation";
    case SQLGATE_E_NOT_FOUND: return "not_found";
    case SQLGATE_E_INTERNAL: return "internal";
  }
  return "internal";
}

const char* sqlgate_last_error(void) { return g_last_error.c_str(); }

sqlgate_status sqlgate_service_new(int session_ttl_seconds, sqlgate_service** out) {
  if (!out) return fail(SQLGATE_E_USAGE, "null output pointer");
  try {
    sqlgate::ServiceOptions opts;
    if (session_ttl_seconds > 0) opts.session_ttl = std::chrono::seconds(session_ttl_seconds);
    *out = new sqlgate_service{std::make_unique<sqlgate::Service>(std::move(opts))};
    return SQLGATE_OK;
  } catch (const std::exception& e) {
    return fail(SQLGATE_E_INTERNAL, e.what());
  }
}

void sqlgate_service_free(sqlgate_service* service) { delete service; }

sqlgate_status sqlgate_request(sqlgate_service* service, const char* request, char** response) {
  if (!service || !request || !response) return fail(SQLGATE_E_USAGE, "null argument");
  try {
    std::string out = service->impl->handle(request);
    *response = dup(out);
    const std::string code = sqlgate::response_status(out);
    if (code == "ok") return SQLGATE_OK;
    return fail(status_from_name(code), out);
  } catch (const std::exception& e) {
    *response = nullptr;
    return fail(SQLGATE_E_INTERNAL, e.what());
  }
}

void sqlgate_string_free(char* s) { std::free(s); }

sqlgate_status sqlgate_server_start(sqlgate_service* service, const char* listen, sqlgate_server** out) {
  if (!service || !listen || !out) return fail(SQLGATE_E_USAGE, "null argument");
  try {
    auto server = std::make_unique<sqlgate::Server>(*service->impl, sqlgate::parse_listen_address(listen));
    server->start();
    *out = new sqlgate_server{std::move(server)};
    return SQLGATE_OK;
  } catch (const sqlgate::Error& e) {
    return fail(status_from(e), e.what());
  } catch (const std::exception& e) {
    return fail(SQLGATE_E_INTERNAL, e.what());
  }
}

int sqlgate_server_port(const sqlgate_server* server) { return server ? server->impl->port() : 0; }

void sqlgate_server_wait(sqlgate_server* server) {
  if (server) server->impl->wait();
}

void sqlgate_server_free(sqlgate_server* server) { delete server; }

}  // extern "C"
