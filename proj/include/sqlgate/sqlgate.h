#ifndef SQLGATE_H
#define SQLGATE_H

/* C interface of libsqlgate. Every capability goes through JSON request
 * records (see README, "Service requests"); the handles are opaque. */

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sqlgate_status {
  SQLGATE_OK = 0,
  SQLGATE_E_USAGE = 1,
  SQLGATE_E_FORMAT = 2,
  SQLGATE_E_INTEGRITY = 3,
  SQLGATE_E_IO = 4,
  SQLGATE_E_CONFIG = 5,
  SQLGATE_E_CONTRACT = 6,
  SQLGATE_E_ADAPTATION = 7,
  SQLGATE_E_GENERATION = 8,
  SQLGATE_E_NOT_FOUND = 9,
  SQLGATE_E_INTERNAL = 10
} sqlgate_status;

typedef struct sqlgate_service sqlgate_service;
typedef struct sqlgate_server sqlgate_server;

const char* sqlgate_version(void);
/* Lower-case name as used in error records ("usage", "not_found", ...). */
const char* sqlgate_status_name(sqlgate_status status);
/* Message of the last failing call on this thread, or "". */
const char* sqlgate_last_error(void);

/* session_ttl_seconds <= 0 keeps the default (300). */
sqlgate_status sqlgate_service_new(int session_ttl_seconds, sqlgate_service** out);
void sqlgate_service_free(sqlgate_service* service);

/* Handles one JSON request record. *response receives the response record
 * (free with sqlgate_string_free) even when the status is not OK; the
 * status mirrors the record's error code. */
sqlgate_status sqlgate_request(sqlgate_service* service, const char* request, char** response);
void sqlgate_string_free(char* s);

/* Serves `service` at tcp://HOST:PORT, unix:///path or http://HOST:PORT. */
sqlgate_status sqlgate_server_start(sqlgate_service* service, const char* listen, sqlgate_server** out);
/* Bound port (0 for unix sockets). */
int sqlgate_server_port(const sqlgate_server* server);
/* Blocks until the server stops. */
void sqlgate_server_wait(sqlgate_server* server);
void sqlgate_server_free(sqlgate_server* server);

#ifdef __cplusplus
}
#endif

#endif
