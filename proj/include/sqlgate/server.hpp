#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "sqlgate/service.hpp"

namespace sqlgate {

struct ListenAddress {
  enum class Kind { Tcp, Unix, Http };
  Kind kind = Kind::Tcp;
  std::string host = "127.0.0.1";
  int port = 0;      // 0 picks a free port
  std::string path;  // unix socket path
};

/// `tcp://HOST:PORT`, `HOST:PORT`, `unix:///path/to.sock` or
/// `http://HOST:PORT`. Throws UsageError otherwise.
ListenAddress parse_listen_address(std::string_view text);

/// Serves a Service over line-delimited JSON (tcp/unix) or HTTP
/// (POST /v1/<op>). One thread per connection.
class Server {
 public:
  Server(Service& service, ListenAddress addr);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  /// Binds and starts accepting in the background. Throws IoError.
  void start();
  /// Bound port (tcp/http); valid after start().
  int port() const { return port_; }
  /// Address clients can connect to, in parse_listen_address syntax.
  std::string address() const;
  void stop();
  /// Blocks until stop() is called from elsewhere.
  void wait();

 private:
  struct Http;
  void accept_loop();
  void serve_connection(int fd);

  Service& service_;
  ListenAddress addr_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::vector<std::thread> workers_;
  std::mutex workers_mu_;
  std::vector<int> open_fds_;
  std::unique_ptr<Http> http_;
};

/// Minimal blocking client for the line protocol.
class LineClient {
 public:
  explicit LineClient(const ListenAddress& addr);
  ~LineClient();
  LineClient(const LineClient&) = delete;
  LineClient& operator=(const LineClient&) = delete;
  /// Sends one request line and reads one response line.
  std::string request(std::string_view line);

 private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace sqlgate
