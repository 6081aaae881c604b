#include "sqlgate/server.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "httplib.h"

namespace sqlgate {

ListenAddress parse_listen_address(std::string_view text) {
  ListenAddress a;
  std::string_view rest = text;
  auto strip = [&](std::string_view scheme) {
    if (rest.substr(0, scheme.size()) != scheme) return false;
    rest.remove_prefix(scheme.size());
    return true;
  };
  if (strip("unix://")) {
    a.kind = ListenAddress::Kind::Unix;
    a.path = std::string(rest);
    if (a.path.empty()) throw UsageError("unix address needs a path");
    return a;
  }
  if (strip("http://")) a.kind = ListenAddress::Kind::Http;
  else strip("tcp://");
  auto colon = rest.rfind(':');
  if (colon == std::string_view::npos) throw UsageError("address '" + std::string(text) + "' needs HOST:PORT");
  a.host = std::string(rest.substr(0, colon));
  if (a.host.empty()) a.host = "127.0.0.1";
  try {
    size_t used = 0;
    a.port = std::stoi(std::string(rest.substr(colon + 1)), &used);
    if (used != rest.size() - colon - 1 || a.port < 0 || a.port > 65535) throw std::invalid_argument("port");
  } catch (const std::exception&) {
    throw UsageError("address '" + std::string(text) + "' has a bad port");
  }
  return a;
}

namespace {

std::string sys_error(const std::string& what) { return what + ": " + std::strerror(errno); }

bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    ssize_t n = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (n <= 0) {
      if (n < 0 && errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<size_t>(n));
  }
  return true;
}

int connect_to(const ListenAddress& a) {
  if (a.kind == ListenAddress::Kind::Unix) {
    int fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
    sockaddr_un sa{};
    sa.sun_family = AF_UNIX;
    std::strncpy(sa.sun_path, a.path.c_str(), sizeof(sa.sun_path) - 1);
    if (::connect(fd, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0) {
      ::close(fd);
      throw IoError(sys_error("connect " + a.path));
    }
    return fd;
  }
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(a.host.c_str(), std::to_string(a.port).c_str(), &hints, &res) != 0 || !res)
    throw IoError("cannot resolve " + a.host);
  int fd = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
  const int rc = ::connect(fd, res->ai_addr, res->ai_addrlen);
  ::freeaddrinfo(res);
  if (rc != 0) {
    ::close(fd);
    throw IoError(sys_error("connect " + a.host + ":" + std::to_string(a.port)));
  }
  return fd;
}

}  // namespace

struct Server::Http {
  httplib::Server server;
  std::thread thread;
};

Server::Server(Service& service, ListenAddress addr) : service_(service), addr_(std::move(addr)) {}

Server::~Server() { stop(); }

std::string Server::address() const {
  switch (addr_.kind) {
    case ListenAddress::Kind::Unix: return "unix://" + addr_.path;
    case ListenAddress::Kind::Http: return "http://" + addr_.host + ":" + std::to_string(port_);
    case ListenAddress::Kind::Tcp: break;
  }
  return "tcp://" + addr_.host + ":" + std::to_string(port_);
}

void Server::start() {
  if (running_) return;
  if (addr_.kind == ListenAddress::Kind::Http) {
    http_ = std::make_unique<Http>();
    http_->server.Post(R"(/v1/([a-z_]+))", [this](const httplib::Request& req, httplib::Response& res) {
      std::string body = service_.handle_op(req.matches[1].str(), req.body);
      const std::string status = response_status(body);
      res.status = status == "ok" ? 200 : status == "not_found" ? 404 : status == "internal" || status == "io" ? 500 : 400;
      res.set_content(body + "\n", "application/json");
    });
    port_ = addr_.port == 0 ? http_->server.bind_to_any_port(addr_.host) : addr_.port;
    if (port_ < 0 || (addr_.port != 0 && !http_->server.bind_to_port(addr_.host, addr_.port)))
      throw IoError("cannot bind http://" + addr_.host + ":" + std::to_string(addr_.port));
    running_ = true;
    http_->thread = std::thread([this] { http_->server.listen_after_bind(); });
    http_->server.wait_until_ready();
    return;
  }

  if (addr_.kind == ListenAddress::Kind::Unix) {
    listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
    ::unlink(addr_.path.c_str());
    sockaddr_un sa{};
    sa.sun_family = AF_UNIX;
    std::strncpy(sa.sun_path, addr_.path.c_str(), sizeof(sa.sun_path) - 1);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0)
      throw IoError(sys_error("bind " + addr_.path));
  } else {
    listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    int yes = 1;
    ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    sockaddr_in sa{};
    sa.sin_family = AF_INET;
    sa.sin_port = htons(static_cast<uint16_t>(addr_.port));
    if (::inet_pton(AF_INET, addr_.host.c_str(), &sa.sin_addr) != 1)
      throw UsageError("listen host must be an IPv4 address: " + addr_.host);
    if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&sa), sizeof(sa)) != 0)
      throw IoError(sys_error("bind " + addr_.host + ":" + std::to_string(addr_.port)));
    socklen_t len = sizeof(sa);
    ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&sa), &len);
    port_ = ntohs(sa.sin_port);
  }
  if (::listen(listen_fd_, 64) != 0) throw IoError(sys_error("listen"));
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void Server::accept_loop() {
  while (running_) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      break;  // listening socket shut down
    }
    std::lock_guard lock(workers_mu_);
    open_fds_.push_back(fd);
    workers_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void Server::serve_connection(int fd) {
  std::string buffer;
  char chunk[4096];
  bool alive = true;
  while (alive) {
    ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<size_t>(n));
    size_t nl;
    while (alive && (nl = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, nl);
      buffer.erase(0, nl + 1);
      if (!trim(line).empty()) alive = write_all(fd, service_.handle(line) + "\n");
    }
  }
  std::lock_guard lock(workers_mu_);
  std::erase(open_fds_, fd);
  ::close(fd);
}

void Server::stop() {
  if (!running_.exchange(false)) return;
  if (http_) {
    http_->server.stop();
    if (http_->thread.joinable()) http_->thread.join();
    return;
  }
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  std::vector<std::thread> workers;
  {
    std::lock_guard lock(workers_mu_);
    for (int fd : open_fds_) ::shutdown(fd, SHUT_RDWR);
    workers.swap(workers_);
  }
  for (auto& t : workers) t.join();
  if (addr_.kind == ListenAddress::Kind::Unix) ::unlink(addr_.path.c_str());
}

void Server::wait() {
  if (http_) {
    if (http_->thread.joinable()) http_->thread.join();
    return;
  }
  if (acceptor_.joinable()) acceptor_.join();
}

LineClient::LineClient(const ListenAddress& addr) : fd_(connect_to(addr)) {}

LineClient::~LineClient() {
  if (fd_ >= 0) ::close(fd_);
}

std::string LineClient::request(std::string_view line) {
  std::string msg(line);
  msg += '\n';
  if (!write_all(fd_, msg)) throw IoError(sys_error("send"));
  char chunk[4096];
  size_t nl;
  while ((nl = buffer_.find('\n')) == std::string::npos) {
    ssize_t n = ::recv(fd_, chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) throw IoError("connection closed before a response arrived");
    buffer_.append(chunk, static_cast<size_t>(n));
  }
  std::string out = buffer_.substr(0, nl);
  buffer_.erase(0, nl + 1);
  return out;
}

}  // namespace sqlgate
