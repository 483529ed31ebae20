#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "psolab/errors.hpp"
#include "psolab/service.hpp"

namespace psolab {

namespace {

constexpr std::size_t kMaxLine = 1 << 20;

std::string errno_text() { return std::strerror(errno); }

}  // namespace

struct Server::Connection {
  int fd = -1;
  std::mutex write_mutex;
  std::atomic<bool> closed{false};
  std::atomic<bool> done{false};
  std::thread thread;

  // Whole-line write; false once the peer is gone.
  bool send_line(const std::string& line) {
    std::lock_guard lock(write_mutex);
    if (closed) return false;
    std::string out = line;
    out.push_back('\n');
    std::size_t sent = 0;
    while (sent < out.size()) {
      const ssize_t n = ::send(fd, out.data() + sent, out.size() - sent, MSG_NOSIGNAL);
      if (n < 0 && errno == EINTR) continue;
      if (n <= 0) {
        closed = true;
        return false;
      }
      sent += static_cast<std::size_t>(n);
    }
    return true;
  }

  void shutdown() {
    closed = true;
    ::shutdown(fd, SHUT_RDWR);
  }
};

Server::Server(ServeOptions options) : options_(std::move(options)) {
  if (options_.sample_interval.count() <= 0) throw ConfigError("sample interval must be positive");

  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  hints.ai_flags = AI_PASSIVE | AI_NUMERICSERV;
  addrinfo* found = nullptr;
  const std::string port = std::to_string(options_.port);
  if (const int rc = ::getaddrinfo(options_.host.c_str(), port.c_str(), &hints, &found); rc != 0)
    throw IoError("cannot resolve " + options_.host + ": " + ::gai_strerror(rc));

  std::string last_error = "no usable address";
  for (addrinfo* ai = found; ai; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    const int yes = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof yes);
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 16) == 0) {
      listen_fd_ = fd;
      break;
    }
    last_error = errno_text();
    ::close(fd);
  }
  ::freeaddrinfo(found);
  if (listen_fd_ < 0)
    throw IoError("cannot listen on " + options_.host + ":" + port + ": " + last_error);

  sockaddr_storage bound{};
  socklen_t len = sizeof bound;
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&bound), &len);
  port_ = bound.ss_family == AF_INET6
              ? ntohs(reinterpret_cast<sockaddr_in6*>(&bound)->sin6_port)
              : ntohs(reinterpret_cast<sockaddr_in*>(&bound)->sin_port);
}

Server::~Server() {
  stop();
  std::vector<std::shared_ptr<Connection>> conns;
  {
    std::lock_guard lock(connections_mutex_);
    conns.swap(connections_);
  }
  for (auto& c : conns) {
    c->shutdown();
    if (c->thread.joinable()) c->thread.join();
    ::close(c->fd);
  }
  if (listen_fd_ >= 0) ::close(listen_fd_);
}

void Server::stop() {
  if (stopping_.exchange(true)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  std::lock_guard lock(connections_mutex_);
  for (auto& c : connections_) c->shutdown();
}

void Server::run() {
  while (!stopping_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR || errno == ECONNABORTED) continue;
      break;
    }
    const int yes = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &yes, sizeof yes);

    auto conn = std::make_shared<Connection>();
    conn->fd = fd;
    std::lock_guard lock(connections_mutex_);
    // Reap finished connections so a long-lived server does not accumulate them.
    std::erase_if(connections_, [](const std::shared_ptr<Connection>& c) {
      if (!c->done) return false;
      c->thread.join();
      ::close(c->fd);
      return true;
    });
    if (stopping_) {
      ::close(fd);
      break;
    }
    conn->thread = std::thread([this, conn] { handle(conn); });
    connections_.push_back(conn);
  }
}

void Server::handle(const std::shared_ptr<Connection>& conn) {
  Session session(options_.session);
  std::atomic<bool> reading{true};

  // Sampler: streams the latest snapshot while a swarm is live, plus one
  // final copy whenever something new was published.
  std::thread sampler([&] {
    std::uint64_t sent_version = 0;
    while (reading && !conn->closed) {
      std::this_thread::sleep_for(options_.sample_interval);
      const auto snap = session.snapshot();
      if (!snap) continue;
      const std::uint64_t version = session.snapshot_version();
      const bool live = snap->state == SessionState::Running || snap->state == SessionState::Paused;
      if (!live && version == sent_version) continue;
      sent_version = version;
      if (!conn->send_line(encode_snapshot(*snap))) break;
    }
  });

  std::string buffer;
  char chunk[4096];
  while (!conn->closed) {
    const ssize_t n = ::recv(conn->fd, chunk, sizeof chunk, 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));

    std::size_t start = 0;
    for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
      std::string_view line(buffer.data() + start, nl - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (line.find_first_not_of(" \t") == std::string_view::npos) continue;
      const auto id = extract_id(line);
      std::string reply;
      try {
        reply = encode_reply(session.apply(parse_command(line)), id);
      } catch (const ProtocolError& e) {
        reply = encode_error("bad_request", e.what(), session.state(), id);
      } catch (const ConfigError& e) {
        reply = encode_error("config", e.what(), session.state(), id);
      } catch (const std::exception& e) {
        reply = encode_error("internal", e.what(), session.state(), id);
      }
      conn->send_line(reply);
    }
    buffer.erase(0, start);
    if (buffer.size() > kMaxLine) {
      conn->send_line(encode_error("bad_request", "line too long", session.state()));
      break;
    }
  }

  reading = false;
  conn->shutdown();
  sampler.join();
  conn->done = true;
}

}  // namespace psolab
