#pragma once

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <cstring>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "aos/node/wire.hpp"

namespace aos::node {

struct HostPort {
  std::string host;
  std::string port;
};

inline HostPort split_address(const std::string& address) {
  const auto colon = address.rfind(':');
  if (colon == std::string::npos || colon == 0 || colon + 1 == address.size())
    throw Error(Errc::InvalidParameters, "address must be host:port, got " + address);
  return {address.substr(0, colon), address.substr(colon + 1)};
}

namespace detail {

inline bool read_exact(int fd, void* buf, std::size_t n) {
  auto* p = static_cast<char*>(buf);
  while (n > 0) {
    const ssize_t r = ::recv(fd, p, n, 0);
    if (r <= 0) {
      if (r < 0 && errno == EINTR) continue;
      return false;
    }
    p += r;
    n -= static_cast<std::size_t>(r);
  }
  return true;
}

inline bool write_all(int fd, std::string_view data) {
  while (!data.empty()) {
    const ssize_t w = ::send(fd, data.data(), data.size(), MSG_NOSIGNAL);
    if (w <= 0) {
      if (w < 0 && errno == EINTR) continue;
      return false;
    }
    data.remove_prefix(static_cast<std::size_t>(w));
  }
  return true;
}

/// nullopt on EOF or error; throws Malformed on an oversized length.
inline std::optional<std::string> read_frame(int fd) {
  unsigned char h[4];
  if (!read_exact(fd, h, 4)) return std::nullopt;
  const std::uint32_t len = decode_frame_length(h);
  if (len > kMaxFrameBytes) throw Error(Errc::Malformed, "frame of " + std::to_string(len) + " bytes");
  std::string payload(len, '\0');
  if (len > 0 && !read_exact(fd, payload.data(), len)) return std::nullopt;
  return payload;
}

inline int connect_to(const std::string& address) {
  const auto hp = split_address(address);
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* res = nullptr;
  if (::getaddrinfo(hp.host.c_str(), hp.port.c_str(), &hints, &res) != 0 || !res) return -1;
  int fd = -1;
  for (auto* ai = res; ai; ai = ai->ai_next) {
    fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) continue;
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) break;
    ::close(fd);
    fd = -1;
  }
  ::freeaddrinfo(res);
  if (fd >= 0) {
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  }
  return fd;
}

}  // namespace detail

/// One accepted socket. Replies are written from the consensus thread.
class Connection {
 public:
  explicit Connection(int fd) : fd_(fd) {}
  ~Connection() { ::close(fd_); }
  Connection(const Connection&) = delete;
  Connection& operator=(const Connection&) = delete;

  bool send_frame(std::string_view payload) {
    std::lock_guard lock(mu_);
    return detail::write_all(fd_, encode_frame(payload));
  }
  void shutdown() { ::shutdown(fd_, SHUT_RDWR); }
  int fd() const { return fd_; }

 private:
  int fd_;
  std::mutex mu_;
};

/// A decoded-or-not inbound frame. `error` is set when the frame was not JSON.
struct Inbound {
  json envelope;
  std::string error;
  std::shared_ptr<Connection> conn;
};

/// Ordered, bounded, multi-producer inbox drained by the consensus thread.
class Inbox {
 public:
  explicit Inbox(std::size_t cap = 100000) : cap_(cap) {}

  /// False when full; the caller logs the drop.
  bool push(Inbound item) {
    {
      std::lock_guard lock(mu_);
      if (items_.size() >= cap_) return false;
      items_.push_back(std::move(item));
    }
    cv_.notify_one();
    return true;
  }

  std::optional<Inbound> pop_for(std::chrono::milliseconds wait) {
    std::unique_lock lock(mu_);
    if (!cv_.wait_for(lock, wait, [&] { return !items_.empty(); })) return std::nullopt;
    Inbound item = std::move(items_.front());
    items_.pop_front();
    return item;
  }

 private:
  std::size_t cap_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Inbound> items_;
};

/// Accepts connections and runs one reader thread per connection.
class Listener {
 public:
  Listener(const std::string& address, Inbox& inbox) : inbox_(inbox) {
    const auto hp = split_address(address);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    if (::getaddrinfo(hp.host.c_str(), hp.port.c_str(), &hints, &res) != 0 || !res)
      throw Error(Errc::BindFailed, "cannot resolve " + address);
    fd_ = ::socket(res->ai_family, res->ai_socktype, res->ai_protocol);
    int one = 1;
    if (fd_ >= 0) ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    const bool ok = fd_ >= 0 && ::bind(fd_, res->ai_addr, res->ai_addrlen) == 0 && ::listen(fd_, 64) == 0;
    ::freeaddrinfo(res);
    if (!ok) {
      if (fd_ >= 0) ::close(fd_);
      throw Error(Errc::BindFailed, "cannot listen on " + address + ": " + std::strerror(errno));
    }
    accept_thread_ = std::thread([this] { accept_loop(); });
  }

  ~Listener() { stop(); }
  Listener(const Listener&) = delete;
  Listener& operator=(const Listener&) = delete;

  void stop() {
    if (stopped_.exchange(true)) return;
    ::shutdown(fd_, SHUT_RDWR);
    ::close(fd_);
    if (accept_thread_.joinable()) accept_thread_.join();
    std::vector<Reader> readers;
    {
      std::lock_guard lock(mu_);
      for (auto& r : readers_) r.conn->shutdown();
      readers.swap(readers_);
    }
    for (auto& r : readers) r.thread.join();
  }

 private:
  void accept_loop() {
    while (!stopped_) {
      pollfd p{fd_, POLLIN, 0};
      const int r = ::poll(&p, 1, 200);
      if (r <= 0) continue;
      const int cfd = ::accept(fd_, nullptr, nullptr);
      if (cfd < 0) continue;
      auto conn = std::make_shared<Connection>(cfd);
      std::lock_guard lock(mu_);
      if (stopped_) {
        conn->shutdown();
        continue;
      }
      reap();
      auto done = std::make_shared<std::atomic<bool>>(false);
      readers_.push_back(Reader{std::thread([this, conn, done] {
                                  read_loop(conn);
                                  *done = true;
                                }),
                                conn, done});
    }
  }

  /// Joins readers whose connection has closed. Caller holds mu_.
  void reap() {
    for (auto it = readers_.begin(); it != readers_.end();) {
      if (*it->done) {
        it->thread.join();
        it = readers_.erase(it);
      } else {
        ++it;
      }
    }
  }

  void read_loop(const std::shared_ptr<Connection>& conn) {
    while (!stopped_) {
      std::optional<std::string> frame;
      try {
        frame = detail::read_frame(conn->fd());
      } catch (const Error& e) {
        inbox_.push({json(), e.what(), conn});
        break;
      }
      if (!frame) break;
      Inbound item;
      item.conn = conn;
      try {
        item.envelope = json::parse(*frame);
      } catch (const json::exception& e) {
        item.error = std::string("Malformed: ") + e.what();
      }
      inbox_.push(std::move(item));
    }
  }

  Inbox& inbox_;
  int fd_ = -1;
  std::atomic<bool> stopped_{false};
  std::thread accept_thread_;
  struct Reader {
    std::thread thread;
    std::shared_ptr<Connection> conn;
    std::shared_ptr<std::atomic<bool>> done;
  };

  std::mutex mu_;
  std::vector<Reader> readers_;
};

/// Outbound queue and sender thread for one peer. Reconnects on failure;
/// frames that cannot be sent are dropped (agreement retransmits on timeout).
class PeerLink {
 public:
  explicit PeerLink(std::string address, std::size_t cap = 10000) : address_(std::move(address)), cap_(cap) {
    thread_ = std::thread([this] { run(); });
  }
  ~PeerLink() { stop(); }
  PeerLink(const PeerLink&) = delete;
  PeerLink& operator=(const PeerLink&) = delete;

  void enqueue(std::string payload) {
    {
      std::lock_guard lock(mu_);
      if (queue_.size() >= cap_) queue_.pop_front();
      queue_.push_back(std::move(payload));
    }
    cv_.notify_one();
  }

  void stop() {
    {
      std::lock_guard lock(mu_);
      if (stopped_) return;
      stopped_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
    if (fd_ >= 0) ::close(fd_);
  }

 private:
  void run() {
    while (true) {
      std::string payload;
      {
        std::unique_lock lock(mu_);
        cv_.wait(lock, [&] { return stopped_ || !queue_.empty(); });
        if (stopped_) return;
        payload = std::move(queue_.front());
        queue_.pop_front();
      }
      for (int attempt = 0; attempt < 2; ++attempt) {
        if (fd_ < 0) fd_ = detail::connect_to(address_);
        if (fd_ < 0) break;
        if (detail::write_all(fd_, encode_frame(payload))) break;
        ::close(fd_);
        fd_ = -1;
      }
      if (fd_ < 0) {
        // Peer down: back off briefly so a dead peer does not spin the thread.
        std::unique_lock lock(mu_);
        cv_.wait_for(lock, std::chrono::milliseconds(100), [&] { return stopped_; });
      }
    }
  }

  std::string address_;
  std::size_t cap_;
  int fd_ = -1;
  std::thread thread_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<std::string> queue_;
  bool stopped_ = false;
};

/// Listener plus one link per peer.
class Transport {
 public:
  Transport(const std::string& listen_address, const std::map<std::uint32_t, std::string>& peers, Inbox& inbox)
      : listener_(listen_address, inbox) {
    for (const auto& [id, addr] : peers) links_.emplace(id, std::make_unique<PeerLink>(addr));
  }

  void send(std::uint32_t to, const std::string& payload) {
    if (auto it = links_.find(to); it != links_.end()) it->second->enqueue(payload);
  }
  void broadcast(const std::string& payload) {
    for (auto& [id, link] : links_) link->enqueue(payload);
  }
  void stop() {
    listener_.stop();
    for (auto& [id, link] : links_) link->stop();
  }

 private:
  Listener listener_;
  std::map<std::uint32_t, std::unique_ptr<PeerLink>> links_;
};

/// Client side of submit-tx: one request, one reply.
inline json request(const std::string& address, const json& envelope, std::chrono::milliseconds timeout) {
  const int fd = detail::connect_to(address);
  if (fd < 0) throw Error(Errc::Io, "cannot connect to " + address);
  timeval tv{static_cast<time_t>(timeout.count() / 1000), static_cast<suseconds_t>((timeout.count() % 1000) * 1000)};
  ::setsockopt(fd, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv);
  const bool sent = detail::write_all(fd, encode_frame(envelope.dump()));
  std::optional<std::string> reply;
  if (sent) reply = detail::read_frame(fd);
  ::close(fd);
  if (!reply) throw Error(Errc::Io, "no reply from " + address);
  try {
    return json::parse(*reply);
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, e.what());
  }
}

}  // namespace aos::node
