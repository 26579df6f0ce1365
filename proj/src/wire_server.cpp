/*
 * Copyright 2026 The slowpool authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <arpa/inet.h>
#include <fcntl.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstring>
#include <list>
#include <ostream>
#include <vector>

#include "slowpool/errors.hpp"
#include "slowpool/wire.hpp"

namespace slowpool::wire {

namespace {

using Clock = std::chrono::steady_clock;

double now_sec() {
  return std::chrono::duration<double>(Clock::now().time_since_epoch()).count();
}

std::int64_t unix_millis() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(
             std::chrono::system_clock::now().time_since_epoch())
      .count();
}

void set_nonblocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

constexpr const char kRefusal[] =
    "HTTP/1.0 503 Service Unavailable\r\nContent-Length: 0\r\nConnection: close\r\n\r\n";

struct Served {
  int fd = -1;
  std::string request;        // accumulated until the blank line
  bool writing = false;       // request complete, response in flight
  std::size_t sent = 0;       // offset into the shared response
  double last_progress = 0.0;  // wall seconds of last write progress (or accept)
};

}  // namespace

ServeStats serve(const ServeConfig& cfg, std::atomic<bool>* stop, std::ostream& stats_out,
                 std::atomic<std::uint16_t>* bound_port) {
  enforce_loopback(cfg.host, cfg.allow_nonloopback);

  const int listener = socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw BindError("socket: " + std::string(std::strerror(errno)));

  const int one = 1;
  setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);

  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(cfg.port);
  const std::string bind_host = cfg.host == "localhost" ? "127.0.0.1" : cfg.host;
  if (inet_pton(AF_INET, bind_host.c_str(), &addr.sin_addr) != 1) {
    ::close(listener);
    throw BindError("bad listen address: " + cfg.host);
  }
  if (bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(listener);
    throw BindError("bind " + cfg.host + ":" + std::to_string(cfg.port) + ": " + reason);
  }
  if (listen(listener, 128) != 0) {
    const std::string reason = std::strerror(errno);
    ::close(listener);
    throw BindError("listen: " + reason);
  }
  set_nonblocking(listener);

  socklen_t addr_len = sizeof addr;
  getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &addr_len);
  const std::uint16_t port = ntohs(addr.sin_port);
  if (bound_port != nullptr) bound_port->store(port);

  std::string response = "HTTP/1.0 200 OK\r\nContent-Length: " + std::to_string(cfg.body_bytes) +
                         "\r\nConnection: close\r\n\r\n";
  response.append(static_cast<std::size_t>(cfg.body_bytes), 'x');

  ServeStats stats;
  stats.port = port;

  stats_out << "listening ts=" << unix_millis() << " port=" << port << "\n" << std::flush;

  std::list<Served> conns;
  const double start = now_sec();
  double next_stats = start + 1.0;

  auto emit_stats = [&] {
    stats_out << "ts=" << unix_millis() << " open=" << conns.size()
              << " accepted_total=" << stats.accepted_total
              << " refused_total=" << stats.refused_total
              << " timeouts_total=" << stats.timeouts_total << "\n"
              << std::flush;
  };

  std::vector<pollfd> fds;
  while (true) {
    if (stop != nullptr && stop->load()) break;
    if (cfg.max_runtime_sec > 0.0 && now_sec() - start >= cfg.max_runtime_sec) break;

    fds.clear();
    fds.push_back(pollfd{listener, POLLIN, 0});
    for (const Served& c : conns) {
      short events = POLLRDHUP;
      if (c.writing) {
        events |= POLLOUT;
      } else {
        events |= POLLIN;
      }
      fds.push_back(pollfd{c.fd, events, 0});
    }

    poll(fds.data(), fds.size(), 200);
    const double now = now_sec();

    // Accept everything pending; over-capacity connections get the refusal
    // line and an immediate close so they never count as open.
    if (fds[0].revents & POLLIN) {
      while (true) {
        const int fd = accept(listener, nullptr, nullptr);
        if (fd < 0) break;
        if (static_cast<int>(conns.size()) >= cfg.max_clients) {
          set_nonblocking(fd);
          [[maybe_unused]] ssize_t n = ::write(fd, kRefusal, sizeof kRefusal - 1);
          ::close(fd);
          ++stats.refused_total;
          continue;
        }
        set_nonblocking(fd);
        setsockopt(fd, SOL_SOCKET, SO_SNDBUF, &cfg.send_buffer_bytes,
                   sizeof cfg.send_buffer_bytes);
        Served c;
        c.fd = fd;
        c.last_progress = now;
        conns.push_back(c);
        ++stats.accepted_total;
        stats.max_open = std::max(stats.max_open, static_cast<std::int64_t>(conns.size()));
      }
    }

    std::size_t index = 1;
    for (auto it = conns.begin(); it != conns.end(); ++index) {
      Served& c = *it;
      const short revents = index < fds.size() && fds[index].fd == c.fd ? fds[index].revents : 0;
      bool dead = false;

      if (revents & (POLLERR | POLLHUP | POLLRDHUP)) {
        dead = true;
      }

      if (!dead && !c.writing && (revents & POLLIN)) {
        char buf[4096];
        const ssize_t n = ::read(c.fd, buf, sizeof buf);
        if (n == 0) {
          dead = true;
        } else if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
          dead = true;
        } else if (n > 0) {
          c.request.append(buf, static_cast<std::size_t>(n));
          if (c.request.size() > 8192) {
            dead = true;  // oversized request
          } else if (c.request.find("\r\n\r\n") != std::string::npos) {
            c.writing = true;
          }
        }
      }

      if (!dead && c.writing && c.sent < response.size()) {
        // Opportunistic write until EAGAIN; POLLOUT readiness is coarse with
        // a small send buffer, and a failed attempt costs nothing. A fast
        // reader drains the whole body in one round this way.
        while (c.sent < response.size()) {
          const std::size_t chunk = std::min<std::size_t>(65536, response.size() - c.sent);
          const ssize_t n = ::write(c.fd, response.data() + c.sent, chunk);
          if (n > 0) {
            c.sent += static_cast<std::size_t>(n);
            c.last_progress = now;
          } else {
            if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) dead = true;
            break;
          }
        }
        if (!dead && c.sent == response.size()) {
          ++stats.completed_total;
          ::close(c.fd);
          it = conns.erase(it);
          continue;
        }
      }

      if (!dead && now - c.last_progress >= cfg.idle_timeout_sec) {
        ++stats.timeouts_total;
        dead = true;
      }

      if (dead) {
        ::close(c.fd);
        it = conns.erase(it);
      } else {
        ++it;
      }
    }

    if (now >= next_stats) {
      emit_stats();
      next_stats += 1.0;
    }
  }

  emit_stats();
  for (const Served& c : conns) ::close(c.fd);
  ::close(listener);
  return stats;
}

}  // namespace slowpool::wire
