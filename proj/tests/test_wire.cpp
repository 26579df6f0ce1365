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

#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <sstream>
#include <thread>

#include "slowpool/errors.hpp"
#include "slowpool/wire.hpp"

using namespace slowpool;

namespace {

/// Runs the wire server on an ephemeral port in a background thread and
/// tears it down on destruction.
struct ServerFixture {
  std::atomic<bool> stop{false};
  std::atomic<std::uint16_t> bound{0};
  std::ostringstream stats;
  std::thread thread;
  std::uint16_t port = 0;
  wire::ServeStats result;

  explicit ServerFixture(wire::ServeConfig cfg) {
    thread = std::thread([this, cfg] { result = wire::serve(cfg, &stop, stats, &bound); });
    for (int i = 0; i < 300 && port == 0; ++i) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
      port = bound.load();
    }
  }

  ~ServerFixture() {
    stop.store(true);
    if (thread.joinable()) thread.join();
  }
};

}  // namespace

TEST_CASE("loopback detection covers the whole 127/8 block and nothing else") {
  CHECK(wire::is_loopback_host("127.0.0.1"));
  CHECK(wire::is_loopback_host("127.200.9.10"));
  CHECK(wire::is_loopback_host("localhost"));
  CHECK_FALSE(wire::is_loopback_host("192.0.2.1"));
  CHECK_FALSE(wire::is_loopback_host("128.0.0.1"));
  CHECK_FALSE(wire::is_loopback_host("not-a-host"));
}

TEST_CASE("every wire operation refuses non-loopback targets before touching the network") {
  CHECK_THROWS_AS(wire::enforce_loopback("192.0.2.1", false), NonLoopbackRefusedError);
  CHECK_NOTHROW(wire::enforce_loopback("192.0.2.1", true));
  CHECK_NOTHROW(wire::enforce_loopback("127.0.0.1", false));

  wire::AttackConfig attack;
  attack.host = "192.0.2.1";
  attack.port = 80;
  attack.count = 1;
  CHECK_THROWS_AS(wire::slow_read_attack(attack), NonLoopbackRefusedError);

  CHECK_THROWS_AS(wire::probe("192.0.2.1", 80), NonLoopbackRefusedError);

  wire::ServeConfig serve_cfg;
  serve_cfg.host = "192.0.2.1";
  std::atomic<bool> stop{false};
  std::ostringstream sink;
  CHECK_THROWS_AS(wire::serve(serve_cfg, &stop, sink), NonLoopbackRefusedError);
}

TEST_CASE("probing an unreachable port reports refused") {
  const wire::ProbeResult result = wire::probe("127.0.0.1", 9);  // discard port, surely closed
  CHECK(result.outcome == wire::ProbeOutcome::Refused);
}

TEST_CASE("an empty attack returns an all-zero summary without touching the network") {
  wire::AttackConfig cfg;
  cfg.port = 1;  // nothing is contacted
  cfg.count = 0;
  const wire::AttackSummary summary = wire::slow_read_attack(cfg);
  CHECK(summary.opened == 0);
  CHECK(summary.refused == 0);
  CHECK(summary.connect_failed == 0);
  CHECK(summary.alive_at_end == 0);
  CHECK(summary.bytes_read == 0);
  CHECK(summary.per_conn_read_rate_bps.empty());
}

TEST_CASE("summaries serialize as single json lines") {
  wire::AttackSummary summary;
  summary.opened = 50;
  summary.refused = 10;
  summary.alive_at_end = 50;
  summary.bytes_read = 63900;
  const std::string json = wire::to_json(summary);
  CHECK(json ==
        "{\"opened\":50,\"refused\":10,\"connect_failed\":0,\"alive_at_end\":50,"
        "\"bytes_read\":63900}");
  CHECK(json.find('\n') == std::string::npos);

  wire::ProbeResult probe;
  probe.outcome = wire::ProbeOutcome::Timeout;
  probe.latency_ms = 2000.125;
  CHECK(wire::to_json(probe) == "{\"outcome\":\"timeout\",\"latency_ms\":2000.125}");
}

TEST_CASE("binding an occupied port raises BindError") {
  const int holder = socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(holder >= 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = 0;
  inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  REQUIRE(bind(holder, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  REQUIRE(listen(holder, 1) == 0);
  socklen_t len = sizeof addr;
  getsockname(holder, reinterpret_cast<sockaddr*>(&addr), &len);

  wire::ServeConfig cfg;
  cfg.port = ntohs(addr.sin_port);
  std::atomic<bool> stop{false};
  std::ostringstream sink;
  CHECK_THROWS_AS(wire::serve(cfg, &stop, sink), BindError);
  ::close(holder);
}

TEST_CASE("a probe against an unsaturated server receives the full body") {
  wire::ServeConfig cfg;
  cfg.max_clients = 5;
  cfg.body_bytes = 64 * 1024;
  ServerFixture server(cfg);
  REQUIRE(server.port != 0);

  const wire::ProbeResult result = wire::probe("127.0.0.1", server.port);
  CHECK(result.outcome == wire::ProbeOutcome::Ok);
  CHECK(result.latency_ms < 2000.0);
}

TEST_CASE("capacity is enforced at smoke scale and held slots refuse probes") {
  wire::ServeConfig cfg;
  cfg.max_clients = 2;
  cfg.body_bytes = 128 * 1024;
  cfg.idle_timeout_sec = 8.0;
  cfg.send_buffer_bytes = 8 * 1024;
  ServerFixture server(cfg);
  REQUIRE(server.port != 0);

  wire::AttackConfig attack;
  attack.port = server.port;
  attack.count = 3;
  attack.recv_buffer_bytes = 1024;
  attack.read_rate_bps = 64;
  attack.hold_sec = 3.0;

  wire::AttackSummary summary;
  std::thread attacker([&] { summary = wire::slow_read_attack(attack); });
  std::this_thread::sleep_for(std::chrono::milliseconds(1500));

  const wire::ProbeResult during = wire::probe("127.0.0.1", server.port);
  CHECK(during.outcome != wire::ProbeOutcome::Ok);

  attacker.join();
  CHECK(summary.opened == 2);
  CHECK(summary.refused == 1);
  CHECK(summary.alive_at_end == 2);

  // Paced reads stay within +/-50% of the configured rate.
  for (const double rate : summary.per_conn_read_rate_bps) {
    CHECK(rate > 32.0);
    CHECK(rate < 96.0);
  }

  // After release the pool frees up quickly.
  wire::ProbeResult after{};
  for (int i = 0; i < 10; ++i) {
    after = wire::probe("127.0.0.1", server.port);
    if (after.outcome == wire::ProbeOutcome::Ok) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(300));
  }
  CHECK(after.outcome == wire::ProbeOutcome::Ok);
}

TEST_CASE("idle connections are closed by the write-progress timeout") {
  wire::ServeConfig cfg;
  cfg.max_clients = 4;
  cfg.body_bytes = 512 * 1024;
  cfg.idle_timeout_sec = 1.0;
  cfg.send_buffer_bytes = 4 * 1024;
  ServerFixture server(cfg);
  REQUIRE(server.port != 0);

  // Connect, send a request, then never read: the server's send buffer jams
  // and write progress stops, so the idle timeout must fire.
  const int fd = socket(AF_INET, SOCK_STREAM, 0);
  REQUIRE(fd >= 0);
  const int tiny = 1024;
  setsockopt(fd, SOL_SOCKET, SO_RCVBUF, &tiny, sizeof tiny);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(server.port);
  inet_pton(AF_INET, "127.0.0.1", &addr.sin_addr);
  REQUIRE(connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  const char request[] = "GET / HTTP/1.0\r\n\r\n";
  REQUIRE(write(fd, request, sizeof request - 1) > 0);

  std::this_thread::sleep_for(std::chrono::milliseconds(2600));
  server.stop.store(true);
  server.thread.join();
  CHECK(server.result.timeouts_total >= 1);
  ::close(fd);
}
