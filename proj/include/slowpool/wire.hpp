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

#ifndef SLOWPOOL_WIRE_HPP
#define SLOWPOOL_WIRE_HPP

#include <atomic>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace slowpool::wire {

// Loopback-only by default: this is a testbed, not an attack tool. Every
// operation validates its peer address before any socket is created and
// refuses non-loopback targets unless the loudly-named override is set.

/// True for 127.0.0.0/8 dotted-quad addresses and the literal "localhost".
bool is_loopback_host(const std::string& host);

/// Throws NonLoopbackRefusedError unless host is loopback or the override is
/// set. Called before any socket exists.
void enforce_loopback(const std::string& host, bool allow_nonloopback);

struct ServeConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;  // 0 picks an ephemeral port; printed on startup
  int max_clients = 50;
  double idle_timeout_sec = 10.0;  // close after this long without write progress
  std::int64_t body_bytes = 256 * 1024;
  // Small server-side send buffer so a large body cannot be absorbed by the
  // kernel in one gulp; a held slow reader then really pins the slot.
  int send_buffer_bytes = 16 * 1024;
  double max_runtime_sec = 0.0;  // 0 = run until stopped
  bool allow_nonloopback = false;
};

struct ServeStats {
  std::uint16_t port = 0;
  std::int64_t accepted_total = 0;
  std::int64_t refused_total = 0;
  std::int64_t timeouts_total = 0;
  std::int64_t completed_total = 0;
  std::int64_t max_open = 0;
};

/// Minimal HTTP/1.0 server: one request per connection, fixed body, at most
/// max_clients concurrently served connections (excess accepts get an
/// immediate 503 and close), idle-timeout on write progress. Emits one
/// machine-readable stats line per second on stats_out:
///   ts=<unix_ms> open=<n> accepted_total=<n> refused_total=<n> timeouts_total=<n>
/// Blocks until `stop` is set, max_runtime_sec elapses, or a fatal error.
/// `bound_port`, when non-null, receives the actual listening port as soon as
/// the socket is bound (for ephemeral-port callers on another thread).
/// Throws BindError / NonLoopbackRefusedError.
ServeStats serve(const ServeConfig& cfg, std::atomic<bool>* stop, std::ostream& stats_out,
                 std::atomic<std::uint16_t>* bound_port = nullptr);

struct AttackConfig {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  int count = 0;
  int recv_buffer_bytes = 1024;  // set before connect so the SYN advertises it
  std::int64_t read_rate_bps = 64;
  double hold_sec = 20.0;
  bool allow_nonloopback = false;
};

struct AttackSummary {
  std::int64_t opened = 0;          // received a 200 response start
  std::int64_t refused = 0;         // 503, reset, or closed before serving
  std::int64_t connect_failed = 0;  // TCP connect error
  std::int64_t alive_at_end = 0;    // still served when the hold expired
  std::int64_t bytes_read = 0;
  std::vector<double> per_conn_read_rate_bps;  // over the hold window
};

/// Opens `count` connections, shrinks each socket's receive buffer, sends a
/// valid request, then drains the response in small reads paced to
/// read_rate_bps until hold_sec elapses. The effective advertised TCP window
/// stays tiny, which is the portable stand-in for directly manipulating the
/// window value.
AttackSummary slow_read_attack(const AttackConfig& cfg);

enum class ProbeOutcome { Ok, Refused, Timeout };

struct ProbeResult {
  ProbeOutcome outcome = ProbeOutcome::Timeout;
  double latency_ms = 0.0;
};

/// Single fast request with a 2 second deadline; the availability sensor.
/// ok = full response received; refused = 503 / connection refused / reset;
/// timeout = deadline hit first.
ProbeResult probe(const std::string& host, std::uint16_t port, bool allow_nonloopback = false);

std::string to_json(const AttackSummary& summary);
std::string to_json(const ProbeResult& result);

}  // namespace slowpool::wire

#endif  // SLOWPOOL_WIRE_HPP
