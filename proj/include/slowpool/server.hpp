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

#ifndef SLOWPOOL_SERVER_HPP
#define SLOWPOOL_SERVER_HPP

#include <cstdint>
#include <set>
#include <string_view>

#include "slowpool/connection.hpp"
#include "slowpool/sim_time.hpp"

namespace slowpool {

/// Idle: a connection survives as long as it shows any data flow inside each
/// timeout span (the policy the slow-read pattern defeats). Absolute: a
/// connection is cut a fixed duration after it opened, flow or not.
enum class TimeoutPolicy { Idle, Absolute };

std::string_view to_string(TimeoutPolicy p);

struct ServerConfig {
  std::int64_t max_clients = 0;
  SimTime timeout{0};
  TimeoutPolicy timeout_policy = TimeoutPolicy::Idle;
  SimTime rtt{0};  // added per window refill
};

/// One failure-isolation zone: an independent pool bounded by max_clients.
struct Zone {
  std::int32_t id = 0;
  ServerConfig config;
  std::set<std::int64_t> pool;  // active connection ids, ordered for determinism

  bool has_free_slot() const {
    return static_cast<std::int64_t>(pool.size()) < config.max_clients;
  }
};

enum class AdmitOutcome { Admitted, RejectedFull };

struct AdmitResult {
  AdmitOutcome outcome;
  SimTime first_tick_at{0};  // valid when Admitted
};

struct DeliverResult {
  std::int64_t bytes = 0;
  bool completed = false;
  SimTime next_tick_at{0};  // valid when !completed
};

enum class CloseReason { Timeout, Mitigation, Complete };

std::string_view to_string(CloseReason r);

/// Time for the client to drain a chunk of `bytes` and open the window again.
/// Zero-byte chunks (empty responses) take no time.
SimTime chunk_read_time(std::int64_t bytes, std::int64_t read_rate, SimTime rtt);

/// Admits `conn` if the pool has a free slot: state -> Transferring, first
/// ReadTick due at the returned time. Otherwise state -> RejectedFull and the
/// pool is untouched. Rejection is an outcome, not an error.
AdmitResult try_admit(Zone& zone, Connection& conn, SimTime now);

/// Delivers the next window-limited chunk and either completes the transfer
/// or reports when the following ReadTick is due (after the client drains the
/// upcoming chunk and the window-update round trip). Throws
/// NotTransferringError outside the Transferring state.
DeliverResult deliver_chunk(Connection& conn, const ServerConfig& config, SimTime now);

/// Total transfer time at the client's pace: per-chunk read times (floored to
/// whole microseconds, matching event arithmetic) plus one rtt per window
/// refill. Throws BadParamError on zero window or rate.
SimTime drain_time(std::int64_t response_total, std::int64_t recv_window,
                   std::int64_t read_rate, SimTime rtt);

/// Idle: true iff now - last_progress_at >= timeout. Absolute: true iff
/// now - opened_at >= timeout. Boundaries are inclusive.
bool timeout_due(const Connection& conn, SimTime now, const ServerConfig& config);

/// Removes `conn` from the pool and applies the terminal state for `reason`.
/// Pending ReadTicks for the connection become no-ops at dispatch. Throws
/// NotInPoolError when the connection is not pooled (e.g. double close).
void close(Zone& zone, Connection& conn, CloseReason reason, SimTime now);

}  // namespace slowpool

#endif  // SLOWPOOL_SERVER_HPP
