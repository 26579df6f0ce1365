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

#include "slowpool/server.hpp"

#include <algorithm>
#include <cassert>

#include "slowpool/errors.hpp"

namespace slowpool {

std::string_view to_string(ConnState s) {
  switch (s) {
    case ConnState::Pending: return "pending";
    case ConnState::Transferring: return "transferring";
    case ConnState::Complete: return "complete";
    case ConnState::DroppedTimeout: return "dropped_timeout";
    case ConnState::DroppedMitigation: return "dropped_mitigation";
    case ConnState::RejectedFull: return "rejected_full";
  }
  return "unknown";
}

std::string_view to_string(TruthLabel label) {
  return label == TruthLabel::Attack ? "attack" : "legit";
}

std::string_view to_string(TimeoutPolicy p) {
  return p == TimeoutPolicy::Idle ? "idle" : "absolute";
}

std::string_view to_string(CloseReason r) {
  switch (r) {
    case CloseReason::Timeout: return "timeout";
    case CloseReason::Mitigation: return "mitigation";
    case CloseReason::Complete: return "complete";
  }
  return "unknown";
}

SimTime chunk_read_time(std::int64_t bytes, std::int64_t read_rate, SimTime rtt) {
  if (bytes == 0) return SimTime{0};
  return micros(bytes * 1'000'000 / read_rate) + rtt;
}

AdmitResult try_admit(Zone& zone, Connection& conn, SimTime now) {
  assert(conn.state == ConnState::Pending);
  if (!zone.has_free_slot()) {
    conn.state = ConnState::RejectedFull;
    conn.closed_at = now;
    return {AdmitOutcome::RejectedFull, {}};
  }
  zone.pool.insert(conn.id);
  conn.zone_id = zone.id;
  conn.state = ConnState::Transferring;
  conn.opened_at = now;
  conn.last_progress_at = now;
  const std::int64_t first_chunk = std::min(conn.recv_window, conn.response_total);
  return {AdmitOutcome::Admitted,
          now + chunk_read_time(first_chunk, conn.read_rate, zone.config.rtt)};
}

DeliverResult deliver_chunk(Connection& conn, const ServerConfig& config, SimTime now) {
  if (conn.state != ConnState::Transferring) {
    throw NotTransferringError("deliver_chunk: connection " + std::to_string(conn.id) +
                               " is " + std::string(to_string(conn.state)));
  }
  const std::int64_t bytes = std::min(conn.recv_window, conn.response_total - conn.delivered);
  conn.delivered += bytes;
  conn.last_progress_at = now;

  DeliverResult result;
  result.bytes = bytes;
  if (conn.delivered == conn.response_total) {
    conn.state = ConnState::Complete;
    result.completed = true;
  } else {
    const std::int64_t next_chunk =
        std::min(conn.recv_window, conn.response_total - conn.delivered);
    result.next_tick_at = now + chunk_read_time(next_chunk, conn.read_rate, config.rtt);
  }
  return result;
}

SimTime drain_time(std::int64_t response_total, std::int64_t recv_window,
                   std::int64_t read_rate, SimTime rtt) {
  if (recv_window <= 0 || read_rate <= 0) {
    throw BadParamError("drain_time: window and rate must be positive");
  }
  if (response_total == 0) return SimTime{0};
  const std::int64_t full_chunks = response_total / recv_window;
  const std::int64_t tail = response_total % recv_window;
  SimTime total{full_chunks * chunk_read_time(recv_window, read_rate, rtt).micros};
  if (tail > 0) total += chunk_read_time(tail, read_rate, rtt);
  return total;
}

bool timeout_due(const Connection& conn, SimTime now, const ServerConfig& config) {
  assert(conn.state == ConnState::Transferring);
  const SimTime reference = config.timeout_policy == TimeoutPolicy::Idle
                                ? conn.last_progress_at
                                : conn.opened_at;
  return now - reference >= config.timeout;
}

void close(Zone& zone, Connection& conn, CloseReason reason, SimTime now) {
  if (zone.pool.erase(conn.id) == 0) {
    throw NotInPoolError("close: connection " + std::to_string(conn.id) + " not in zone " +
                         std::to_string(zone.id));
  }
  switch (reason) {
    case CloseReason::Timeout: conn.state = ConnState::DroppedTimeout; break;
    case CloseReason::Mitigation: conn.state = ConnState::DroppedMitigation; break;
    case CloseReason::Complete:
      assert(conn.state == ConnState::Complete);
      break;
  }
  conn.closed_at = now;
}

}  // namespace slowpool
