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

#ifndef SLOWPOOL_CONNECTION_HPP
#define SLOWPOOL_CONNECTION_HPP

#include <cstdint>
#include <optional>
#include <string_view>

#include "slowpool/ip.hpp"
#include "slowpool/sim_time.hpp"

namespace slowpool {

enum class ConnState {
  Pending,
  Transferring,
  Complete,
  DroppedTimeout,
  DroppedMitigation,
  RejectedFull,
};

std::string_view to_string(ConnState s);

/// Ground-truth class of a connection. Used exclusively for scoring; the
/// defense never sees it (DefenseView carries no label field).
enum class TruthLabel { Legit, Attack };

std::string_view to_string(TruthLabel label);

/// One client<->server connection. The client's advertised receive window and
/// read rate drive the transfer entirely: the server is modeled as always
/// ready to fill the window, so a tiny window plus a slow read pins a pool
/// slot with a trickle of progress.
struct Connection {
  std::int64_t id = -1;
  IpAddr src_ip;
  std::int32_t zone_id = -1;
  ConnState state = ConnState::Pending;
  std::int64_t response_total = 0;  // bytes
  std::int64_t delivered = 0;       // bytes, 0 <= delivered <= response_total
  std::int64_t recv_window = 0;     // bytes per chunk
  std::int64_t read_rate = 0;       // bytes per second
  SimTime arrival{0};
  SimTime opened_at{0};
  SimTime last_progress_at{0};
  std::optional<SimTime> closed_at;
  std::uint32_t timeout_gen = 0;  // bumped on progress; stale checks no-op
  TruthLabel truth = TruthLabel::Legit;
  bool is_probe = false;

  bool terminal() const {
    return state == ConnState::Complete || state == ConnState::DroppedTimeout ||
           state == ConnState::DroppedMitigation || state == ConnState::RejectedFull;
  }
};

}  // namespace slowpool

#endif  // SLOWPOOL_CONNECTION_HPP
