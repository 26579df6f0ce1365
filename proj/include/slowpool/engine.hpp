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

#ifndef SLOWPOOL_ENGINE_HPP
#define SLOWPOOL_ENGINE_HPP

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "slowpool/event.hpp"
#include "slowpool/sim_time.hpp"

namespace slowpool {

/// Deterministic discrete-event engine. Single-threaded by contract: the
/// engine and every handler run on one logical thread, and engines share no
/// state, so whole scenarios may run in parallel with each other.
///
/// Dispatch order is exactly lexicographic (at, seq). Each dispatched event
/// is logged before its handler runs; handlers append their own transition
/// entries through log() using current_seq().
class Engine {
 public:
  using Handler = std::function<void(const Event&)>;

  SimTime now() const { return now_; }

  /// Enqueues `event` and assigns it the next sequence number.
  /// Throws PastEventError if event.at < now().
  std::uint64_t schedule(Event event);

  void set_handler(Handler handler) { handler_ = std::move(handler); }

  /// Dispatches events in (at, seq) order until the queue is empty, the next
  /// event lies beyond `until`, or a handler calls request_stop(). An empty
  /// queue terminates normally with now() unchanged.
  const EventLog& run(SimTime until);

  /// Stops the run loop after the current handler returns.
  void request_stop() { stop_requested_ = true; }

  EventLog& log() { return log_; }
  const EventLog& log() const { return log_; }

  /// Sequence number of the event currently being dispatched; transition
  /// entries appended by handlers carry it so the log stays totally ordered.
  std::uint64_t current_seq() const { return current_seq_; }

 private:
  struct Later {
    bool operator()(const Event& a, const Event& b) const {
      if (a.at != b.at) return a.at > b.at;
      return a.seq > b.seq;
    }
  };

  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  SimTime now_{0};
  std::uint64_t next_seq_ = 0;
  std::uint64_t current_seq_ = 0;
  bool stop_requested_ = false;
  Handler handler_;
  EventLog log_;
};

}  // namespace slowpool

#endif  // SLOWPOOL_ENGINE_HPP
