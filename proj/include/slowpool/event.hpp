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

#ifndef SLOWPOOL_EVENT_HPP
#define SLOWPOOL_EVENT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "slowpool/sim_time.hpp"

namespace slowpool {

enum class EventKind {
  ConnectAttempt,
  ReadTick,
  TimeoutCheck,
  AnalysisCycle,
  TransferComplete,
  ScenarioEnd,
};

std::string_view to_string(EventKind kind);

/// One scheduled occurrence. (at, seq) is a strict total order over all
/// events ever scheduled in an engine; seq is assigned at schedule time, so
/// simultaneous events dispatch in scheduling order.
struct Event {
  SimTime at;
  std::uint64_t seq = 0;  // assigned by Engine::schedule
  EventKind kind = EventKind::ScenarioEnd;
  std::int64_t conn_id = -1;
  std::int32_t zone_id = -1;
  std::uint32_t generation = 0;  // staleness marker for TimeoutCheck
};

/// The run artifact: every dispatched event plus every state transition the
/// handlers choose to record, in dispatch order. Serializes to the
/// line-oriented form `<micros>\t<seq>\t<kind>\t<payload>` which is hashed
/// for determinism fingerprints.
class EventLog {
 public:
  struct Entry {
    SimTime at;
    std::uint64_t seq;
    std::string kind;
    std::string payload;
  };

  void append(SimTime at, std::uint64_t seq, std::string kind, std::string payload);
  const std::vector<Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }

  void serialize(std::ostream& out) const;
  std::string serialize() const;

 private:
  std::vector<Entry> entries_;
};

}  // namespace slowpool

#endif  // SLOWPOOL_EVENT_HPP
