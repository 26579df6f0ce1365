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

#ifndef SLOWPOOL_LOG_MODEL_HPP
#define SLOWPOOL_LOG_MODEL_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slowpool/defense.hpp"
#include "slowpool/event.hpp"
#include "slowpool/workload.hpp"

namespace slowpool {

/// Structured view of an event log, used by the metrics module and by tests
/// that recompute decisions from what was actually recorded.
struct ParsedLog {
  struct Deliver {
    SimTime at;
    std::int64_t bytes = 0;
    std::int64_t delivered = 0;
  };

  struct Close {
    SimTime at;
    std::string reason;  // complete | timeout | mitigation
    std::int32_t zone = -1;
    std::string group;  // mitigation only
  };

  struct Conn {
    ArrivalSpec spec;
    std::int64_t id = -1;
    std::optional<SimTime> admitted_at;
    std::int32_t zone = -1;
    bool rejected = false;
    std::vector<Deliver> delivers;
    std::optional<Close> close;
  };

  /// One zone's defense-visible snapshot at one analysis cycle.
  struct ViewSnapshot {
    SimTime at;
    std::int32_t zone = -1;
    std::vector<DefenseView> rows;
  };

  struct GroupRecord {
    SimTime at;
    std::int32_t zone = -1;
    std::string key;
    std::int64_t size = 0;
    bool dropped = false;
  };

  struct PoolSample {
    SimTime at;
    std::int32_t zone = -1;
    std::int64_t size = 0;
  };

  std::map<std::int64_t, Conn> conns;  // ordered by id
  std::vector<ViewSnapshot> views;
  std::vector<GroupRecord> groups;
  std::vector<PoolSample> pool_samples;  // after every admit/close
  std::vector<SimTime> armed_cycles;     // analysis cycles that actually ran
  SimTime end_at{0};
};

ParsedLog parse_log(const EventLog& log);

/// Rebuilds the arrival list recorded in a log, in original scheduling
/// order. Feeding it back through a fresh simulation with the same
/// configuration reproduces the log byte for byte.
std::vector<ArrivalSpec> extract_arrivals(const ParsedLog& log);

}  // namespace slowpool

#endif  // SLOWPOOL_LOG_MODEL_HPP
