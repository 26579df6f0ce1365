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

#ifndef SLOWPOOL_DEFENSE_HPP
#define SLOWPOOL_DEFENSE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "slowpool/connection.hpp"
#include "slowpool/provider_map.hpp"
#include "slowpool/server.hpp"
#include "slowpool/sim_time.hpp"

namespace slowpool {

enum class GroupBy { SourceIp, Provider, Both };

struct AnalysisConfig {
  double slow_threshold_bps = 100.0;   // below this observed throughput = slow
  SimTime min_observation = seconds(10);  // grace period before a connection is judged
  GroupBy group_by = GroupBy::Both;
  std::int64_t group_threshold = 5;    // k: groups of >= k slow connections are evicted
  SimTime period = seconds(5);
  bool include_unknown_provider = false;
  bool always_on = false;  // skip the arm-on-first-saturation gate
};

/// The only connection facts the defense may read. No truth label, no
/// workload identity: the evaluation is honest by construction.
struct DefenseView {
  std::int64_t conn_id = -1;
  IpAddr src_ip;
  SimTime opened_at{0};
  std::int64_t delivered = 0;
  SimTime last_progress_at{0};
};

struct DropEntry {
  std::int64_t conn_id;
  std::string group_key;
};

/// Connections selected for eviction in one analysis cycle; each id at most
/// once, ordered by (group key, conn id).
using DropSet = std::vector<DropEntry>;

/// Group census emitted to the event log: every group of slow connections
/// seen in a cycle, whether or not it met the eviction threshold.
struct GroupStat {
  std::string key;
  std::int64_t size = 0;
  bool dropped = false;
};

struct RouteResult {
  bool admitted_anywhere = false;
  std::int32_t zone_index = -1;  // index into the zone list when admitted
};

/// Overflow routing across the two-zone pair: zone 1 while it has a free
/// slot, else zone 2, else rejected. Never consults anything but occupancy.
RouteResult route(std::span<const Zone> zones);

/// Observed delivery rate in bytes/second, or nullopt while the connection is
/// younger than min_observation.
std::optional<double> throughput_of(const DefenseView& row, SimTime now,
                                    const AnalysisConfig& cfg);

/// True iff the connection is observed and its throughput is below the slow
/// threshold. Unobserved connections are never slow.
bool classify_slow(const DefenseView& row, SimTime now, const AnalysisConfig& cfg);

struct AnalysisResult {
  DropSet drops;
  std::vector<GroupStat> groups;  // ordered by key
  std::int64_t slow_count = 0;
};

/// Pure decision function for one zone snapshot: partitions slow connections
/// by the configured key(s) and selects every member of every group of size
/// >= group_threshold. Recomputing from a logged view yields the identical
/// set. Input order does not matter; rows are canonicalized internally.
AnalysisResult analysis_cycle(std::span<const DefenseView> rows, const ProviderMap& map,
                              const AnalysisConfig& cfg, SimTime now);

struct ApplyResult {
  std::int64_t closed = 0;
  std::int64_t skipped = 0;  // ids already out of the pool
};

/// Closes every listed connection with reason Mitigation; freed slots are
/// available to routing immediately. Already-terminal ids are skipped and
/// counted. `on_closed` fires after each successful close (log hook).
ApplyResult apply_drops(Zone& zone, std::unordered_map<std::int64_t, Connection*>& conns,
                        const DropSet& drops, SimTime now,
                        const std::function<void(const Connection&, const DropEntry&)>& on_closed = {});

/// Group key used for an unknown provider (kept groupable behind
/// include_unknown_provider).
inline constexpr const char* kUnknownProviderKey = "provider:unknown";

}  // namespace slowpool

#endif  // SLOWPOOL_DEFENSE_HPP
