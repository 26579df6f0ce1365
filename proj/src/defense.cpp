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

#include "slowpool/defense.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace slowpool {

RouteResult route(std::span<const Zone> zones) {
  for (std::size_t i = 0; i < zones.size(); ++i) {
    if (zones[i].has_free_slot()) {
      return {true, static_cast<std::int32_t>(i)};
    }
  }
  return {false, -1};
}

std::optional<double> throughput_of(const DefenseView& row, SimTime now,
                                    const AnalysisConfig& cfg) {
  const SimTime age = now - row.opened_at;
  if (age < cfg.min_observation) return std::nullopt;
  if (age.micros <= 0) return std::nullopt;  // zero-age snapshot, nothing to rate yet
  return static_cast<double>(row.delivered) * 1e6 / static_cast<double>(age.micros);
}

bool classify_slow(const DefenseView& row, SimTime now, const AnalysisConfig& cfg) {
  const auto bps = throughput_of(row, now, cfg);
  return bps.has_value() && *bps < cfg.slow_threshold_bps;
}

AnalysisResult analysis_cycle(std::span<const DefenseView> rows, const ProviderMap& map,
                              const AnalysisConfig& cfg, SimTime now) {
  // Canonical row order makes the result independent of snapshot order.
  std::vector<const DefenseView*> slow;
  for (const auto& row : rows) {
    if (classify_slow(row, now, cfg)) slow.push_back(&row);
  }
  std::sort(slow.begin(), slow.end(),
            [](const DefenseView* a, const DefenseView* b) { return a->conn_id < b->conn_id; });

  AnalysisResult result;
  result.slow_count = static_cast<std::int64_t>(slow.size());

  std::map<std::string, std::vector<std::int64_t>> groups;
  const bool by_provider = cfg.group_by == GroupBy::Provider || cfg.group_by == GroupBy::Both;
  const bool by_ip = cfg.group_by == GroupBy::SourceIp || cfg.group_by == GroupBy::Both;
  for (const DefenseView* row : slow) {
    if (by_provider) {
      const auto provider = map.provider_of(row->src_ip);
      // Unknown providers share one group key; it is reported in the census
      // but qualifies only when include_unknown_provider is set.
      const std::string key = provider ? "provider:" + *provider : kUnknownProviderKey;
      groups[key].push_back(row->conn_id);
    }
    if (by_ip) {
      groups["ip:" + row->src_ip.to_string()].push_back(row->conn_id);
    }
  }

  // Union over qualifying groups. Keys iterate in sorted order and the first
  // qualifying group that claims an id keeps it, so the attribution recorded
  // in the DropSet is deterministic.
  std::set<std::int64_t> taken;
  for (const auto& [key, members] : groups) {
    const bool unknown_blocked = key == kUnknownProviderKey && !cfg.include_unknown_provider;
    const bool qualifies =
        !unknown_blocked && static_cast<std::int64_t>(members.size()) >= cfg.group_threshold;
    result.groups.push_back(
        GroupStat{key, static_cast<std::int64_t>(members.size()), qualifies});
    if (!qualifies) continue;
    for (const std::int64_t id : members) {
      if (taken.insert(id).second) {
        result.drops.push_back(DropEntry{id, key});
      }
    }
  }
  return result;
}

ApplyResult apply_drops(Zone& zone, std::unordered_map<std::int64_t, Connection*>& conns,
                        const DropSet& drops, SimTime now,
                        const std::function<void(const Connection&, const DropEntry&)>& on_closed) {
  ApplyResult result;
  for (const auto& drop : drops) {
    const auto it = conns.find(drop.conn_id);
    if (it == conns.end()) {
      ++result.skipped;
      continue;
    }
    Connection& conn = *it->second;
    if (conn.state != ConnState::Transferring || zone.pool.count(conn.id) == 0) {
      ++result.skipped;
      continue;
    }
    close(zone, conn, CloseReason::Mitigation, now);
    ++result.closed;
    if (on_closed) on_closed(conn, drop);
  }
  return result;
}

}  // namespace slowpool
