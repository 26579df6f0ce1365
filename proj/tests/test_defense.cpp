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

#include <algorithm>
#include <random>
#include <set>

#include "slowpool/defense.hpp"
#include "slowpool/log_model.hpp"
#include "slowpool/simulation.hpp"

using namespace slowpool;

namespace {

AnalysisConfig default_cfg() {
  AnalysisConfig cfg;
  cfg.slow_threshold_bps = 100.0;
  cfg.min_observation = seconds(10);
  cfg.group_by = GroupBy::Both;
  cfg.group_threshold = 5;
  cfg.period = seconds(5);
  return cfg;
}

DefenseView row(std::int64_t id, const std::string& ip, std::int64_t opened_s,
                std::int64_t delivered) {
  DefenseView v;
  v.conn_id = id;
  v.src_ip = IpAddr::parse(ip);
  v.opened_at = seconds(opened_s);
  v.delivered = delivered;
  v.last_progress_at = v.opened_at;
  return v;
}

Zone zone_with(std::int64_t cap) { return Zone{0, ServerConfig{cap, seconds(20)}, {}}; }

}  // namespace

TEST_CASE("route prefers zone 1 while it has room") {
  std::vector<Zone> zones{zone_with(500), zone_with(500)};
  std::vector<Connection> filler(600);
  for (int i = 0; i < 499; ++i) {
    filler[static_cast<std::size_t>(i)].id = i;
    zones[0].pool.insert(i);
  }
  CHECK(route(zones).zone_index == 0);

  zones[0].pool.insert(499);
  REQUIRE_FALSE(zones[0].has_free_slot());
  CHECK(route(zones).zone_index == 1);

  for (int i = 0; i < 500; ++i) zones[1].pool.insert(1000 + i);
  CHECK_FALSE(route(zones).admitted_anywhere);
}

TEST_CASE("throughput observation respects the grace period") {
  const AnalysisConfig cfg = default_cfg();
  // opened 40 s ago with 200 B delivered: 5 B/s
  CHECK(throughput_of(row(1, "203.0.112.1", 0, 200), seconds(40), cfg) == 5.0);
  // younger than min_observation: unobserved
  CHECK_FALSE(throughput_of(row(1, "203.0.112.1", 35, 200), seconds(40), cfg).has_value());
  // zero flow is the slowest possible observation
  CHECK(throughput_of(row(1, "203.0.112.1", 0, 0), seconds(20), cfg) == 0.0);
}

TEST_CASE("slow classification compares observed throughput to the threshold") {
  const AnalysisConfig cfg = default_cfg();
  CHECK(classify_slow(row(1, "203.0.112.1", 0, 200), seconds(40), cfg));         // 5 B/s
  CHECK_FALSE(classify_slow(row(1, "203.0.112.1", 0, 400'000), seconds(40), cfg));  // 10 kB/s
  CHECK_FALSE(classify_slow(row(1, "203.0.112.1", 35, 0), seconds(40), cfg));    // unobserved
}

TEST_CASE("one provider group above threshold is evicted whole") {
  ProviderMap map;
  map.add(parse_cidr("203.0.112.0/22"), "cloudX");
  const AnalysisConfig cfg = default_cfg();

  std::vector<DefenseView> rows;
  Rng rng(1);
  const auto ips = allocate_virtual_ips(parse_cidr("203.0.112.0/22"), 600, rng);
  for (int i = 0; i < 600; ++i) {
    DefenseView v;
    v.conn_id = i;
    v.src_ip = ips[static_cast<std::size_t>(i)];
    v.opened_at = seconds(0);
    v.delivered = 50;  // 50 B over 40 s: 1.25 B/s
    v.last_progress_at = seconds(39);
    rows.push_back(v);
  }

  const AnalysisResult result = analysis_cycle(rows, map, cfg, seconds(40));
  CHECK(result.slow_count == 600);
  CHECK(result.drops.size() == 600);
  std::set<std::int64_t> ids;
  for (const auto& d : result.drops) ids.insert(d.conn_id);
  CHECK(ids.size() == 600);
}

TEST_CASE("groups below the threshold survive") {
  ProviderMap map;
  map.add(parse_cidr("203.0.112.0/22"), "cloudY");
  const AnalysisConfig cfg = default_cfg();

  std::vector<DefenseView> rows = {row(1, "203.0.112.1", 0, 10), row(2, "203.0.112.2", 0, 10),
                                   row(3, "203.0.112.3", 0, 10)};
  const AnalysisResult result = analysis_cycle(rows, map, cfg, seconds(40));
  CHECK(result.slow_count == 3);
  CHECK(result.drops.empty());
  REQUIRE(!result.groups.empty());
  CHECK_FALSE(result.groups.front().dropped);
}

TEST_CASE("slow legitimate connections sharing the attacker's provider are dropped too") {
  ProviderMap map;
  map.add(parse_cidr("203.0.112.0/22"), "cloudX");
  const AnalysisConfig cfg = default_cfg();

  std::vector<DefenseView> rows;
  Rng rng(2);
  const auto ips = allocate_virtual_ips(parse_cidr("203.0.112.0/22"), 598, rng);
  for (int i = 0; i < 598; ++i) {
    DefenseView v;
    v.conn_id = i;
    v.src_ip = ips[static_cast<std::size_t>(i)];
    v.opened_at = seconds(0);
    v.delivered = 40;
    v.last_progress_at = seconds(39);
    rows.push_back(v);
  }
  // Two slow but legitimate clients from the same provider block. The defense
  // has no label to tell them apart; they go down with the group.
  rows.push_back(row(9001, "203.0.113.200", 0, 300));  // 7.5 B/s at t=40
  rows.push_back(row(9002, "203.0.113.201", 0, 500));  // 12.5 B/s

  const AnalysisResult result = analysis_cycle(rows, map, cfg, seconds(40));
  CHECK(result.drops.size() == 600);
  std::set<std::int64_t> ids;
  for (const auto& d : result.drops) ids.insert(d.conn_id);
  CHECK(ids.count(9001) == 1);
  CHECK(ids.count(9002) == 1);
}

TEST_CASE("source-ip grouping catches same-address swarms") {
  ProviderMap map;  // empty: no provider attribution at all
  AnalysisConfig cfg = default_cfg();
  cfg.group_by = GroupBy::SourceIp;

  std::vector<DefenseView> rows;
  for (int i = 0; i < 6; ++i) rows.push_back(row(i, "198.51.100.77", 0, 10));
  rows.push_back(row(100, "198.51.100.78", 0, 10));

  const AnalysisResult result = analysis_cycle(rows, map, cfg, seconds(40));
  CHECK(result.drops.size() == 6);
  for (const auto& d : result.drops) {
    CHECK(d.group_key == "ip:198.51.100.77");
    CHECK(d.conn_id < 100);
  }
}

TEST_CASE("group_by both unions the qualifying partitions") {
  ProviderMap map;
  map.add(parse_cidr("203.0.112.0/22"), "cloudX");
  AnalysisConfig cfg = default_cfg();
  cfg.group_threshold = 5;

  std::vector<DefenseView> rows;
  // Five conns from one provider (distinct ips): qualifies by provider.
  for (int i = 0; i < 5; ++i) {
    rows.push_back(row(i, "203.0.112." + std::to_string(10 + i), 0, 10));
  }
  // Five conns sharing one unattributed ip: qualifies by source ip only.
  for (int i = 10; i < 15; ++i) rows.push_back(row(i, "198.51.100.9", 0, 10));

  AnalysisResult both = analysis_cycle(rows, map, cfg, seconds(40));
  CHECK(both.drops.size() == 10);

  cfg.group_by = GroupBy::Provider;
  AnalysisResult provider_only = analysis_cycle(rows, map, cfg, seconds(40));
  CHECK(provider_only.drops.size() == 5);

  cfg.group_by = GroupBy::SourceIp;
  AnalysisResult ip_only = analysis_cycle(rows, map, cfg, seconds(40));
  CHECK(ip_only.drops.size() == 5);
}

TEST_CASE("unknown-provider connections group only when explicitly included") {
  ProviderMap map;  // nothing attributes
  AnalysisConfig cfg = default_cfg();
  cfg.group_by = GroupBy::Provider;

  std::vector<DefenseView> rows;
  for (int i = 0; i < 8; ++i) {
    rows.push_back(row(i, "198.51.100." + std::to_string(10 + i), 0, 10));
  }

  const AnalysisResult off = analysis_cycle(rows, map, cfg, seconds(40));
  CHECK(off.drops.empty());
  REQUIRE(off.groups.size() == 1);
  CHECK(off.groups.front().key == kUnknownProviderKey);
  CHECK(off.groups.front().size == 8);
  CHECK_FALSE(off.groups.front().dropped);

  cfg.include_unknown_provider = true;
  const AnalysisResult on = analysis_cycle(rows, map, cfg, seconds(40));
  CHECK(on.drops.size() == 8);
}

TEST_CASE("analysis is a pure function of the view snapshot") {
  ProviderMap map;
  map.add(parse_cidr("203.0.112.0/22"), "cloudX");
  const AnalysisConfig cfg = default_cfg();

  std::vector<DefenseView> rows;
  Rng rng(3);
  const auto ips = allocate_virtual_ips(parse_cidr("203.0.112.0/22"), 50, rng);
  for (int i = 0; i < 50; ++i) {
    DefenseView v;
    v.conn_id = i;
    v.src_ip = ips[static_cast<std::size_t>(i)];
    v.opened_at = seconds(i % 3);
    v.delivered = 10 + i;
    v.last_progress_at = seconds(30);
    rows.push_back(v);
  }

  const AnalysisResult reference = analysis_cycle(rows, map, cfg, seconds(40));
  std::mt19937 shuffler(99);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(rows.begin(), rows.end(), shuffler);
    const AnalysisResult again = analysis_cycle(rows, map, cfg, seconds(40));
    REQUIRE(again.drops.size() == reference.drops.size());
    for (std::size_t i = 0; i < again.drops.size(); ++i) {
      CHECK(again.drops[i].conn_id == reference.drops[i].conn_id);
      CHECK(again.drops[i].group_key == reference.drops[i].group_key);
    }
  }
}

TEST_CASE("apply_drops closes live members, skips the rest, and frees slots") {
  Zone zone = zone_with(10);
  std::vector<Connection> conns(3);
  for (int i = 0; i < 3; ++i) {
    conns[static_cast<std::size_t>(i)].id = i;
    conns[static_cast<std::size_t>(i)].recv_window = 16;
    conns[static_cast<std::size_t>(i)].read_rate = 5;
    conns[static_cast<std::size_t>(i)].response_total = 100;
    try_admit(zone, conns[static_cast<std::size_t>(i)], micros(0));
  }
  // One member already completed and left the pool.
  close(zone, conns[2], CloseReason::Complete, micros(5));
  conns[2].state = ConnState::Complete;

  std::unordered_map<std::int64_t, Connection*> table;
  for (auto& c : conns) table.emplace(c.id, &c);

  DropSet drops = {{0, "provider:cloudX"}, {2, "provider:cloudX"}, {42, "provider:cloudX"}};
  int callbacks = 0;
  const ApplyResult result = apply_drops(zone, table, drops, micros(10),
                                         [&](const Connection&, const DropEntry&) { ++callbacks; });
  CHECK(result.closed == 1);
  CHECK(result.skipped == 2);
  CHECK(callbacks == 1);
  CHECK(conns[0].state == ConnState::DroppedMitigation);
  CHECK(zone.pool.size() == 1);  // only conn 1 remains
  CHECK(zone.has_free_slot());
}

TEST_CASE("empty drop set closes nothing") {
  Zone zone = zone_with(4);
  std::unordered_map<std::int64_t, Connection*> table;
  const ApplyResult result = apply_drops(zone, table, {}, micros(0));
  CHECK(result.closed == 0);
  CHECK(result.skipped == 0);
}

TEST_CASE("post-mitigation recovery: the pool is attack-free one period after arming") {
  // Burst attack, one provider, fast legit traffic, k <= attack count. By the
  // analysis cycle after the first armed one, no attack connection remains.
  std::vector<ArrivalSpec> attack;
  Rng rng(11);
  AttackWorkload aw;
  aw.count = 30;
  aw.provider_block = parse_cidr("203.0.112.0/22");
  aw.launch_window = micros(0);
  aw.response_size = 1'000'000;
  attack = build_attack_wave(aw, rng);

  LegitWorkload lw;
  lw.arrival_rate_per_sec = 3.0;
  lw.read_rate_range = {50'000, 100'000};
  lw.response_size_range = {1'000, 4'000};
  lw.src_block = parse_cidr("198.51.100.0/24");
  lw.slow_fraction = 0.0;

  SimSetup setup;
  setup.zone_configs = {ServerConfig{20, seconds(60), TimeoutPolicy::Idle, micros(0)},
                        ServerConfig{20, seconds(60), TimeoutPolicy::Idle, micros(0)}};
  AnalysisConfig cfg;
  cfg.slow_threshold_bps = 100.0;
  cfg.min_observation = seconds(2);
  cfg.group_by = GroupBy::Both;
  cfg.group_threshold = 5;
  cfg.period = seconds(5);
  setup.analysis = cfg;
  setup.horizon = seconds(60);

  ProviderMap map;
  map.add(parse_cidr("203.0.112.0/22"), "cloudX");
  map.add(parse_cidr("198.51.100.0/24"), "ispA");

  Simulation sim(setup,
                 merge_arrivals({build_legit_arrivals(lw, seconds(60), rng), attack}), &map);
  sim.run();

  REQUIRE(sim.saturated());
  const ParsedLog parsed = parse_log(sim.log());
  REQUIRE(!parsed.armed_cycles.empty());
  const SimTime deadline = parsed.armed_cycles.front() + cfg.period;

  // Count attack connections in any pool just after the deadline.
  for (const Connection& c : sim.connections()) {
    if (c.truth != TruthLabel::Attack) continue;
    if (c.state == ConnState::Transferring) {
      FAIL_CHECK("attack connection still pooled at scenario end: " << c.id);
    }
    if (c.state == ConnState::DroppedMitigation) {
      CHECK(*c.closed_at <= deadline);
    }
  }

  // Group soundness: every mitigated connection was classified slow in a
  // qualifying group at its drop cycle, recomputed from the logged views.
  for (const auto& snapshot : parsed.views) {
    const AnalysisResult recomputed = analysis_cycle(snapshot.rows, map, cfg, snapshot.at);
    std::set<std::int64_t> drop_ids;
    for (const auto& d : recomputed.drops) drop_ids.insert(d.conn_id);
    for (const auto& [id, conn] : parsed.conns) {
      if (conn.close && conn.close->reason == "mitigation" && conn.close->at == snapshot.at &&
          conn.close->zone == snapshot.zone) {
        CHECK(drop_ids.count(id) == 1);
      }
    }
  }
}
