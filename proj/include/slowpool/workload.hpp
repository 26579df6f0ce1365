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

#ifndef SLOWPOOL_WORKLOAD_HPP
#define SLOWPOOL_WORKLOAD_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "slowpool/connection.hpp"
#include "slowpool/ip.hpp"
#include "slowpool/rng.hpp"
#include "slowpool/sim_time.hpp"

namespace slowpool {

/// Fully-sampled connection arrival. Workload builders draw every random
/// parameter eagerly, so the arrival list (sorted by time, builder order on
/// ties) IS the scenario's initial event queue and a log can be replayed
/// without touching the rng.
struct ArrivalSpec {
  SimTime at{0};
  IpAddr src_ip;
  std::int64_t recv_window = 0;
  std::int64_t read_rate = 0;
  std::int64_t response_size = 0;
  TruthLabel truth = TruthLabel::Legit;
  bool is_probe = false;
};

/// Ordinary clients: Poisson arrivals, uniform read rates and response sizes.
/// slow_fraction of them read at attack-like rates — the legitimately slow
/// clients a rate-threshold defense cannot distinguish from an attack.
struct LegitWorkload {
  double arrival_rate_per_sec = 0.0;
  std::pair<std::int64_t, std::int64_t> read_rate_range{1, 1};      // bytes/s
  std::pair<std::int64_t, std::int64_t> response_size_range{1, 1};  // bytes
  Cidr src_block;
  double slow_fraction = 0.0;
  std::pair<std::int64_t, std::int64_t> slow_read_rate_range{4, 30};  // bytes/s
};

/// One slow-read wave from a cloud block: `count` connections with distinct
/// virtual IPs, tiny advertised windows, and a fixed trickle read rate,
/// spread uniformly over launch_window.
struct AttackWorkload {
  std::int64_t count = 0;
  Cidr provider_block;
  std::pair<std::int64_t, std::int64_t> window_range{8, 16};  // bytes
  std::int64_t read_rate = 5;                                 // bytes/s
  SimTime launch_window{0};
  std::int64_t response_size = 0;
};

/// Fast periodic one-shot requests: the availability sensor.
struct ProbeWorkload {
  SimTime period{0};
  std::int64_t read_rate = 1'000'000;
  std::int64_t response_size = 1000;
};

/// Receive window used for clients that do not manipulate theirs.
inline constexpr std::int64_t kDefaultRecvWindow = 65535;

/// Source address probes report from (TEST-NET-1; outside any workload block
/// in the shipped scenarios).
inline constexpr std::uint32_t kProbeSourceIp = 0xC0000201;  // 192.0.2.1

std::vector<ArrivalSpec> build_legit_arrivals(const LegitWorkload& w, SimTime horizon, Rng& rng);

/// Throws BlockExhaustedError when count exceeds the block's host capacity.
std::vector<ArrivalSpec> build_attack_wave(const AttackWorkload& w, Rng& rng);

std::vector<ArrivalSpec> build_probes(const ProbeWorkload& w, SimTime horizon);

/// Stable-sorts the concatenation of all workload arrival lists by time,
/// preserving builder order on ties. The result is the initial event queue.
std::vector<ArrivalSpec> merge_arrivals(std::vector<std::vector<ArrivalSpec>> lists);

}  // namespace slowpool

#endif  // SLOWPOOL_WORKLOAD_HPP
