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

#include "slowpool/workload.hpp"

#include <algorithm>

namespace slowpool {

std::vector<ArrivalSpec> build_legit_arrivals(const LegitWorkload& w, SimTime horizon, Rng& rng) {
  std::vector<ArrivalSpec> out;
  if (w.arrival_rate_per_sec <= 0.0) return out;

  // Draw order per connection is fixed (gap, ip, slow?, rate, size) so a
  // seed pins every parameter.
  SimTime t{0};
  while (true) {
    t += rng.exponential_gap(w.arrival_rate_per_sec);
    if (t > horizon) break;

    ArrivalSpec a;
    a.at = t;
    const std::uint64_t hosts = w.src_block.usable_hosts();
    const std::int64_t host_index =
        hosts == 0 ? 0 : rng.uniform_int(0, static_cast<std::int64_t>(hosts - 1));
    a.src_ip = IpAddr{static_cast<std::uint32_t>(w.src_block.base.value + 1 + host_index)};
    const bool slow = rng.uniform_unit() <= w.slow_fraction;
    const auto& range = slow ? w.slow_read_rate_range : w.read_rate_range;
    a.read_rate = rng.uniform_int(range.first, range.second);
    a.response_size = rng.uniform_int(w.response_size_range.first, w.response_size_range.second);
    a.recv_window = kDefaultRecvWindow;
    a.truth = TruthLabel::Legit;
    out.push_back(a);
  }
  return out;
}

std::vector<ArrivalSpec> build_attack_wave(const AttackWorkload& w, Rng& rng) {
  std::vector<ArrivalSpec> out;
  if (w.count == 0) return out;

  const std::vector<IpAddr> ips =
      allocate_virtual_ips(w.provider_block, static_cast<std::uint64_t>(w.count), rng);

  out.reserve(static_cast<std::size_t>(w.count));
  for (std::int64_t i = 0; i < w.count; ++i) {
    ArrivalSpec a;
    a.at = micros(w.launch_window.micros > 0 ? rng.uniform_int(0, w.launch_window.micros) : 0);
    a.src_ip = ips[static_cast<std::size_t>(i)];
    a.recv_window = rng.uniform_int(w.window_range.first, w.window_range.second);
    a.read_rate = w.read_rate;
    a.response_size = w.response_size;
    a.truth = TruthLabel::Attack;
    out.push_back(a);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const ArrivalSpec& a, const ArrivalSpec& b) { return a.at < b.at; });
  return out;
}

std::vector<ArrivalSpec> build_probes(const ProbeWorkload& w, SimTime horizon) {
  std::vector<ArrivalSpec> out;
  if (w.period.micros <= 0) return out;
  for (SimTime t = w.period; t <= horizon; t += w.period) {
    ArrivalSpec a;
    a.at = t;
    a.src_ip = IpAddr{kProbeSourceIp};
    a.recv_window = kDefaultRecvWindow;
    a.read_rate = w.read_rate;
    a.response_size = w.response_size;
    a.truth = TruthLabel::Legit;
    a.is_probe = true;
    out.push_back(a);
  }
  return out;
}

std::vector<ArrivalSpec> merge_arrivals(std::vector<std::vector<ArrivalSpec>> lists) {
  std::vector<ArrivalSpec> all;
  for (auto& list : lists) {
    all.insert(all.end(), list.begin(), list.end());
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const ArrivalSpec& a, const ArrivalSpec& b) { return a.at < b.at; });
  return all;
}

}  // namespace slowpool
