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

#ifndef SLOWPOOL_SIMULATION_HPP
#define SLOWPOOL_SIMULATION_HPP

#include <optional>
#include <span>
#include <vector>

#include "slowpool/defense.hpp"
#include "slowpool/engine.hpp"
#include "slowpool/provider_map.hpp"
#include "slowpool/server.hpp"
#include "slowpool/workload.hpp"

namespace slowpool {

struct SimSetup {
  std::vector<ServerConfig> zone_configs;  // one zone, or two when defended
  std::optional<AnalysisConfig> analysis;  // requires two zones + provider map
  SimTime horizon{0};
};

/// Binds workload arrivals, the zone pool(s), the defense, and the event
/// engine into one deterministic run. Every run artifact (admissions,
/// deliveries, closes, per-cycle defense views, group census) lands in the
/// event log, which is the only thing the metrics module consumes.
class Simulation {
 public:
  /// `providers` may be null when no analysis is configured.
  Simulation(SimSetup setup, std::vector<ArrivalSpec> arrivals, const ProviderMap* providers);

  const EventLog& run();

  const EventLog& log() const { return engine_.log(); }
  std::span<const Connection> connections() const { return conns_; }
  const std::vector<Zone>& zones() const { return zones_; }
  std::span<const ArrivalSpec> arrivals() const { return arrivals_; }

  bool saturated() const { return saturated_; }
  std::optional<SimTime> first_saturation_at() const { return first_saturation_at_; }

 private:
  void on_connect_attempt(const Event& e);
  void on_read_tick(const Event& e);
  void on_timeout_check(const Event& e);
  void on_analysis_cycle(const Event& e);
  void on_transfer_complete(const Event& e);

  void log_line(std::string kind, std::string payload);
  void log_close(const Connection& conn, const Zone& zone, CloseReason reason,
                 const std::string& group_key = {});
  void note_saturation();
  void analyze_zone(Zone& zone);

  SimSetup setup_;
  std::vector<ArrivalSpec> arrivals_;
  const ProviderMap* providers_;
  std::vector<Zone> zones_;
  std::vector<Connection> conns_;
  Engine engine_;
  bool saturated_ = false;
  std::optional<SimTime> first_saturation_at_;
  bool ran_ = false;
};

}  // namespace slowpool

#endif  // SLOWPOOL_SIMULATION_HPP
