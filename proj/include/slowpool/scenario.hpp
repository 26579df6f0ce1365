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

#ifndef SLOWPOOL_SCENARIO_HPP
#define SLOWPOOL_SCENARIO_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slowpool/defense.hpp"
#include "slowpool/metrics.hpp"
#include "slowpool/rng.hpp"
#include "slowpool/server.hpp"
#include "slowpool/workload.hpp"

namespace slowpool {

/// One reproducible experiment: zones, workloads, optional defense, metrics
/// window, seed. Parsed from a strict, versioned JSON document — unknown keys
/// reject the file so a misspelled threshold can never silently disappear.
struct Scenario {
  std::uint64_t seed = 0;
  SimTime horizon{0};
  SimTime metrics_window{0};
  std::string provider_table_path;  // resolved against the scenario file's directory
  std::vector<ServerConfig> zones;  // one or two
  std::vector<LegitWorkload> legit;
  std::vector<AttackWorkload> attacks;
  std::vector<ProbeWorkload> probes;
  std::optional<AnalysisConfig> analysis;
};

/// Throws MalformedError (field + reason) on any schema violation and
/// MissingFileError when the file or a referenced file is absent. The
/// provider table's existence is checked at parse time.
Scenario parse_scenario(const std::string& path);

/// Samples every workload eagerly and merges the arrival lists into the
/// initial event queue (time order, builder order on ties).
std::vector<ArrivalSpec> build_arrivals(const Scenario& scenario, Rng& rng);

struct RunArtifacts {
  std::string fingerprint;  // sha256 of the serialized event log
  MetricsReport report;
};

/// Runs the scenario and writes events.log, report.json, availability.csv
/// and fingerprint.txt into out_dir (created if needed).
RunArtifacts run_scenario(const Scenario& scenario, const std::string& out_dir);

/// Human-oriented description of the scenario JSON schema (the --schema text).
std::string scenario_schema_text();

}  // namespace slowpool

#endif  // SLOWPOOL_SCENARIO_HPP
