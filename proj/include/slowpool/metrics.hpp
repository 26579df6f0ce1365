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

#ifndef SLOWPOOL_METRICS_HPP
#define SLOWPOOL_METRICS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "slowpool/connection.hpp"
#include "slowpool/log_model.hpp"
#include "slowpool/sim_time.hpp"

namespace slowpool {

/// "Slightly greater than the median lifetime": the recommendation multiplies
/// the median by 3/2 and rounds up to a whole second.
inline constexpr std::int64_t kRecommendFactorNum = 3;
inline constexpr std::int64_t kRecommendFactorDen = 2;

struct AvailabilityWindow {
  SimTime start{0};
  std::int64_t attempted = 0;
  std::int64_t admitted = 0;
  /// admitted/attempted; empty when no legitimate attempts fell in the
  /// window (reported as null, never as optimistic 1.0).
  std::optional<double> value;
};

struct Confusion {
  std::int64_t tp = 0;  // attack connections closed by mitigation
  std::int64_t fp = 0;  // legit connections closed by mitigation
  std::int64_t fn = 0;  // attack connections still active or completed at end
  std::int64_t tn = 0;  // legit connections never mitigated
};

struct MetricsReport {
  std::uint64_t seed = 0;
  SimTime window{0};
  SimTime horizon{0};
  std::vector<AvailabilityWindow> availability;
  Confusion confusion;
  std::int64_t rejected_full_legit = 0;
  std::int64_t attack_alive_at_end = 0;
  /// Durations per terminal state: complete, dropped_timeout,
  /// dropped_mitigation, rejected_full.
  std::map<std::string, std::vector<std::int64_t>> lifetimes_us;
  std::optional<SimTime> recommended_timeout;
};

/// Per-window fraction of legitimate attempts (probes included) that were
/// admitted to any zone.
std::vector<AvailabilityWindow> availability(const ParsedLog& log, SimTime window);

Confusion confusion(const ParsedLog& log);

/// Same counts recomputed from final connection states; an independent path
/// the log-derived counts are checked against.
Confusion confusion_from_states(std::span<const Connection> conns);

/// Lifetimes of completed legitimate connections, probes excluded.
std::vector<SimTime> completed_legit_lifetimes(const ParsedLog& log);

/// Median lifetime (lower of the two central values for even-sized samples)
/// times 3/2, rounded up to a whole second. Throws EmptySampleError on an
/// empty sample.
SimTime recommend_timeout(std::vector<SimTime> lifetimes);

MetricsReport compute_report(const ParsedLog& log, SimTime window, std::uint64_t seed);

enum class ExportFormat { Csv, Json };

/// Byte-stable export: identical reports serialize to identical bytes (fixed
/// key order, fixed decimal formatting). CSV carries the availability series
/// with header `window_start_us,availability`; JSON carries the whole report.
void export_report(const MetricsReport& report, ExportFormat format, const std::string& path);

std::string report_to_json(const MetricsReport& report);
std::string availability_to_csv(const MetricsReport& report);

}  // namespace slowpool

#endif  // SLOWPOOL_METRICS_HPP
