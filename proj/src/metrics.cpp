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

#include "slowpool/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "slowpool/errors.hpp"

namespace slowpool {

std::vector<AvailabilityWindow> availability(const ParsedLog& log, SimTime window) {
  if (window.micros <= 0) throw BadParamError("availability: window must be positive");

  const std::size_t window_count =
      static_cast<std::size_t>(log.end_at.micros / window.micros) + 1;
  std::vector<AvailabilityWindow> series(window_count);
  for (std::size_t i = 0; i < window_count; ++i) {
    series[i].start = micros(static_cast<std::int64_t>(i) * window.micros);
  }

  for (const auto& [id, conn] : log.conns) {
    if (conn.spec.truth != TruthLabel::Legit) continue;
    auto& bucket = series[static_cast<std::size_t>(conn.spec.at.micros / window.micros)];
    ++bucket.attempted;
    if (conn.admitted_at) ++bucket.admitted;
  }

  for (auto& bucket : series) {
    if (bucket.attempted > 0) {
      bucket.value = static_cast<double>(bucket.admitted) / static_cast<double>(bucket.attempted);
    }
  }
  return series;
}

Confusion confusion(const ParsedLog& log) {
  Confusion c;
  for (const auto& [id, conn] : log.conns) {
    const bool attack = conn.spec.truth == TruthLabel::Attack;
    const bool mitigated = conn.close && conn.close->reason == "mitigation";
    if (attack) {
      if (mitigated) {
        ++c.tp;
      } else if ((conn.admitted_at && !conn.close) ||
                 (conn.close && conn.close->reason == "complete")) {
        ++c.fn;
      }
    } else {
      if (mitigated) {
        ++c.fp;
      } else {
        ++c.tn;
      }
    }
  }
  return c;
}

Confusion confusion_from_states(std::span<const Connection> conns) {
  Confusion c;
  for (const auto& conn : conns) {
    const bool attack = conn.truth == TruthLabel::Attack;
    const bool mitigated = conn.state == ConnState::DroppedMitigation;
    if (attack) {
      if (mitigated) {
        ++c.tp;
      } else if (conn.state == ConnState::Transferring || conn.state == ConnState::Complete) {
        ++c.fn;
      }
    } else {
      if (mitigated) {
        ++c.fp;
      } else {
        ++c.tn;
      }
    }
  }
  return c;
}

std::vector<SimTime> completed_legit_lifetimes(const ParsedLog& log) {
  std::vector<SimTime> out;
  for (const auto& [id, conn] : log.conns) {
    if (conn.spec.truth != TruthLabel::Legit || conn.spec.is_probe) continue;
    if (!conn.close || conn.close->reason != "complete" || !conn.admitted_at) continue;
    out.push_back(conn.close->at - *conn.admitted_at);
  }
  return out;
}

SimTime recommend_timeout(std::vector<SimTime> lifetimes) {
  if (lifetimes.empty()) throw EmptySampleError("recommend_timeout: empty lifetime sample");
  std::sort(lifetimes.begin(), lifetimes.end());
  const SimTime median = lifetimes[(lifetimes.size() - 1) / 2];
  const std::int64_t scaled = median.micros * kRecommendFactorNum / kRecommendFactorDen;
  const std::int64_t whole_seconds = (scaled + 999'999) / 1'000'000;
  return seconds(whole_seconds);
}

MetricsReport compute_report(const ParsedLog& log, SimTime window, std::uint64_t seed) {
  MetricsReport report;
  report.seed = seed;
  report.window = window;
  report.horizon = log.end_at;
  report.availability = availability(log, window);
  report.confusion = confusion(log);

  report.lifetimes_us["complete"] = {};
  report.lifetimes_us["dropped_timeout"] = {};
  report.lifetimes_us["dropped_mitigation"] = {};
  report.lifetimes_us["rejected_full"] = {};

  for (const auto& [id, conn] : log.conns) {
    const bool legit = conn.spec.truth == TruthLabel::Legit;
    if (conn.rejected) {
      if (legit) ++report.rejected_full_legit;
      report.lifetimes_us["rejected_full"].push_back(0);
      continue;
    }
    if (conn.close && conn.admitted_at) {
      report.lifetimes_us[conn.close->reason == "complete"
                              ? "complete"
                              : (conn.close->reason == "timeout" ? "dropped_timeout"
                                                                 : "dropped_mitigation")]
          .push_back((conn.close->at - *conn.admitted_at).micros);
    } else if (!legit && conn.admitted_at && !conn.close) {
      ++report.attack_alive_at_end;
    }
  }

  const auto samples = completed_legit_lifetimes(log);
  if (!samples.empty()) {
    report.recommended_timeout = recommend_timeout(samples);
  }
  return report;
}

std::string availability_to_csv(const MetricsReport& report) {
  std::string out = "window_start_us,availability\n";
  char buf[64];
  for (const auto& w : report.availability) {
    if (w.value) {
      std::snprintf(buf, sizeof buf, "%lld,%.6f\n", static_cast<long long>(w.start.micros),
                    *w.value);
    } else {
      std::snprintf(buf, sizeof buf, "%lld,\n", static_cast<long long>(w.start.micros));
    }
    out += buf;
  }
  return out;
}

std::string report_to_json(const MetricsReport& report) {
  nlohmann::ordered_json doc;
  doc["schema_version"] = 1;
  doc["seed"] = report.seed;
  doc["window_us"] = report.window.micros;
  doc["horizon_us"] = report.horizon.micros;

  nlohmann::ordered_json series = nlohmann::ordered_json::array();
  for (const auto& w : report.availability) {
    nlohmann::ordered_json entry;
    entry["window_start_us"] = w.start.micros;
    entry["attempted"] = w.attempted;
    entry["admitted"] = w.admitted;
    if (w.value) {
      entry["value"] = *w.value;
    } else {
      entry["value"] = nullptr;
    }
    series.push_back(std::move(entry));
  }
  doc["availability"] = std::move(series);

  doc["confusion"] = {{"tp", report.confusion.tp},
                      {"fp", report.confusion.fp},
                      {"fn", report.confusion.fn},
                      {"tn", report.confusion.tn}};
  doc["rejected_full_legit"] = report.rejected_full_legit;
  doc["attack_alive_at_end"] = report.attack_alive_at_end;

  nlohmann::ordered_json lifetimes;
  for (const auto& [state, values] : report.lifetimes_us) {
    lifetimes[state] = values;
  }
  doc["lifetimes_us"] = std::move(lifetimes);

  if (report.recommended_timeout) {
    doc["recommended_timeout_us"] = report.recommended_timeout->micros;
  } else {
    doc["recommended_timeout_us"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

void export_report(const MetricsReport& report, ExportFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << (format == ExportFormat::Csv ? availability_to_csv(report) : report_to_json(report));
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace slowpool
