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

#include "slowpool/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "slowpool/errors.hpp"
#include "slowpool/log_model.hpp"
#include "slowpool/sha256.hpp"
#include "slowpool/simulation.hpp"

namespace slowpool {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& ctx,
                std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* candidate : allowed) {
      if (key == candidate) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw MalformedError(ctx.empty() ? key : ctx + "." + key, "unknown field");
    }
  }
}

SimTime seconds_field(const json& obj, const std::string& ctx, const char* key,
                      std::optional<double> fallback = std::nullopt) {
  double value = 0.0;
  if (obj.contains(key)) {
    if (!obj[key].is_number()) throw MalformedError(ctx + "." + key, "expected a number");
    value = obj[key].get<double>();
  } else if (fallback) {
    value = *fallback;
  } else {
    throw MalformedError(ctx + "." + key, "required field missing");
  }
  if (!std::isfinite(value) || value < 0.0) {
    throw MalformedError(ctx + "." + key, "must be a finite non-negative number");
  }
  return micros(static_cast<std::int64_t>(std::llround(value * 1e6)));
}

std::int64_t int_field(const json& obj, const std::string& ctx, const char* key,
                       std::optional<std::int64_t> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw MalformedError(ctx + "." + key, "required field missing");
  }
  if (!obj[key].is_number_integer()) throw MalformedError(ctx + "." + key, "expected an integer");
  return obj[key].get<std::int64_t>();
}

double number_field(const json& obj, const std::string& ctx, const char* key,
                    std::optional<double> fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw MalformedError(ctx + "." + key, "required field missing");
  }
  if (!obj[key].is_number()) throw MalformedError(ctx + "." + key, "expected a number");
  return obj[key].get<double>();
}

std::string string_field(const json& obj, const std::string& ctx, const char* key) {
  if (!obj.contains(key)) throw MalformedError(ctx + "." + key, "required field missing");
  if (!obj[key].is_string()) throw MalformedError(ctx + "." + key, "expected a string");
  return obj[key].get<std::string>();
}

std::pair<std::int64_t, std::int64_t> range_field(const json& obj, const std::string& ctx,
                                                  const char* key,
                                                  std::optional<std::pair<std::int64_t, std::int64_t>>
                                                      fallback = std::nullopt) {
  if (!obj.contains(key)) {
    if (fallback) return *fallback;
    throw MalformedError(ctx + "." + key, "required field missing");
  }
  const json& arr = obj[key];
  if (!arr.is_array() || arr.size() != 2 || !arr[0].is_number_integer() ||
      !arr[1].is_number_integer()) {
    throw MalformedError(ctx + "." + key, "expected [lo, hi] integers");
  }
  const auto lo = arr[0].get<std::int64_t>();
  const auto hi = arr[1].get<std::int64_t>();
  if (lo > hi || lo <= 0) {
    throw MalformedError(ctx + "." + key, "range must be non-empty and positive");
  }
  return {lo, hi};
}

Cidr cidr_field(const json& obj, const std::string& ctx, const char* key) {
  const std::string text = string_field(obj, ctx, key);
  try {
    return parse_cidr(text);
  } catch (const Error& e) {
    throw MalformedError(ctx + "." + key, e.what());
  }
}

ServerConfig parse_zone(const json& obj, const std::string& ctx) {
  if (!obj.is_object()) throw MalformedError(ctx, "expected an object");
  check_keys(obj, ctx, {"max_clients", "timeout_s", "timeout_policy", "rtt_us"});
  ServerConfig cfg;
  cfg.max_clients = int_field(obj, ctx, "max_clients");
  if (cfg.max_clients < 0) throw MalformedError(ctx + ".max_clients", "must be >= 0");
  cfg.timeout = seconds_field(obj, ctx, "timeout_s");
  if (cfg.timeout.micros <= 0) throw MalformedError(ctx + ".timeout_s", "must be > 0");
  if (obj.contains("timeout_policy")) {
    const std::string policy = string_field(obj, ctx, "timeout_policy");
    if (policy == "idle") {
      cfg.timeout_policy = TimeoutPolicy::Idle;
    } else if (policy == "absolute") {
      cfg.timeout_policy = TimeoutPolicy::Absolute;
    } else {
      throw MalformedError(ctx + ".timeout_policy", "expected 'idle' or 'absolute'");
    }
  }
  cfg.rtt = micros(int_field(obj, ctx, "rtt_us", 0));
  if (cfg.rtt.micros < 0) throw MalformedError(ctx + ".rtt_us", "must be >= 0");
  return cfg;
}

LegitWorkload parse_legit(const json& obj, const std::string& ctx) {
  if (!obj.is_object()) throw MalformedError(ctx, "expected an object");
  check_keys(obj, ctx,
             {"arrival_rate_per_s", "read_rate_range_bps", "response_size_range_b", "src_block",
              "slow_fraction", "slow_read_rate_range_bps"});
  LegitWorkload w;
  w.arrival_rate_per_sec = number_field(obj, ctx, "arrival_rate_per_s");
  if (w.arrival_rate_per_sec < 0.0) throw MalformedError(ctx + ".arrival_rate_per_s", "must be >= 0");
  w.read_rate_range = range_field(obj, ctx, "read_rate_range_bps");
  w.response_size_range = range_field(obj, ctx, "response_size_range_b");
  w.src_block = cidr_field(obj, ctx, "src_block");
  w.slow_fraction = number_field(obj, ctx, "slow_fraction", 0.05);
  if (w.slow_fraction < 0.0 || w.slow_fraction > 1.0) {
    throw MalformedError(ctx + ".slow_fraction", "must be within [0, 1]");
  }
  w.slow_read_rate_range = range_field(obj, ctx, "slow_read_rate_range_bps", {{4, 30}});
  return w;
}

AttackWorkload parse_attack(const json& obj, const std::string& ctx) {
  if (!obj.is_object()) throw MalformedError(ctx, "expected an object");
  check_keys(obj, ctx,
             {"count", "provider_block", "window_range_b", "read_rate_bps", "launch_window_s",
              "response_size_b"});
  AttackWorkload w;
  w.count = int_field(obj, ctx, "count");
  if (w.count < 0) throw MalformedError(ctx + ".count", "must be >= 0");
  w.provider_block = cidr_field(obj, ctx, "provider_block");
  w.window_range = range_field(obj, ctx, "window_range_b", {{8, 16}});
  if (w.window_range.second > 65535) {
    throw MalformedError(ctx + ".window_range_b", "window must be within [1, 65535]");
  }
  w.read_rate = int_field(obj, ctx, "read_rate_bps", 5);
  if (w.read_rate <= 0) throw MalformedError(ctx + ".read_rate_bps", "must be > 0");
  w.launch_window = seconds_field(obj, ctx, "launch_window_s", 10.0);
  w.response_size = int_field(obj, ctx, "response_size_b");
  if (w.response_size < 0) throw MalformedError(ctx + ".response_size_b", "must be >= 0");
  return w;
}

ProbeWorkload parse_probe(const json& obj, const std::string& ctx) {
  if (!obj.is_object()) throw MalformedError(ctx, "expected an object");
  check_keys(obj, ctx, {"period_s", "read_rate_bps", "response_size_b"});
  ProbeWorkload w;
  w.period = seconds_field(obj, ctx, "period_s");
  if (w.period.micros <= 0) throw MalformedError(ctx + ".period_s", "must be > 0");
  w.read_rate = int_field(obj, ctx, "read_rate_bps", 1'000'000);
  if (w.read_rate <= 0) throw MalformedError(ctx + ".read_rate_bps", "must be > 0");
  w.response_size = int_field(obj, ctx, "response_size_b", 1000);
  if (w.response_size < 0) throw MalformedError(ctx + ".response_size_b", "must be >= 0");
  return w;
}

AnalysisConfig parse_analysis(const json& obj, const std::string& ctx) {
  if (!obj.is_object()) throw MalformedError(ctx, "expected an object");
  check_keys(obj, ctx,
             {"slow_threshold_bps", "min_observation_s", "group_by", "group_threshold",
              "period_s", "include_unknown_provider", "always_on"});
  AnalysisConfig cfg;
  cfg.slow_threshold_bps = number_field(obj, ctx, "slow_threshold_bps", 100.0);
  if (cfg.slow_threshold_bps <= 0.0) {
    throw MalformedError(ctx + ".slow_threshold_bps", "must be > 0");
  }
  cfg.min_observation = seconds_field(obj, ctx, "min_observation_s", 10.0);
  if (obj.contains("group_by")) {
    const std::string by = string_field(obj, ctx, "group_by");
    if (by == "source_ip") {
      cfg.group_by = GroupBy::SourceIp;
    } else if (by == "provider") {
      cfg.group_by = GroupBy::Provider;
    } else if (by == "both") {
      cfg.group_by = GroupBy::Both;
    } else {
      throw MalformedError(ctx + ".group_by", "expected 'source_ip', 'provider' or 'both'");
    }
  }
  cfg.group_threshold = int_field(obj, ctx, "group_threshold", 5);
  if (cfg.group_threshold < 1) throw MalformedError(ctx + ".group_threshold", "must be >= 1");
  cfg.period = seconds_field(obj, ctx, "period_s", 5.0);
  if (cfg.period.micros <= 0) throw MalformedError(ctx + ".period_s", "must be > 0");
  if (obj.contains("include_unknown_provider")) {
    if (!obj["include_unknown_provider"].is_boolean()) {
      throw MalformedError(ctx + ".include_unknown_provider", "expected a boolean");
    }
    cfg.include_unknown_provider = obj["include_unknown_provider"].get<bool>();
  }
  if (obj.contains("always_on")) {
    if (!obj["always_on"].is_boolean()) {
      throw MalformedError(ctx + ".always_on", "expected a boolean");
    }
    cfg.always_on = obj["always_on"].get<bool>();
  }
  return cfg;
}

}  // namespace

Scenario parse_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError("scenario not readable: " + path);

  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw MalformedError("scenario", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw MalformedError("scenario", "top level must be an object");

  check_keys(doc, "",
             {"schema_version", "seed", "horizon_s", "metrics_window_s", "provider_table",
              "zones", "legit", "attacks", "probes", "analysis"});

  const std::int64_t version = int_field(doc, "scenario", "schema_version");
  if (version != 1) {
    throw MalformedError("scenario.schema_version", "unsupported version " + std::to_string(version));
  }

  Scenario s;
  const std::int64_t seed = int_field(doc, "scenario", "seed");
  if (seed < 0) throw MalformedError("scenario.seed", "must be >= 0");
  s.seed = static_cast<std::uint64_t>(seed);
  s.horizon = seconds_field(doc, "scenario", "horizon_s");
  if (s.horizon.micros <= 0) throw MalformedError("scenario.horizon_s", "must be > 0");
  s.metrics_window = seconds_field(doc, "scenario", "metrics_window_s", 5.0);
  if (s.metrics_window.micros <= 0) throw MalformedError("scenario.metrics_window_s", "must be > 0");

  if (!doc.contains("zones") || !doc["zones"].is_array() || doc["zones"].empty() ||
      doc["zones"].size() > 2) {
    throw MalformedError("scenario.zones", "expected an array of one or two zones");
  }
  for (std::size_t i = 0; i < doc["zones"].size(); ++i) {
    s.zones.push_back(parse_zone(doc["zones"][i], "zones[" + std::to_string(i) + "]"));
  }

  auto parse_list = [&doc](const char* key, auto parser, auto& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_array()) throw MalformedError(std::string("scenario.") + key, "expected an array");
    std::size_t i = 0;
    for (const auto& item : doc[key]) {
      out.push_back(parser(item, std::string(key) + "[" + std::to_string(i) + "]"));
      ++i;
    }
  };
  parse_list("legit", parse_legit, s.legit);
  parse_list("attacks", parse_attack, s.attacks);
  parse_list("probes", parse_probe, s.probes);

  if (s.legit.empty() && s.attacks.empty() && s.probes.empty()) {
    throw MalformedError("scenario", "at least one workload required");
  }

  if (doc.contains("analysis")) {
    s.analysis = parse_analysis(doc["analysis"], "analysis");
    if (s.zones.size() != 2) {
      throw MalformedError("zones", "analysis requires two zones");
    }
  }

  const std::string table = string_field(doc, "scenario", "provider_table");
  const std::filesystem::path scenario_dir = std::filesystem::path(path).parent_path();
  const std::filesystem::path resolved =
      std::filesystem::path(table).is_absolute() ? std::filesystem::path(table)
                                                 : scenario_dir / table;
  if (!std::filesystem::exists(resolved)) {
    throw MissingFileError("provider table not found: " + resolved.string());
  }
  s.provider_table_path = resolved.string();

  for (const AttackWorkload& attack : s.attacks) {
    if (static_cast<std::uint64_t>(attack.count) > attack.provider_block.usable_hosts()) {
      throw MalformedError("attacks.count", "exceeds usable hosts of provider_block");
    }
  }

  return s;
}

std::vector<ArrivalSpec> build_arrivals(const Scenario& scenario, Rng& rng) {
  std::vector<std::vector<ArrivalSpec>> lists;
  for (const auto& w : scenario.legit) {
    lists.push_back(build_legit_arrivals(w, scenario.horizon, rng));
  }
  for (const auto& w : scenario.attacks) {
    lists.push_back(build_attack_wave(w, rng));
  }
  for (const auto& w : scenario.probes) {
    lists.push_back(build_probes(w, scenario.horizon));
  }
  return merge_arrivals(std::move(lists));
}

RunArtifacts run_scenario(const Scenario& scenario, const std::string& out_dir) {
  const ProviderMap providers = ProviderMap::load_file(scenario.provider_table_path);

  Rng rng(scenario.seed);
  std::vector<ArrivalSpec> arrivals = build_arrivals(scenario, rng);

  SimSetup setup;
  setup.zone_configs = scenario.zones;
  setup.analysis = scenario.analysis;
  setup.horizon = scenario.horizon;

  Simulation sim(std::move(setup), std::move(arrivals), &providers);
  const EventLog& log = sim.run();
  const std::string serialized = log.serialize();

  RunArtifacts artifacts;
  artifacts.fingerprint = sha256_hex(serialized);
  artifacts.report = compute_report(parse_log(log), scenario.metrics_window, scenario.seed);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  auto write_file = [&out_dir](const std::string& name, const std::string& content) {
    const std::string full = (fs::path(out_dir) / name).string();
    std::ofstream out(full, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + full);
    out << content;
    if (!out) throw IoError("write failed: " + full);
  };

  write_file("events.log", serialized);
  write_file("fingerprint.txt", artifacts.fingerprint + "  events.log\n");
  write_file("report.json", report_to_json(artifacts.report));
  write_file("availability.csv", availability_to_csv(artifacts.report));

  return artifacts;
}

std::string scenario_schema_text() {
  return R"(Scenario file: one JSON object, strict keys (unknown keys are rejected).

{
  "schema_version": 1,              // required, must be 1
  "seed": <uint>,                   // required; --seed overrides
  "horizon_s": <number>,            // required, simulated seconds > 0
  "metrics_window_s": <number>,     // optional, default 5
  "provider_table": "<path>",       // required; resolved against the scenario file
  "zones": [ <zone>, ... ],         // one or two
  "legit":   [ <legit workload>, ... ],   // optional
  "attacks": [ <attack workload>, ... ],  // optional
  "probes":  [ <probe workload>, ... ],   // optional (>= one workload overall)
  "analysis": <analysis>            // optional; requires exactly two zones
}

zone: {
  "max_clients": <int >= 0>,        // pool capacity
  "timeout_s": <number > 0>,
  "timeout_policy": "idle"|"absolute",  // default "idle"
  "rtt_us": <int >= 0>              // per window refill, default 0
}

legit workload: {
  "arrival_rate_per_s": <number>,   // Poisson rate
  "read_rate_range_bps": [lo, hi],  // uniform, bytes/second
  "response_size_range_b": [lo, hi],
  "src_block": "<cidr>",
  "slow_fraction": <0..1>,          // default 0.05; slow clients draw from
  "slow_read_rate_range_bps": [lo, hi]  // this range instead (default [4,30])
}

attack workload: {
  "count": <int >= 0>,              // distinct virtual IPs from the block
  "provider_block": "<cidr>",
  "window_range_b": [lo, hi],       // default [8,16]
  "read_rate_bps": <int>,           // default 5
  "launch_window_s": <number>,      // arrivals spread uniformly, default 10
  "response_size_b": <int>
}

probe workload: {
  "period_s": <number > 0>,
  "read_rate_bps": <int>,           // default 1000000
  "response_size_b": <int>          // default 1000
}

analysis: {
  "slow_threshold_bps": <number>,   // default 100
  "min_observation_s": <number>,    // default 10
  "group_by": "source_ip"|"provider"|"both",  // default "both"
  "group_threshold": <int >= 1>,    // default 5
  "period_s": <number>,             // default 5
  "include_unknown_provider": <bool>,  // default false
  "always_on": <bool>               // default false: arm after first saturation
}

Provider table file: one "<cidr> <provider-id>" per line, '#' comments.
)";
}

}  // namespace slowpool
