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

#include <filesystem>
#include <fstream>
#include <thread>

#include "slowpool/errors.hpp"
#include "slowpool/log_model.hpp"
#include "slowpool/scenario.hpp"
#include "slowpool/sha256.hpp"
#include "slowpool/simulation.hpp"

using namespace slowpool;

namespace {

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "slowpool_scenario_tests";
  std::filesystem::create_directories(dir);
  return dir;
}

std::string write_temp(const std::string& name, const std::string& content) {
  const auto path = temp_dir() / name;
  std::ofstream out(path);
  out << content;
  return path.string();
}

constexpr const char kMinimalScenario[] = R"({
  "schema_version": 1,
  "seed": 5,
  "horizon_s": 10,
  "provider_table": "providers.txt",
  "zones": [ { "max_clients": 3, "timeout_s": 5 } ],
  "probes": [ { "period_s": 2 } ]
})";

std::string scenario_path(const char* name) {
  return std::string(SLOWPOOL_SCENARIO_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("the shipped paper_case scenario parses to the documented parameters") {
  const Scenario s = parse_scenario(scenario_path("paper_case.json"));
  CHECK(s.seed == 1);
  REQUIRE(s.zones.size() == 1);
  CHECK(s.zones[0].max_clients == 500);
  CHECK(s.zones[0].timeout == seconds(20));
  CHECK(s.zones[0].timeout_policy == TimeoutPolicy::Idle);
  REQUIRE(s.attacks.size() == 1);
  CHECK(s.attacks[0].count == 600);
  CHECK(s.attacks[0].window_range == std::pair<std::int64_t, std::int64_t>{8, 16});
  CHECK(s.attacks[0].read_rate == 5);
  CHECK(s.horizon == seconds(120));
  CHECK_FALSE(s.analysis.has_value());
  CHECK(std::filesystem::exists(s.provider_table_path));
}

TEST_CASE("the mitigated scenario carries two zones and the analysis block") {
  const Scenario s = parse_scenario(scenario_path("paper_case_mitigated.json"));
  REQUIRE(s.zones.size() == 2);
  REQUIRE(s.analysis.has_value());
  CHECK(s.analysis->group_threshold == 5);
  CHECK(s.analysis->slow_threshold_bps == 100.0);
  CHECK(s.analysis->min_observation == seconds(10));
  CHECK(s.analysis->period == seconds(5));
  CHECK(s.analysis->group_by == GroupBy::Both);
}

TEST_CASE("analysis with a single zone is rejected") {
  write_temp("providers.txt", "203.0.112.0/22 cloudX\n");
  const std::string path = write_temp("one_zone_analysis.json", R"({
    "schema_version": 1,
    "seed": 1,
    "horizon_s": 10,
    "provider_table": "providers.txt",
    "zones": [ { "max_clients": 3, "timeout_s": 5 } ],
    "probes": [ { "period_s": 2 } ],
    "analysis": { }
  })");
  try {
    parse_scenario(path);
    FAIL("expected MalformedError");
  } catch (const MalformedError& e) {
    CHECK(e.field() == "zones");
  }
}

TEST_CASE("unknown fields are rejected with the offending name") {
  write_temp("providers.txt", "203.0.112.0/22 cloudX\n");
  const std::string path = write_temp("unknown_field.json", R"({
    "schema_version": 1,
    "seed": 1,
    "horizon_s": 10,
    "provider_table": "providers.txt",
    "zones": [ { "max_clients": 3, "timeout_s": 5, "max_cleints": 9 } ],
    "probes": [ { "period_s": 2 } ]
  })");
  try {
    parse_scenario(path);
    FAIL("expected MalformedError");
  } catch (const MalformedError& e) {
    CHECK(std::string(e.what()).find("max_cleints") != std::string::npos);
  }
}

TEST_CASE("a scenario without workloads is rejected") {
  write_temp("providers.txt", "203.0.112.0/22 cloudX\n");
  const std::string path = write_temp("no_workloads.json", R"({
    "schema_version": 1,
    "seed": 1,
    "horizon_s": 10,
    "provider_table": "providers.txt",
    "zones": [ { "max_clients": 3, "timeout_s": 5 } ]
  })");
  CHECK_THROWS_AS(parse_scenario(path), MalformedError);
}

TEST_CASE("a missing provider table fails at parse time") {
  const std::string path = write_temp("missing_table.json", R"({
    "schema_version": 1,
    "seed": 1,
    "horizon_s": 10,
    "provider_table": "does_not_exist.txt",
    "zones": [ { "max_clients": 3, "timeout_s": 5 } ],
    "probes": [ { "period_s": 2 } ]
  })");
  CHECK_THROWS_AS(parse_scenario(path), MissingFileError);
}

TEST_CASE("an attack count beyond the block capacity is rejected at parse time") {
  write_temp("providers.txt", "203.0.113.0/24 cloudX\n");
  const std::string path = write_temp("overfull_attack.json", R"({
    "schema_version": 1,
    "seed": 1,
    "horizon_s": 10,
    "provider_table": "providers.txt",
    "zones": [ { "max_clients": 3, "timeout_s": 5 } ],
    "attacks": [ { "count": 600, "provider_block": "203.0.113.0/24", "response_size_b": 100 } ]
  })");
  CHECK_THROWS_AS(parse_scenario(path), MalformedError);
}

TEST_CASE("unsupported schema versions are rejected") {
  write_temp("providers.txt", "203.0.112.0/22 cloudX\n");
  const std::string path = write_temp("bad_version.json", R"({
    "schema_version": 2,
    "seed": 1,
    "horizon_s": 10,
    "provider_table": "providers.txt",
    "zones": [ { "max_clients": 3, "timeout_s": 5 } ],
    "probes": [ { "period_s": 2 } ]
  })");
  CHECK_THROWS_AS(parse_scenario(path), MalformedError);
}

TEST_CASE("invalid JSON reports a malformed scenario") {
  const std::string path = write_temp("broken.json", "{ not json");
  CHECK_THROWS_AS(parse_scenario(path), MalformedError);
  CHECK_THROWS_AS(parse_scenario("/nonexistent/scenario.json"), MissingFileError);
}

TEST_CASE("defaults fill optional fields") {
  write_temp("providers.txt", "203.0.112.0/22 cloudX\n");
  const std::string path = write_temp("minimal.json", kMinimalScenario);
  const Scenario s = parse_scenario(path);
  CHECK(s.metrics_window == seconds(5));
  CHECK(s.zones[0].timeout_policy == TimeoutPolicy::Idle);
  CHECK(s.zones[0].rtt == micros(0));
  REQUIRE(s.probes.size() == 1);
  CHECK(s.probes[0].read_rate == 1'000'000);
  CHECK(s.probes[0].response_size == 1000);
}

TEST_CASE("run_scenario twice produces identical fingerprints and reports") {
  const Scenario s = parse_scenario(scenario_path("smoke_tiny.json"));
  const auto dir1 = (temp_dir() / "run1").string();
  const auto dir2 = (temp_dir() / "run2").string();
  const RunArtifacts a = run_scenario(s, dir1);
  const RunArtifacts b = run_scenario(s, dir2);
  CHECK(a.fingerprint == b.fingerprint);
  CHECK(slurp(dir1 + "/fingerprint.txt") == slurp(dir2 + "/fingerprint.txt"));
  CHECK(slurp(dir1 + "/events.log") == slurp(dir2 + "/events.log"));
  CHECK(slurp(dir1 + "/report.json") == slurp(dir2 + "/report.json"));
  CHECK(sha256_hex(slurp(dir1 + "/events.log")) == a.fingerprint);
}

TEST_CASE("the seed override flows into the report") {
  Scenario s = parse_scenario(scenario_path("smoke_tiny.json"));
  const RunArtifacts base = run_scenario(s, (temp_dir() / "seed_a").string());
  s.seed = 777;
  const RunArtifacts other = run_scenario(s, (temp_dir() / "seed_b").string());
  CHECK(base.report.seed == 42);
  CHECK(other.report.seed == 777);
  CHECK(base.fingerprint != other.fingerprint);
}

TEST_CASE("replaying a log's arrivals reproduces the identical log") {
  // Once without a defense, once with the full two-zone analysis running.
  for (const char* name : {"smoke_tiny.json", "paper_case_mitigated.json"}) {
    CAPTURE(name);
    const Scenario s = parse_scenario(scenario_path(name));
    const ProviderMap providers = ProviderMap::load_file(s.provider_table_path);
    Rng rng(s.seed);

    SimSetup setup;
    setup.zone_configs = s.zones;
    setup.analysis = s.analysis;
    setup.horizon = s.horizon;

    Simulation original(setup, build_arrivals(s, rng), &providers);
    const std::string first = original.run().serialize();

    Simulation replayed(setup, extract_arrivals(parse_log(original.log())), &providers);
    const std::string second = replayed.run().serialize();
    CHECK(first == second);
  }
}

TEST_CASE("the schema text documents the strict format") {
  const std::string text = scenario_schema_text();
  CHECK(text.find("schema_version") != std::string::npos);
  CHECK(text.find("provider_table") != std::string::npos);
  CHECK(text.find("group_threshold") != std::string::npos);
}

TEST_CASE("scenarios run in parallel without perturbing each other") {
  // Engines share no state, so concurrent runs must produce the same bytes
  // as sequential ones.
  const Scenario s = parse_scenario(scenario_path("paper_case_mitigated.json"));
  const ProviderMap providers = ProviderMap::load_file(s.provider_table_path);

  auto run_once = [&]() {
    Rng rng(s.seed);
    SimSetup setup;
    setup.zone_configs = s.zones;
    setup.analysis = s.analysis;
    setup.horizon = s.horizon;
    Simulation sim(setup, build_arrivals(s, rng), &providers);
    return sim.run().serialize();
  };

  const std::string reference = run_once();
  std::string from_thread_a, from_thread_b;
  std::thread a([&] { from_thread_a = run_once(); });
  std::thread b([&] { from_thread_b = run_once(); });
  a.join();
  b.join();
  CHECK(from_thread_a == reference);
  CHECK(from_thread_b == reference);
}

TEST_CASE("the fingerprint hash matches the published sha-256 digests") {
  CHECK(sha256_hex("") ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq") ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
  // 64-byte message: padding spills into a second block.
  CHECK(sha256_hex(std::string(64, 'a')) ==
        "ffe054fe7ae0cb6dc65c3af9b61d5209f439851db43d0ba5997337df154668eb");
}
