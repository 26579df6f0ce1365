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

#include <atomic>
#include <csignal>
#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "slowpool/errors.hpp"
#include "slowpool/scenario.hpp"
#include "slowpool/wire.hpp"

namespace {

constexpr const char kVersion[] = "slowpool 1.0.0";

constexpr int kExitOk = 0;
constexpr int kExitBadScenario = 2;
constexpr int kExitRuntime = 3;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

int cmd_simulate(const std::string& scenario_path, std::int64_t seed_override,
                 const std::string& out_dir) {
  slowpool::Scenario scenario;
  try {
    scenario = slowpool::parse_scenario(scenario_path);
  } catch (const slowpool::Error& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return kExitBadScenario;
  }
  if (seed_override >= 0) {
    scenario.seed = static_cast<std::uint64_t>(seed_override);
  }

  try {
    const slowpool::RunArtifacts artifacts = slowpool::run_scenario(scenario, out_dir);
    std::cout << "fingerprint " << artifacts.fingerprint << "\n";
    std::cout << "report " << out_dir << "/report.json\n";
    const auto& c = artifacts.report.confusion;
    std::cout << "confusion tp=" << c.tp << " fp=" << c.fp << " fn=" << c.fn << " tn=" << c.tn
              << "\n";
  } catch (const slowpool::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitRuntime;
  } catch (const slowpool::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Slow-read attack/defense testbed: deterministic connection-pool "
               "simulator plus a loopback socket harness"};
  app.set_version_flag("--version", kVersion);

  bool print_schema = false;
  app.add_flag("--schema", print_schema, "print the scenario file schema and exit");

  // simulate
  auto* simulate = app.add_subcommand("simulate", "run a scenario file");
  std::string scenario_path;
  std::string out_dir = "out";
  std::int64_t seed_override = -1;
  simulate->add_option("scenario", scenario_path, "scenario JSON file")->required();
  simulate->add_option("--seed", seed_override, "override the scenario's seed");
  simulate->add_option("--out", out_dir, "output directory (default: out)");

  // wire
  auto* wire_cmd = app.add_subcommand("wire", "real-socket loopback harness");
  wire_cmd->require_subcommand(1);

  auto* serve = wire_cmd->add_subcommand("serve", "run the bounded-pool HTTP server");
  slowpool::wire::ServeConfig serve_cfg;
  serve->add_option("--host", serve_cfg.host, "listen address (loopback unless overridden)");
  serve->add_option("--port", serve_cfg.port, "listen port (0 = ephemeral, printed on startup)");
  serve->add_option("--max-clients", serve_cfg.max_clients, "concurrent connection cap");
  serve->add_option("--idle-timeout-s", serve_cfg.idle_timeout_sec,
                    "close connections with no write progress for this long");
  serve->add_option("--body-bytes", serve_cfg.body_bytes, "response body size");
  serve->add_option("--send-buffer-bytes", serve_cfg.send_buffer_bytes,
                    "server socket send buffer");
  serve->add_option("--max-runtime-s", serve_cfg.max_runtime_sec, "exit after this long (0 = off)");
  serve->add_flag("--unsafe-allow-nonloopback", serve_cfg.allow_nonloopback,
                  "allow binding beyond loopback (know what you are doing)");

  auto* attack = wire_cmd->add_subcommand("attack", "run the slow-read client swarm");
  slowpool::wire::AttackConfig attack_cfg;
  attack->add_option("--host", attack_cfg.host, "target address");
  attack->add_option("--port", attack_cfg.port, "target port")->required();
  attack->add_option("--count", attack_cfg.count, "connections to open")->required();
  attack->add_option("--recv-buffer-bytes", attack_cfg.recv_buffer_bytes,
                     "socket receive buffer (small = tiny advertised window)");
  attack->add_option("--read-rate-bps", attack_cfg.read_rate_bps, "paced read rate per connection");
  attack->add_option("--hold-s", attack_cfg.hold_sec, "hold duration");
  attack->add_flag("--unsafe-allow-nonloopback", attack_cfg.allow_nonloopback,
                   "allow non-loopback targets (never point this at hosts you do not own)");

  auto* probe_cmd = wire_cmd->add_subcommand("probe", "single fast availability probe");
  std::string probe_host = "127.0.0.1";
  std::uint16_t probe_port = 0;
  bool probe_unsafe = false;
  probe_cmd->add_option("--host", probe_host, "target address");
  probe_cmd->add_option("--port", probe_port, "target port")->required();
  probe_cmd->add_flag("--unsafe-allow-nonloopback", probe_unsafe, "allow non-loopback targets");

  CLI11_PARSE(app, argc, argv);

  if (print_schema) {
    std::cout << slowpool::scenario_schema_text();
    return kExitOk;
  }

  try {
    if (*simulate) {
      return cmd_simulate(scenario_path, seed_override, out_dir);
    }
    if (*serve) {
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::signal(SIGPIPE, SIG_IGN);
      slowpool::wire::serve(serve_cfg, &g_stop, std::cout);
      return kExitOk;
    }
    if (*attack) {
      std::signal(SIGPIPE, SIG_IGN);
      const auto summary = slowpool::wire::slow_read_attack(attack_cfg);
      std::cout << slowpool::wire::to_json(summary) << "\n";
      return kExitOk;
    }
    if (*probe_cmd) {
      std::signal(SIGPIPE, SIG_IGN);
      const auto result = slowpool::wire::probe(probe_host, probe_port, probe_unsafe);
      std::cout << slowpool::wire::to_json(result) << "\n";
      return kExitOk;
    }
  } catch (const slowpool::NonLoopbackRefusedError& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return kExitBadScenario;
  } catch (const slowpool::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }

  std::cout << app.help();
  return kExitOk;
}
