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

#include <arpa/inet.h>

#include <cstdio>

#include "slowpool/errors.hpp"
#include "slowpool/wire.hpp"

namespace slowpool::wire {

bool is_loopback_host(const std::string& host) {
  if (host == "localhost") return true;
  in_addr addr{};
  if (inet_pton(AF_INET, host.c_str(), &addr) != 1) return false;
  return (ntohl(addr.s_addr) & 0xFF000000u) == 0x7F000000u;
}

void enforce_loopback(const std::string& host, bool allow_nonloopback) {
  if (allow_nonloopback || is_loopback_host(host)) return;
  throw NonLoopbackRefusedError(
      "refusing non-loopback target '" + host +
      "' (pass --unsafe-allow-nonloopback only against hosts you own)");
}

std::string to_json(const AttackSummary& summary) {
  char buf[256];
  std::snprintf(buf, sizeof buf,
                "{\"opened\":%lld,\"refused\":%lld,\"connect_failed\":%lld,"
                "\"alive_at_end\":%lld,\"bytes_read\":%lld}",
                static_cast<long long>(summary.opened), static_cast<long long>(summary.refused),
                static_cast<long long>(summary.connect_failed),
                static_cast<long long>(summary.alive_at_end),
                static_cast<long long>(summary.bytes_read));
  return buf;
}

std::string to_json(const ProbeResult& result) {
  const char* outcome = result.outcome == ProbeOutcome::Ok
                            ? "ok"
                            : (result.outcome == ProbeOutcome::Refused ? "refused" : "timeout");
  char buf[128];
  std::snprintf(buf, sizeof buf, "{\"outcome\":\"%s\",\"latency_ms\":%.3f}", outcome,
                result.latency_ms);
  return buf;
}

}  // namespace slowpool::wire
