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

#include "slowpool/engine.hpp"

#include <string>

#include "slowpool/errors.hpp"

namespace slowpool {

namespace {

std::string dispatch_payload(const Event& e) {
  switch (e.kind) {
    case EventKind::ConnectAttempt:
    case EventKind::ReadTick:
    case EventKind::TransferComplete:
      return "conn=" + std::to_string(e.conn_id);
    case EventKind::TimeoutCheck:
      return "conn=" + std::to_string(e.conn_id) + " gen=" + std::to_string(e.generation);
    case EventKind::AnalysisCycle:
      return "zone=" + std::to_string(e.zone_id);
    case EventKind::ScenarioEnd:
      return "";
  }
  return "";
}

}  // namespace

std::uint64_t Engine::schedule(Event event) {
  if (event.at < now_) {
    throw PastEventError("schedule: event at " + std::to_string(event.at.micros) +
                         "us is before now " + std::to_string(now_.micros) + "us");
  }
  event.seq = next_seq_++;
  const std::uint64_t seq = event.seq;
  queue_.push(event);
  return seq;
}

const EventLog& Engine::run(SimTime until) {
  stop_requested_ = false;
  while (!queue_.empty() && !stop_requested_) {
    const Event e = queue_.top();
    if (e.at > until) break;
    queue_.pop();
    now_ = e.at;
    current_seq_ = e.seq;
    log_.append(e.at, e.seq, std::string(to_string(e.kind)), dispatch_payload(e));
    if (handler_) handler_(e);
  }
  return log_;
}

}  // namespace slowpool
