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

#include "slowpool/event.hpp"

#include <ostream>
#include <sstream>

namespace slowpool {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::ConnectAttempt: return "ConnectAttempt";
    case EventKind::ReadTick: return "ReadTick";
    case EventKind::TimeoutCheck: return "TimeoutCheck";
    case EventKind::AnalysisCycle: return "AnalysisCycle";
    case EventKind::TransferComplete: return "TransferComplete";
    case EventKind::ScenarioEnd: return "ScenarioEnd";
  }
  return "Unknown";
}

void EventLog::append(SimTime at, std::uint64_t seq, std::string kind, std::string payload) {
  entries_.push_back(Entry{at, seq, std::move(kind), std::move(payload)});
}

void EventLog::serialize(std::ostream& out) const {
  for (const auto& e : entries_) {
    out << e.at.micros << '\t' << e.seq << '\t' << e.kind << '\t' << e.payload << '\n';
  }
}

std::string EventLog::serialize() const {
  std::ostringstream out;
  serialize(out);
  return out.str();
}

}  // namespace slowpool
