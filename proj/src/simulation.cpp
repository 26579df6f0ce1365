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

#include "slowpool/simulation.hpp"

#include <cassert>
#include <string>
#include <unordered_map>

#include "slowpool/errors.hpp"

namespace slowpool {

Simulation::Simulation(SimSetup setup, std::vector<ArrivalSpec> arrivals,
                       const ProviderMap* providers)
    : setup_(std::move(setup)), arrivals_(std::move(arrivals)), providers_(providers) {
  if (setup_.zone_configs.empty() || setup_.zone_configs.size() > 2) {
    throw BadParamError("simulation: one or two zones required");
  }
  if (setup_.analysis) {
    if (setup_.zone_configs.size() != 2) {
      throw BadParamError("simulation: analysis requires two zones");
    }
    if (providers_ == nullptr) {
      throw BadParamError("simulation: analysis requires a provider map");
    }
  }

  for (std::size_t i = 0; i < setup_.zone_configs.size(); ++i) {
    zones_.push_back(Zone{static_cast<std::int32_t>(i), setup_.zone_configs[i], {}});
  }

  conns_.reserve(arrivals_.size());
  for (std::size_t i = 0; i < arrivals_.size(); ++i) {
    const ArrivalSpec& a = arrivals_[i];
    Connection conn;
    conn.id = static_cast<std::int64_t>(i);
    conn.src_ip = a.src_ip;
    conn.recv_window = a.recv_window;
    conn.read_rate = a.read_rate;
    conn.response_total = a.response_size;
    conn.arrival = a.at;
    conn.truth = a.truth;
    conn.is_probe = a.is_probe;
    conns_.push_back(conn);
  }

  engine_.set_handler([this](const Event& e) {
    switch (e.kind) {
      case EventKind::ConnectAttempt: on_connect_attempt(e); break;
      case EventKind::ReadTick: on_read_tick(e); break;
      case EventKind::TimeoutCheck: on_timeout_check(e); break;
      case EventKind::AnalysisCycle: on_analysis_cycle(e); break;
      case EventKind::TransferComplete: on_transfer_complete(e); break;
      case EventKind::ScenarioEnd: engine_.request_stop(); break;
    }
  });
}

const EventLog& Simulation::run() {
  assert(!ran_);
  ran_ = true;

  for (const Connection& conn : conns_) {
    engine_.schedule(Event{conn.arrival, 0, EventKind::ConnectAttempt, conn.id, -1, 0});
  }
  engine_.schedule(Event{setup_.horizon, 0, EventKind::ScenarioEnd, -1, -1, 0});
  if (setup_.analysis && setup_.analysis->period <= setup_.horizon) {
    engine_.schedule(Event{setup_.analysis->period, 0, EventKind::AnalysisCycle, -1, -1, 0});
  }

  return engine_.run(setup_.horizon);
}

void Simulation::log_line(std::string kind, std::string payload) {
  engine_.log().append(engine_.now(), engine_.current_seq(), std::move(kind), std::move(payload));
}

void Simulation::log_close(const Connection& conn, const Zone& zone, CloseReason reason,
                           const std::string& group_key) {
  std::string payload = "conn=" + std::to_string(conn.id) +
                        " zone=" + std::to_string(zone.id) +
                        " reason=" + std::string(to_string(reason));
  if (!group_key.empty()) payload += " group=" + group_key;
  payload += " pool=" + std::to_string(zone.pool.size());
  log_line("Close", std::move(payload));
}

void Simulation::note_saturation() {
  if (!saturated_ && !zones_[0].has_free_slot()) {
    saturated_ = true;
    first_saturation_at_ = engine_.now();
  }
}

void Simulation::on_connect_attempt(const Event& e) {
  Connection& conn = conns_[static_cast<std::size_t>(e.conn_id)];
  log_line("ConnSpec", "conn=" + std::to_string(conn.id) + " ip=" + conn.src_ip.to_string() +
                           " win=" + std::to_string(conn.recv_window) +
                           " rate=" + std::to_string(conn.read_rate) +
                           " size=" + std::to_string(conn.response_total) +
                           " label=" + std::string(to_string(conn.truth)) +
                           " probe=" + (conn.is_probe ? "1" : "0"));

  const RouteResult routed = route(zones_);
  if (!routed.admitted_anywhere) {
    // Full everywhere; try_admit on the first zone applies the rejection.
    const AdmitResult result = try_admit(zones_[0], conn, engine_.now());
    assert(result.outcome == AdmitOutcome::RejectedFull);
    (void)result;
    log_line("Reject", "conn=" + std::to_string(conn.id));
    note_saturation();
    return;
  }

  Zone& zone = zones_[static_cast<std::size_t>(routed.zone_index)];
  const AdmitResult result = try_admit(zone, conn, engine_.now());
  assert(result.outcome == AdmitOutcome::Admitted);
  log_line("Admit", "conn=" + std::to_string(conn.id) + " zone=" + std::to_string(zone.id) +
                        " pool=" + std::to_string(zone.pool.size()));
  engine_.schedule(Event{result.first_tick_at, 0, EventKind::ReadTick, conn.id, zone.id, 0});
  engine_.schedule(Event{engine_.now() + zone.config.timeout, 0, EventKind::TimeoutCheck,
                         conn.id, zone.id, conn.timeout_gen});
  note_saturation();
}

void Simulation::on_read_tick(const Event& e) {
  Connection& conn = conns_[static_cast<std::size_t>(e.conn_id)];
  if (conn.state != ConnState::Transferring) return;  // closed meanwhile; tick is a no-op

  Zone& zone = zones_[static_cast<std::size_t>(conn.zone_id)];
  const DeliverResult result = deliver_chunk(conn, zone.config, engine_.now());
  log_line("Deliver", "conn=" + std::to_string(conn.id) + " zone=" + std::to_string(zone.id) +
                          " bytes=" + std::to_string(result.bytes) +
                          " delivered=" + std::to_string(conn.delivered));

  if (result.completed) {
    engine_.schedule(Event{engine_.now(), 0, EventKind::TransferComplete, conn.id, zone.id, 0});
    return;
  }
  engine_.schedule(Event{result.next_tick_at, 0, EventKind::ReadTick, conn.id, zone.id, 0});
  if (zone.config.timeout_policy == TimeoutPolicy::Idle) {
    // Progress refreshes the idle deadline; the superseded check goes stale.
    ++conn.timeout_gen;
    engine_.schedule(Event{conn.last_progress_at + zone.config.timeout, 0,
                           EventKind::TimeoutCheck, conn.id, zone.id, conn.timeout_gen});
  }
}

void Simulation::on_timeout_check(const Event& e) {
  Connection& conn = conns_[static_cast<std::size_t>(e.conn_id)];
  if (conn.state != ConnState::Transferring) return;
  if (e.generation != conn.timeout_gen) return;  // superseded by progress

  Zone& zone = zones_[static_cast<std::size_t>(conn.zone_id)];
  if (timeout_due(conn, engine_.now(), zone.config)) {
    close(zone, conn, CloseReason::Timeout, engine_.now());
    log_close(conn, zone, CloseReason::Timeout);
    return;
  }
  const SimTime next = (zone.config.timeout_policy == TimeoutPolicy::Idle
                            ? conn.last_progress_at
                            : conn.opened_at) +
                       zone.config.timeout;
  engine_.schedule(Event{next, 0, EventKind::TimeoutCheck, conn.id, zone.id, conn.timeout_gen});
}

void Simulation::analyze_zone(Zone& zone) {
  const AnalysisConfig& cfg = *setup_.analysis;

  std::vector<DefenseView> rows;
  rows.reserve(zone.pool.size());
  for (const std::int64_t id : zone.pool) {
    const Connection& conn = conns_[static_cast<std::size_t>(id)];
    rows.push_back(DefenseView{conn.id, conn.src_ip, conn.opened_at, conn.delivered,
                               conn.last_progress_at});
    log_line("ViewRow", "zone=" + std::to_string(zone.id) + " conn=" + std::to_string(conn.id) +
                            " ip=" + conn.src_ip.to_string() +
                            " opened=" + std::to_string(conn.opened_at.micros) +
                            " delivered=" + std::to_string(conn.delivered) +
                            " last=" + std::to_string(conn.last_progress_at.micros));
  }

  const AnalysisResult analysis = analysis_cycle(rows, *providers_, cfg, engine_.now());
  for (const GroupStat& group : analysis.groups) {
    log_line("AnalysisGroup", "zone=" + std::to_string(zone.id) + " key=" + group.key +
                                  " size=" + std::to_string(group.size) +
                                  " dropped=" + (group.dropped ? "1" : "0"));
  }

  std::unordered_map<std::int64_t, Connection*> table;
  table.reserve(zone.pool.size());
  for (const std::int64_t id : zone.pool) {
    table.emplace(id, &conns_[static_cast<std::size_t>(id)]);
  }
  const ApplyResult applied =
      apply_drops(zone, table, analysis.drops, engine_.now(),
                  [this, &zone](const Connection& conn, const DropEntry& entry) {
                    log_close(conn, zone, CloseReason::Mitigation, entry.group_key);
                  });

  log_line("AnalysisSummary", "zone=" + std::to_string(zone.id) +
                                  " slow=" + std::to_string(analysis.slow_count) +
                                  " dropped=" + std::to_string(applied.closed) +
                                  " skipped=" + std::to_string(applied.skipped));
}

void Simulation::on_analysis_cycle(const Event&) {
  if (!setup_.analysis) return;
  const AnalysisConfig& cfg = *setup_.analysis;

  if (saturated_ || cfg.always_on) {
    for (Zone& zone : zones_) {
      analyze_zone(zone);
    }
  }
  engine_.schedule(Event{engine_.now() + cfg.period, 0, EventKind::AnalysisCycle, -1, -1, 0});
}

void Simulation::on_transfer_complete(const Event& e) {
  Connection& conn = conns_[static_cast<std::size_t>(e.conn_id)];
  if (conn.state != ConnState::Complete) return;
  Zone& zone = zones_[static_cast<std::size_t>(conn.zone_id)];
  if (zone.pool.count(conn.id) == 0) return;
  close(zone, conn, CloseReason::Complete, engine_.now());
  log_close(conn, zone, CloseReason::Complete);
}

}  // namespace slowpool
